"""Simulation toolkit for a classical oscillator in a random environment.

The package follows one storyline: the oscillator's complex log-derivative
process lives on the (u1, u2) phase plane, its distribution obeys an
advection-diffusion equation with a linear source, the trajectory
expectation obeys a coupled complex variant of the same equation, a path
ensemble provides an independent Monte Carlo check of both, and the
induced metric's quartic classifies the plane's surviving topology.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .entropy import (
    EntropySeries,
    entropy_production,
    entropy_series,
    generalized_entropy,
    partial_entropy,
    shannon,
)
from .errors import (
    CflError,
    ConfigError,
    DomainError,
    FileFormatError,
    GridMismatchError,
    MassError,
    OscenvError,
    StabilityError,
)
from .fields import (
    ComplexField,
    Field2D,
    Grid2D,
    default_grid,
    reflect_u2,
    trapezoid_mass,
)
from .fp import (
    CflReport,
    FpRun,
    cfl_check,
    cfl_report,
    delta_surrogate,
    fp_step,
    init_gaussian,
    normalize,
    run_fp,
)
from .model import (
    DriftCoeffs,
    EnvConfig,
    Trajectory1D,
    drift,
    omega0,
    solve_regular_oscillator,
)
from .oracle import (
    EnsembleRun,
    PathState,
    em_step,
    short_time_kernel,
    simulate_ensemble,
)
from .presets import PRESETS, Preset, get_preset
from .qfield import (
    AxisProfile,
    QRun,
    axis1_step,
    axis2_step,
    init_q,
    lambda_q,
    normalize_q,
    q_step,
    reflection_exchange_check,
    run_q,
)
from .topology import (
    AngleResult,
    MetricPoint,
    QuarticCoeffs,
    QuarticRoots,
    RegionMap,
    angles,
    classify_manifold,
    quartic_coeffs,
    region_from_mask,
    solve_metric_quartic,
    solve_quartic_arrays,
)

__all__ = [
    "__version__",
    # errors
    "OscenvError", "ConfigError", "CflError", "StabilityError", "MassError",
    "DomainError", "GridMismatchError", "FileFormatError",
    # fields
    "Grid2D", "Field2D", "ComplexField", "default_grid", "trapezoid_mass",
    "reflect_u2",
    # model
    "EnvConfig", "omega0", "DriftCoeffs", "drift", "Trajectory1D",
    "solve_regular_oscillator",
    # distribution solver
    "CflReport", "cfl_report", "cfl_check", "init_gaussian", "delta_surrogate",
    "fp_step", "normalize", "FpRun", "run_fp",
    # complex solver
    "QRun", "run_q", "q_step", "init_q", "normalize_q", "lambda_q",
    "reflection_exchange_check", "AxisProfile", "axis1_step", "axis2_step",
    # oracle
    "PathState", "em_step", "short_time_kernel", "EnsembleRun",
    "simulate_ensemble",
    # entropy
    "shannon", "partial_entropy", "generalized_entropy", "EntropySeries",
    "entropy_series", "entropy_production",
    # topology
    "MetricPoint", "QuarticCoeffs", "quartic_coeffs", "QuarticRoots",
    "solve_metric_quartic", "solve_quartic_arrays", "RegionMap",
    "classify_manifold", "region_from_mask", "AngleResult", "angles",
    # presets
    "Preset", "PRESETS", "get_preset",
]
