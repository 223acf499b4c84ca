"""Explicit solver for the phase-plane distribution equation.

The distribution P(u1, u2, t) obeys

    dP/dt = eps_r d2P/du1^2 + eps_i d2P/du2^2
            + (u1^2 - u2^2 + omega^2(t)) dP/du1 + 2 u1 u2 dP/du2 + 4 u1 P

stepped forward in time with the shared explicit stencil and a Dirichlet
zero ring.  Mass leaks through the boundary; the normalized field divides
the leak out, and the raw mass alpha(t) is reported alongside.

The production initial state is a narrow Gaussian standing in for a point
mass at the switch-on phase point (0, omega0(t0)); init_gaussian builds the
same bump anywhere via its center argument.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._stencil import step_arrays, stencil_coeffs
from .errors import CflError, ConfigError, MassError, StabilityError
from .fields import Field2D, Grid2D, trapezoid_mass
from .model import EnvConfig, omega0

__all__ = [
    "init_gaussian",
    "delta_surrogate",
    "cfl_check",
    "cfl_report",
    "CflReport",
    "fp_step",
    "normalize",
    "run_fp",
    "FpRun",
]

MASS_FLOOR = 1e-12


def init_gaussian(
    grid: Grid2D,
    sigma: float = 500.0,
    a: float = 0.5,
    b: float = 0.5,
    center: tuple[float, float] = (0.0, 0.0),
    t: float = 0.0,
) -> Field2D:
    """Narrow Gaussian surrogate for a point-concentrated state.

    Peak height sigma, shape exp(-w[(u1/a)^2 + (u2/b)^2]) with w = pi*sigma*a^2
    measured from center, so the continuous integral is sigma*pi*a*b/w
    (exactly 1 for a = b).
    """
    if sigma <= 0.0 or a <= 0.0 or b <= 0.0:
        raise ConfigError(f"gaussian parameters must be positive, got {(sigma, a, b)}")
    c1, c2 = float(center[0]), float(center[1])
    w = math.pi * sigma * a * a
    s1 = a / math.sqrt(2.0 * w)
    s2 = b / math.sqrt(2.0 * w)
    margins = (
        (c1 - grid.u1_min) / s1, (grid.u1_max - c1) / s1,
        (c2 - grid.u2_min) / s2, (grid.u2_max - c2) / s2,
    )
    if min(margins) < 3.0:
        raise ConfigError(
            f"gaussian at ({c1}, {c2}) sits within 3 standard deviations of the"
            " domain edge; too much initial mass would fall outside"
        )
    u1 = grid.u1[None, :]
    u2 = grid.u2[:, None]
    values = sigma * np.exp(-w * (((u1 - c1) / a) ** 2 + ((u2 - c2) / b) ** 2))
    values[0, :] = 0.0
    values[-1, :] = 0.0
    values[:, 0] = 0.0
    values[:, -1] = 0.0
    return Field2D(grid, values, t=t)


def delta_surrogate(grid: Grid2D, cfg: EnvConfig, sigma: float = 500.0,
                    a: float = 0.5, b: float = 0.5) -> Field2D:
    """The production initial field: the Gaussian bump at (0, omega0(t0))."""
    return init_gaussian(grid, sigma, a, b,
                         center=(0.0, omega0(cfg.t0, cfg)), t=cfg.t0)


@dataclass(frozen=True)
class CflReport:
    """Both explicit-scheme bounds evaluated for one (grid, cfg, dt)."""

    r1: float
    r2: float
    courant: float
    max_dt_diffusive: float
    max_dt_advective: float

    @property
    def ok(self) -> bool:
        return (self.r1 + self.r2) <= 0.5 and self.courant <= 1.0

    @property
    def max_dt(self) -> float:
        return min(self.max_dt_diffusive, self.max_dt_advective)


def cfl_report(grid: Grid2D, cfg: EnvConfig, dt: float) -> CflReport:
    """Diffusive bound r1 + r2 <= 1/2 and the advective Courant bound.

    The advective bound uses the largest |k1|, |k2| over the four grid
    corners with the frequency at its supremum.
    """
    if dt <= 0.0:
        raise ConfigError(f"dt must be positive, got {dt}")
    _, _, r1, r2 = stencil_coeffs(cfg.eps_r, cfg.eps_i, dt, grid.du1, grid.du2)
    om2 = cfg.omega_sup ** 2
    k1_max = 0.0
    k2_max = 0.0
    for uc1 in (grid.u1_min, grid.u1_max):
        for uc2 in (grid.u2_min, grid.u2_max):
            k1_max = max(k1_max, abs(uc1 * uc1 - uc2 * uc2 + om2))
            k2_max = max(k2_max, abs(2.0 * uc1 * uc2))
    courant = dt * k1_max / (2.0 * grid.du1) + dt * k2_max / grid.du2
    diff_rate = cfg.eps_r / grid.du1 ** 2 + cfg.eps_i / grid.du2 ** 2
    adv_rate = k1_max / (2.0 * grid.du1) + k2_max / grid.du2
    return CflReport(
        r1=r1,
        r2=r2,
        courant=courant,
        max_dt_diffusive=(0.5 / diff_rate) if diff_rate > 0.0 else math.inf,
        max_dt_advective=(1.0 / adv_rate) if adv_rate > 0.0 else math.inf,
    )


def cfl_check(grid: Grid2D, cfg: EnvConfig, dt: float) -> bool:
    """True iff both explicit stability bounds hold."""
    return cfl_report(grid, cfg, dt).ok


def _require_cfl(grid: Grid2D, cfg: EnvConfig, dt: float) -> None:
    rep = cfl_report(grid, cfg, dt)
    if not rep.ok:
        raise CflError(
            f"explicit step unstable: r1+r2={rep.r1 + rep.r2:.4g} (limit 0.5),"
            f" courant={rep.courant:.4g} (limit 1); max admissible dt={rep.max_dt:.4g}",
            max_dt=rep.max_dt,
        )


def fp_step(field: Field2D, cfg: EnvConfig, dt: float) -> Field2D:
    """One explicit step of the distribution equation (functional form)."""
    _require_cfl(field.grid, cfg, dt)
    g = field.grid
    out = np.empty_like(field.values)
    om = omega0(field.t, cfg)
    step_arrays(
        field.values, field.values, out, g.u1, g.u2, om * om,
        cfg.eps_r, cfg.eps_i, dt, g.du1, g.du2,
        source_factor=4.0, coupling_scale=0.0,
    )
    if not math.isfinite(float(np.sum(out))):
        raise StabilityError(f"non-finite values produced by the step from t={field.t}")
    return Field2D(g, out, field.t + dt)


def normalize(field: Field2D) -> tuple[Field2D, float]:
    """Unit-mass copy of the field plus the raw mass alpha it divided out."""
    alpha = trapezoid_mass(field.grid, field.values)
    if not math.isfinite(alpha) or abs(alpha) < MASS_FLOOR:
        raise MassError(f"field mass {alpha} is degenerate, cannot normalize")
    return Field2D(field.grid, field.values / alpha, field.t), alpha


@dataclass
class FpRun:
    """Everything a distribution run emits."""

    cfg: EnvConfig
    grid: Grid2D
    dt: float
    snapshots: list[Field2D]
    snapshot_alphas: list[float]
    alpha_times: np.ndarray
    alpha_values: np.ndarray


def run_fp(
    cfg: EnvConfig,
    grid: Grid2D,
    dt: float,
    t_end: float,
    snapshot_times: tuple[float, ...] = (1.5, 10.0, 20.0),
    init: Field2D | None = None,
    alpha_every: int = 1000,
    check_every: int = 250,
) -> FpRun:
    """March the distribution to t_end, recording normalized snapshots.

    Snapshots land on the nearest step not exceeding each requested time.
    alpha is sampled every alpha_every steps.
    """
    _require_cfl(grid, cfg, dt)
    if init is None:
        init = delta_surrogate(grid, cfg)
    elif init.grid != grid:
        raise ConfigError("initial field lives on a different grid")
    t_start = init.t
    if t_end < t_start:
        raise ConfigError(f"t_end {t_end} precedes start time {t_start}")

    n_total = int(math.floor((t_end - t_start) / dt + 1e-9))
    snap_steps = sorted({int(math.floor((ts - t_start) / dt + 1e-9)) for ts in snapshot_times
                        if t_start <= ts <= t_end + 1e-12})
    snap_iter = iter(snap_steps + [-1])
    next_snap = next(snap_iter)

    try:
        axis_nodes = (grid.u2_zero_index, grid.u1_zero_index)
    except ConfigError:
        axis_nodes = None

    field = init.values.copy()
    work = np.empty_like(field)

    snapshots: list[Field2D] = []
    snapshot_alphas: list[float] = []
    alpha_times: list[float] = []
    alpha_values: list[float] = []

    def record_alpha(step: int) -> None:
        alpha_times.append(t_start + step * dt)
        alpha_values.append(trapezoid_mass(grid, field))

    def record_snapshot(step: int) -> None:
        t = t_start + step * dt
        snap = Field2D(grid, field.copy(), t)
        if axis_nodes is not None:
            kz, jz = axis_nodes
            assert snap.values[kz, :][jz] == snap.values[:, jz][kz]
        normalized, alpha = normalize(snap)
        snapshots.append(normalized)
        snapshot_alphas.append(alpha)

    record_alpha(0)
    if next_snap == 0:
        record_snapshot(0)
        next_snap = next(snap_iter)

    for n in range(n_total):
        t = t_start + n * dt
        om = omega0(t, cfg)
        step_arrays(field, field, work, grid.u1, grid.u2, om * om,
                    cfg.eps_r, cfg.eps_i, dt, grid.du1, grid.du2,
                    source_factor=4.0, coupling_scale=0.0)
        field, work = work, field
        step = n + 1
        if step % check_every == 0 or step == n_total:
            if not math.isfinite(float(np.sum(field))):
                raise StabilityError(
                    f"non-finite values by step {step} (t={t_start + step * dt:.6g})",
                    step=step,
                )
        if step % alpha_every == 0 or step == n_total:
            record_alpha(step)
        if step == next_snap:
            record_snapshot(step)
            next_snap = next(snap_iter)

    return FpRun(
        cfg=cfg,
        grid=grid,
        dt=dt,
        snapshots=snapshots,
        snapshot_alphas=snapshot_alphas,
        alpha_times=np.asarray(alpha_times),
        alpha_values=np.asarray(alpha_values),
    )
