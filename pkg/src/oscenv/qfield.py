"""Coupled solver for the two components of the complex field Q.

Both components ride the same stencil as the distribution solver with a
stronger source (5 u1 instead of 4 u1) and a cross-coupling +/- u2 between
them:

    dQi/dt = {L + u1} Qi + u2 Qr
    dQr/dt = {L + u1} Qr - u2 Qi

The phase-plane averages of (Qr, Qi) divided by the distribution mass give
the complex amplitude ratio Lambda(t).

The module also carries the two on-axis reductions: a local equation along
u1 and a deviating-argument pair along u2, where each profile is advanced
with the value of its argument-reflected partner.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._stencil import step_arrays
from .errors import CflError, ConfigError, GridMismatchError, MassError, StabilityError
from .fields import ComplexField, Grid2D, reflect_u2, trapezoid_mass
from .fp import _require_cfl, delta_surrogate
from .model import EnvConfig, omega0

__all__ = [
    "init_q",
    "q_step",
    "normalize_q",
    "reflection_exchange_check",
    "lambda_q",
    "run_q",
    "QRun",
    "AxisProfile",
    "axis1_step",
    "axis2_step",
    "neumann_boundary_values",
]


def init_q(grid: Grid2D, cfg: EnvConfig, sigma: float = 500.0, a: float = 0.5,
           b: float = 0.5) -> ComplexField:
    """Production start: Qr is the point-mass surrogate Gaussian, Qi is zero.

    The complex field begins as the (real) initial distribution itself, so
    the amplitude ratio starts at exactly 1 and the phase winds up from
    zero as the imaginary component is generated by the coupling.
    """
    base = delta_surrogate(grid, cfg, sigma=sigma, a=a, b=b)
    return ComplexField(grid, base.values, np.zeros_like(base.values), t=base.t)


def q_step(
    field: ComplexField,
    cfg: EnvConfig,
    dt: float,
    source_factor: float = 5.0,
    coupling: float = 1.0,
) -> ComplexField:
    """One explicit step of the coupled system, both components from level n.

    source_factor and coupling exist as test hooks: with (4.0, 0.0) each
    component degenerates to the plain distribution step, executing the very
    same kernel code path.
    """
    _require_cfl(field.grid, cfg, dt)
    g = field.grid
    om = omega0(field.t, cfg)
    om2 = om * om
    qi_new = np.empty_like(field.qi)
    qr_new = np.empty_like(field.qr)
    step_arrays(field.qi, field.qr, qi_new, g.u1, g.u2, om2,
                cfg.eps_r, cfg.eps_i, dt, g.du1, g.du2,
                source_factor=source_factor, coupling_scale=+coupling)
    step_arrays(field.qr, field.qi, qr_new, g.u1, g.u2, om2,
                cfg.eps_r, cfg.eps_i, dt, g.du1, g.du2,
                source_factor=source_factor, coupling_scale=-coupling if coupling != 0.0 else 0.0)
    if not math.isfinite(float(np.sum(qi_new)) + float(np.sum(qr_new))):
        raise StabilityError(f"non-finite values produced by the step from t={field.t}")
    return ComplexField(g, qr_new, qi_new, field.t + dt)


def normalize_q(field: ComplexField) -> tuple[ComplexField, float]:
    """Divide both components by the shared mass beta = integral of (Qr + Qi)."""
    beta = trapezoid_mass(field.grid, field.qr) + trapezoid_mass(field.grid, field.qi)
    if not math.isfinite(beta) or abs(beta) < 1e-12:
        raise MassError(f"component sum mass {beta} is degenerate, cannot normalize")
    return ComplexField(field.grid, field.qr / beta, field.qi / beta, field.t), beta


def reflection_exchange_check(field: ComplexField) -> float:
    """max over nodes of |Qi(u1, -u2) - Qr(u1, u2)|.

    Zero (to rounding) whenever the evolution started from data satisfying
    the exchange relation, which the coupled update preserves.
    """
    return float(np.max(np.abs(reflect_u2(field.grid, field.qi) - field.qr)))


def lambda_q(snapshots: list[ComplexField], alphas: list[float]) -> np.ndarray:
    """Complex amplitude ratio: (integral Qr + i integral Qi) / alpha per time."""
    if len(snapshots) != len(alphas):
        raise ConfigError(
            f"snapshot and alpha lists differ in length: {len(snapshots)} vs {len(alphas)}"
        )
    out = np.empty(len(snapshots), dtype=complex)
    for i, (q, alpha) in enumerate(zip(snapshots, alphas)):
        if not math.isfinite(alpha) or abs(alpha) < 1e-12:
            raise MassError(f"alpha[{i}] = {alpha} is degenerate")
        out[i] = complex(
            trapezoid_mass(q.grid, q.qr) / alpha,
            trapezoid_mass(q.grid, q.qi) / alpha,
        )
    return out


@dataclass
class QRun:
    """Raw output of a coupled complex-field run."""

    cfg: EnvConfig
    grid: Grid2D
    dt: float
    snapshots: list[ComplexField]
    series_times: np.ndarray
    series_qr_int: np.ndarray
    series_qi_int: np.ndarray


def run_q(
    cfg: EnvConfig,
    grid: Grid2D,
    dt: float,
    t_end: float,
    snapshot_times: tuple[float, ...] = (1.5, 10.0, 20.0),
    init: ComplexField | None = None,
    series_every: int = 1000,
    check_every: int = 250,
) -> QRun:
    """March the coupled system, keeping raw snapshots and integral series.

    Snapshots are unnormalized so callers can form Lambda against a
    concurrent distribution run or normalize for the entropy diagnostics.
    """
    _require_cfl(grid, cfg, dt)
    if init is None:
        init = init_q(grid, cfg)
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

    qr = init.qr.copy()
    qi = init.qi.copy()
    qr_work = np.empty_like(qr)
    qi_work = np.empty_like(qi)

    snapshots: list[ComplexField] = []
    series_times: list[float] = []
    series_qr: list[float] = []
    series_qi: list[float] = []

    def record_series(step: int) -> None:
        series_times.append(t_start + step * dt)
        series_qr.append(trapezoid_mass(grid, qr))
        series_qi.append(trapezoid_mass(grid, qi))

    def record_snapshot(step: int) -> None:
        snapshots.append(ComplexField(grid, qr.copy(), qi.copy(), t_start + step * dt))

    record_series(0)
    if next_snap == 0:
        record_snapshot(0)
        next_snap = next(snap_iter)

    for n in range(n_total):
        t = t_start + n * dt
        om = omega0(t, cfg)
        om2 = om * om
        step_arrays(qi, qr, qi_work, grid.u1, grid.u2, om2,
                    cfg.eps_r, cfg.eps_i, dt, grid.du1, grid.du2,
                    source_factor=5.0, coupling_scale=1.0)
        step_arrays(qr, qi, qr_work, grid.u1, grid.u2, om2,
                    cfg.eps_r, cfg.eps_i, dt, grid.du1, grid.du2,
                    source_factor=5.0, coupling_scale=-1.0)
        qr, qr_work = qr_work, qr
        qi, qi_work = qi_work, qi
        step = n + 1
        if step % check_every == 0 or step == n_total:
            if not math.isfinite(float(np.sum(qr)) + float(np.sum(qi))):
                raise StabilityError(
                    f"non-finite values by step {step} (t={t_start + step * dt:.6g})",
                    step=step,
                )
        if step % series_every == 0 or step == n_total:
            record_series(step)
        if step == next_snap:
            record_snapshot(step)
            next_snap = next(snap_iter)

    return QRun(
        cfg=cfg,
        grid=grid,
        dt=dt,
        snapshots=snapshots,
        series_times=np.asarray(series_times),
        series_qr_int=np.asarray(series_qr),
        series_qi_int=np.asarray(series_qi),
    )


# ---------------------------------------------------------------------------
# on-axis reductions
# ---------------------------------------------------------------------------

@dataclass
class AxisProfile:
    """A 1-D profile along one phase-plane axis."""

    axis: str
    coords: np.ndarray
    values: np.ndarray
    t: float

    def __post_init__(self):
        if self.axis not in ("u1", "u2"):
            raise ConfigError(f"axis must be 'u1' or 'u2', got {self.axis!r}")
        self.coords = np.asarray(self.coords, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.coords.ndim != 1 or self.coords.shape != self.values.shape:
            raise ConfigError("coords and values must be matching 1-D arrays")
        if len(self.coords) < 3:
            raise ConfigError("axis profile needs at least 3 nodes")
        d = np.diff(self.coords)
        if d.min() <= 0 or (d.max() - d.min()) > 1e-9 * d.max():
            raise ConfigError("axis coordinates must be uniform and increasing")

    @property
    def du(self) -> float:
        return float(self.coords[1] - self.coords[0])

    def mass(self) -> float:
        return float(np.trapezoid(self.values, dx=self.du))


def _axis_cfl(eps: float, du: float, dt: float) -> None:
    r = eps * dt / (du * du)
    if r > 0.5:
        raise CflError(
            f"axis step unstable: r={r:.4g} > 0.5; max admissible dt={0.5 * du * du / eps:.4g}",
            max_dt=0.5 * du * du / eps,
        )


def axis1_step(profile: AxisProfile, cfg: EnvConfig, dt: float) -> AxisProfile:
    """Explicit step of dQ/dt = eps_r Q'' + (u1^2 + omega^2) Q' + 5 u1 Q."""
    if profile.axis != "u1":
        raise ConfigError(f"expected a u1-axis profile, got {profile.axis}")
    _axis_cfl(cfg.eps_r, profile.du, dt)
    u = profile.coords
    v = profile.values
    om = omega0(profile.t, cfg)
    du = profile.du
    out = np.zeros_like(v)
    d2 = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (du * du)
    d1 = (v[2:] - v[:-2]) / (2.0 * du)
    ui = u[1:-1]
    out[1:-1] = v[1:-1] + dt * (cfg.eps_r * d2 + (ui * ui + om * om) * d1 + 5.0 * ui * v[1:-1])
    if not math.isfinite(float(np.sum(out))):
        raise StabilityError(f"non-finite values produced by the axis step from t={profile.t}")
    return AxisProfile("u1", u, out, profile.t + dt)


def axis2_step(
    profile: AxisProfile,
    mirror: AxisProfile,
    cfg: EnvConfig,
    dt: float,
) -> tuple[AxisProfile, AxisProfile]:
    """Deviating-argument pair along u2, both advanced from the same level.

    Each profile obeys dQ/dt = eps_i Q'' + (omega^2 - u2^2) Q / 2 + u2 * partner,
    the partner holding the argument-reflected values.  Even data keeps the
    pair equal (local source (omega^2 - u2^2)/2 + u2); odd data keeps them
    opposite (source (omega^2 - u2^2)/2 - u2).
    """
    for p in (profile, mirror):
        if p.axis != "u2":
            raise ConfigError(f"expected u2-axis profiles, got {p.axis}")
    if profile.coords.shape != mirror.coords.shape or not np.array_equal(
        profile.coords, mirror.coords
    ):
        raise GridMismatchError("profile and mirror live on different axis grids")
    if profile.t != mirror.t:
        raise ConfigError(f"profile times differ: {profile.t} vs {mirror.t}")
    _axis_cfl(cfg.eps_i, profile.du, dt)
    u = profile.coords
    om = omega0(profile.t, cfg)
    du = profile.du

    def advance(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x)
        d2 = (x[2:] - 2.0 * x[1:-1] + x[:-2]) / (du * du)
        ui = u[1:-1]
        out[1:-1] = x[1:-1] + dt * (
            cfg.eps_i * d2 + 0.5 * (om * om - ui * ui) * x[1:-1] + ui * y[1:-1]
        )
        return out

    p_new = advance(profile.values, mirror.values)
    m_new = advance(mirror.values, profile.values)
    if not math.isfinite(float(np.sum(p_new)) + float(np.sum(m_new))):
        raise StabilityError(f"non-finite values produced by the axis step from t={profile.t}")
    t_new = profile.t + dt
    return (
        AxisProfile("u2", u, p_new, t_new),
        AxisProfile("u2", u, m_new, t_new),
    )


def neumann_boundary_values(
    axis1_profile: AxisProfile, axis2_profile: AxisProfile
) -> tuple[np.ndarray, np.ndarray]:
    """Boundary derivative traces (1 * Q1, 1/2 * Q2) for unit-mass profiles."""
    if axis1_profile.axis != "u1" or axis2_profile.axis != "u2":
        raise ConfigError("expected (u1, u2) axis profiles in that order")
    for p in (axis1_profile, axis2_profile):
        m = p.mass()
        if not math.isfinite(m) or abs(m) < 1e-12:
            raise MassError(f"{p.axis} profile mass {m} is degenerate")
        if abs(m - 1.0) > 1e-6:
            raise MassError(f"{p.axis} profile is not normalized (mass {m})")
    return 1.0 * axis1_profile.values, 0.5 * axis2_profile.values
