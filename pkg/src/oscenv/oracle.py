"""Stochastic-trajectory ensemble: the independent check on the grid solvers.

Paths follow the phase-plane system

    du1 = (u2^2 - u1^2 - omega^2(t)) dt + sqrt(2 eps_r dt) N(0,1)
    du2 = (-2 u1 u2) dt            + sqrt(2 eps_i dt) N(0,1)

whose ensemble density obeys the distribution equation solved by the grid
code.  Paths that run away past a cutoff are frozen and excluded from every
average.  The ensemble also accumulates the path-average

    E[ exp( integral (u1 + i u2) dt' ) ]

by per-path trapezoid accumulation, the trajectory-side counterpart of the
complex-field amplitude ratio.

Reproducibility: paths are partitioned into fixed blocks of 4096 and every
block draws from its own counter-based stream keyed by (seed, block index).
Worker threads only decide who computes a block, never what it computes, and
reductions fold in block order, so results are byte-identical for any
thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ConfigError, MassError
from .fields import Field2D, Grid2D, trapezoid_mass
from .model import EnvConfig, omega0

__all__ = [
    "PathState",
    "EnsembleRun",
    "em_step",
    "short_time_kernel",
    "simulate_ensemble",
    "BLOCK",
]

BLOCK = 4096
DEFAULT_CUTOFF = 1e3


@dataclass
class PathState:
    """Vector state of a path ensemble at one time."""

    u1: np.ndarray
    u2: np.ndarray
    frozen: np.ndarray
    t: float

    def __post_init__(self):
        self.u1 = np.asarray(self.u1, dtype=float)
        self.u2 = np.asarray(self.u2, dtype=float)
        self.frozen = np.asarray(self.frozen, dtype=bool)
        if not (self.u1.shape == self.u2.shape == self.frozen.shape):
            raise ConfigError("path state arrays must have matching shapes")

    @classmethod
    def initial(cls, n: int, cfg: EnvConfig, t: float | None = None) -> "PathState":
        """All paths at the switch-on point (0, omega(t0))."""
        if t is None:
            t = cfg.t0
        om = omega0(t, cfg)
        return cls(
            u1=np.zeros(n),
            u2=np.full(n, float(om)),
            frozen=np.zeros(n, dtype=bool),
            t=t,
        )


def _advance(u1, u2, frozen, t, dt, cfg, noise, cutoff):
    """One explicit stochastic step on raw arrays; returns updated triple.

    Frozen paths keep their values.  noise has shape (n, 2).
    """
    om = omega0(t, cfg)
    a1 = u2 * u2 - u1 * u1 - om * om
    a2 = -2.0 * u1 * u2
    n1 = math.sqrt(2.0 * cfg.eps_r * dt) * noise[:, 0]
    n2 = math.sqrt(2.0 * cfg.eps_i * dt) * noise[:, 1]
    u1n = u1 + a1 * dt + n1
    u2n = u2 + a2 * dt + n2
    u1n = np.where(frozen, u1, u1n)
    u2n = np.where(frozen, u2, u2n)
    crossed = np.hypot(u1n, u2n) > cutoff
    return u1n, u2n, frozen | crossed


def em_step(
    state: PathState,
    cfg: EnvConfig,
    dt: float,
    rng: np.random.Generator,
    cutoff: float = DEFAULT_CUTOFF,
) -> PathState:
    """Advance the ensemble one step (noise variance 2*eps*dt per direction).

    Noise is drawn for every path, frozen or not, so the stream position
    never depends on the freeze pattern.
    """
    if dt <= 0.0:
        raise ConfigError(f"dt must be positive, got {dt}")
    noise = rng.standard_normal((len(state.u1), 2))
    u1, u2, frozen = _advance(
        state.u1, state.u2, state.frozen, state.t, dt, cfg, noise, cutoff
    )
    return PathState(u1, u2, frozen, state.t + dt)


def short_time_kernel(u1, u2, u1_prev: float, u2_prev: float, cfg: EnvConfig, t: float, dt: float):
    """One-step transition density from (u1_prev, u2_prev) over dt.

    An anisotropic Gaussian: mean displaced by the drift at the previous
    point, variance 2*eps*dt along each direction, matching em_step's update
    law exactly.
    """
    if dt <= 0.0:
        raise ConfigError(f"dt must be positive, got {dt}")
    if cfg.eps_r <= 0.0 or cfg.eps_i <= 0.0:
        raise ConfigError("transition density needs strictly positive noise intensities")
    om = omega0(t, cfg)
    m1 = u1_prev + (u2_prev * u2_prev - u1_prev * u1_prev - om * om) * dt
    m2 = u2_prev + (-2.0 * u1_prev * u2_prev) * dt
    v1 = 2.0 * cfg.eps_r * dt
    v2 = 2.0 * cfg.eps_i * dt
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    g1 = np.exp(-((u1 - m1) ** 2) / (2.0 * v1)) / math.sqrt(2.0 * math.pi * v1)
    g2 = np.exp(-((u2 - m2) ** 2) / (2.0 * v2)) / math.sqrt(2.0 * math.pi * v2)
    return g1 * g2


@dataclass
class EnsembleRun:
    """Densities and path averages recorded at the requested times."""

    cfg: EnvConfig
    grid: Grid2D
    n_paths: int
    seed: int
    dt: float
    cutoff: float
    bandwidth: float
    record_times: np.ndarray
    densities: list[Field2D]
    fk_mean: np.ndarray
    fk_stderr_re: np.ndarray
    fk_stderr_im: np.ndarray
    n_effective: np.ndarray
    blowup_count: int


def _block_rng(seed: int, block: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, block], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _run_block(
    block: int,
    n_block: int,
    cfg: EnvConfig,
    seed: int,
    dt: float,
    record_steps: list[int],
    cutoff: float,
    t_start: float,
):
    """Integrate one block of paths, returning per-record snapshots and sums."""
    rng = _block_rng(seed, block)
    om = omega0(t_start, cfg)
    u1 = np.zeros(n_block)
    u2 = np.full(n_block, float(om))
    frozen = np.zeros(n_block, dtype=bool)
    acc = np.zeros(n_block, dtype=complex)

    out = []
    next_i = 0
    if record_steps and record_steps[0] == 0:
        out.append((u1.copy(), u2.copy(), frozen.copy(), np.exp(acc)))
        next_i = 1
    n_total = record_steps[-1] if record_steps else 0
    for n in range(n_total):
        t = t_start + n * dt
        noise = rng.standard_normal((n_block, 2))
        u1n, u2n, frozen_n = _advance(u1, u2, frozen, t, dt, cfg, noise, cutoff)
        phi_half = 0.5 * dt * ((u1 + u1n) + 1j * (u2 + u2n))
        acc = np.where(frozen, acc, acc + phi_half)
        u1, u2, frozen = u1n, u2n, frozen_n
        if next_i < len(record_steps) and n + 1 == record_steps[next_i]:
            out.append((u1.copy(), u2.copy(), frozen.copy(), np.exp(acc)))
            next_i += 1
    return out


def simulate_ensemble(
    cfg: EnvConfig,
    grid: Grid2D,
    n_paths: int,
    seed: int,
    dt: float,
    record_times: tuple[float, ...],
    cutoff: float = DEFAULT_CUTOFF,
    bandwidth: float = 0.1,
    threads: int = 1,
) -> EnsembleRun:
    """Run the full ensemble and bin it onto the grid at each record time.

    The density at a record time is the histogram of surviving in-window
    paths over the grid cells, optionally smoothed with a Gaussian of the
    given bandwidth (in phase-plane units), then normalized to unit mass.
    """
    if n_paths < 1:
        raise ConfigError("need at least one path")
    if dt <= 0.0:
        raise ConfigError(f"dt must be positive, got {dt}")
    t_start = cfg.t0
    record_steps = sorted({int(math.floor((tr - t_start) / dt + 1e-9)) for tr in record_times
                          if tr >= t_start - 1e-12})
    if not record_steps:
        raise ConfigError("no record times at or after the start time")

    blocks = [(b, min(BLOCK, n_paths - b * BLOCK)) for b in range((n_paths + BLOCK - 1) // BLOCK)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_run_block, b, nb, cfg, seed, dt, record_steps, cutoff, t_start)
                for b, nb in blocks
            ]
            results = [f.result() for f in futures]
    else:
        results = [
            _run_block(b, nb, cfg, seed, dt, record_steps, cutoff, t_start)
            for b, nb in blocks
        ]

    e1 = np.concatenate([grid.u1 - 0.5 * grid.du1, [grid.u1[-1] + 0.5 * grid.du1]])
    e2 = np.concatenate([grid.u2 - 0.5 * grid.du2, [grid.u2[-1] + 0.5 * grid.du2]])

    densities: list[Field2D] = []
    fk_mean = np.empty(len(record_steps), dtype=complex)
    se_re = np.empty(len(record_steps))
    se_im = np.empty(len(record_steps))
    n_eff = np.empty(len(record_steps), dtype=int)
    times = t_start + dt * np.asarray(record_steps, dtype=float)

    for i, step in enumerate(record_steps):
        counts = np.zeros((grid.L, grid.M), dtype=np.int64)
        s = 0.0 + 0.0j
        s2_re = 0.0
        s2_im = 0.0
        cnt = 0
        for res in results:  # block order: reductions are order-fixed
            u1b, u2b, frozb, fkb = res[i]
            ok = ~frozb
            h, _, _ = np.histogram2d(u2b[ok], u1b[ok], bins=(e2, e1))
            counts += h.astype(np.int64)
            vals = fkb[ok]
            s += vals.sum()
            s2_re += float(np.sum(vals.real ** 2))
            s2_im += float(np.sum(vals.imag ** 2))
            cnt += int(ok.sum())
        if cnt == 0:
            raise MassError(f"no surviving paths at t={times[i]:.6g}")
        mean = s / cnt
        var_re = max(s2_re / cnt - mean.real ** 2, 0.0)
        var_im = max(s2_im / cnt - mean.imag ** 2, 0.0)
        fk_mean[i] = mean
        se_re[i] = math.sqrt(var_re / cnt)
        se_im[i] = math.sqrt(var_im / cnt)
        n_eff[i] = cnt

        dens = counts.astype(float)
        if bandwidth > 0.0:
            dens = ndimage.gaussian_filter(
                dens, sigma=(bandwidth / grid.du2, bandwidth / grid.du1), mode="constant"
            )
        mass = trapezoid_mass(grid, dens)
        if mass <= 0.0:
            raise MassError(f"all surviving paths fell outside the grid at t={times[i]:.6g}")
        densities.append(Field2D(grid, dens / mass, float(times[i])))

    frozen_total = 0
    for res in results:
        frozen_total += int(res[-1][2].sum())

    return EnsembleRun(
        cfg=cfg,
        grid=grid,
        n_paths=n_paths,
        seed=seed,
        dt=dt,
        cutoff=cutoff,
        bandwidth=bandwidth,
        record_times=times,
        densities=densities,
        fk_mean=fk_mean,
        fk_stderr_re=se_re,
        fk_stderr_im=se_im,
        n_effective=n_eff,
        blowup_count=frozen_total,
    )
