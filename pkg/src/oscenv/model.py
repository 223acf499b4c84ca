"""Environment model: frequency law, drift coefficients, reference oscillator.

The random environment enters through a slowly switched frequency and a pair
of white-noise intensities.  Everything downstream (the distribution solver,
the trajectory ensemble, the manifold scan) reads its parameters from
:class:`EnvConfig`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CflError, ConfigError

__all__ = [
    "EnvConfig",
    "DriftCoeffs",
    "Trajectory1D",
    "omega0",
    "drift",
    "solve_regular_oscillator",
]


@dataclass(frozen=True)
class EnvConfig:
    """Physical parameters of the oscillator-environment system.

    eps_r, eps_i   noise intensities along the two phase-plane directions
    gamma          frequency switching amplitude, omega ranges over (2, 2 + 2/gamma)
    nu             switching rate
    t0             switch-on reference time
    omega_const    test hook: when set, the frequency law is replaced by this
                   fixed value (used by the noise-free trajectory checks)
    """

    eps_r: float = 0.01
    eps_i: float = 0.01
    gamma: float = 2.0
    nu: float = 0.5
    t0: float = 0.0
    omega_const: float | None = None

    def __post_init__(self):
        if self.eps_r < 0.0 or self.eps_i < 0.0:
            raise ConfigError(
                f"noise intensities must be nonnegative, got ({self.eps_r}, {self.eps_i})"
            )
        if self.gamma <= 0.0:
            raise ConfigError(f"gamma must be positive, got {self.gamma}")
        if self.nu <= 0.0:
            raise ConfigError(f"nu must be positive, got {self.nu}")
        if self.omega_const is not None and self.omega_const <= 0.0:
            raise ConfigError(f"fixed frequency must be positive, got {self.omega_const}")

    @property
    def omega_sup(self) -> float:
        """Least upper bound of the frequency over all times."""
        if self.omega_const is not None:
            return self.omega_const
        return 2.0 + 2.0 / self.gamma


def omega0(t, cfg: EnvConfig):
    """Frequency at time t: 2 + (1/gamma) * (1 + tanh(nu * t)).

    Strictly increasing and bounded in (2, 2 + 2/gamma).  Accepts a scalar or
    an array of times; returns the matching shape.
    """
    if cfg.omega_const is not None:
        if np.isscalar(t):
            return float(cfg.omega_const)
        return np.full(np.shape(t), cfg.omega_const, dtype=float)
    if np.isscalar(t):
        return 2.0 + (1.0 + math.tanh(cfg.nu * t)) / cfg.gamma
    return 2.0 + (1.0 + np.tanh(cfg.nu * np.asarray(t, dtype=float))) / cfg.gamma


@dataclass(frozen=True)
class DriftCoeffs:
    """Coefficients of the distribution equation at one phase point.

    k0 multiplies the field itself, k1 and k2 multiply its two first
    derivatives.
    """

    k0: float
    k1: float
    k2: float


def drift(u1, u2, t, cfg: EnvConfig) -> DriftCoeffs:
    """Drift/source coefficients k0 = 4 u1, k1 = u1^2 - u2^2 + omega^2, k2 = 2 u1 u2."""
    om = omega0(t, cfg)
    return DriftCoeffs(
        k0=4.0 * u1,
        k1=u1 * u1 - u2 * u2 + om * om,
        k2=2.0 * u1 * u2,
    )


@dataclass(frozen=True)
class Trajectory1D:
    """Sampled complex solution of the noise-free oscillator."""

    times: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray

    def __post_init__(self):
        if not (len(self.times) == len(self.values) == len(self.derivatives)):
            raise ConfigError("trajectory arrays must have equal length")


def solve_regular_oscillator(
    cfg: EnvConfig,
    t_end: float,
    dt: float,
    t_start: float | None = None,
    x0: complex = 1.0 + 0.0j,
    v0: complex | None = None,
) -> Trajectory1D:
    """Integrate x'' + omega^2(t) x = 0 with the classic fourth-order scheme.

    Fixed step.  The last sample is the nearest step not exceeding t_end.
    v0 defaults to i * omega(t_start) * x0, the rotating solution matched to
    the ensemble initial state.  Rejects steps too coarse for the fastest
    oscillation (dt * sup omega > 0.5).
    """
    if t_start is None:
        t_start = cfg.t0
    if dt <= 0.0:
        raise ConfigError(f"dt must be positive, got {dt}")
    if t_end < t_start:
        raise ConfigError(f"t_end {t_end} precedes t_start {t_start}")
    if dt * cfg.omega_sup > 0.5:
        raise CflError(
            f"dt={dt} too coarse for max frequency {cfg.omega_sup}"
            f" (need dt <= {0.5 / cfg.omega_sup:.3e})",
            max_dt=0.5 / cfg.omega_sup,
        )

    n = int(math.floor((t_end - t_start) / dt + 1e-12))
    times = t_start + dt * np.arange(n + 1)
    xs = np.empty(n + 1, dtype=complex)
    vs = np.empty(n + 1, dtype=complex)
    x = complex(x0)
    v = complex(v0) if v0 is not None else 1j * omega0(t_start, cfg) * complex(x0)
    xs[0] = x
    vs[0] = v

    def acc(t, y):
        om = omega0(t, cfg)
        return -(om * om) * y

    for i in range(n):
        t = t_start + i * dt
        k1x, k1v = v, acc(t, x)
        k2x, k2v = v + 0.5 * dt * k1v, acc(t + 0.5 * dt, x + 0.5 * dt * k1x)
        k3x, k3v = v + 0.5 * dt * k2v, acc(t + 0.5 * dt, x + 0.5 * dt * k2x)
        k4x, k4v = v + dt * k3v, acc(t + dt, x + dt * k3x)
        x = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        xs[i + 1] = x
        vs[i + 1] = v
    return Trajectory1D(times=times, values=xs, derivatives=vs)
