"""Metric quartic of the phase-plane manifold and its root topology.

The antisymmetric part y of the induced metric solves a quartic whose
coefficients are polynomial in (u1, u2) and the frequency.  Points where
the quartic has no real root get excised; counting connected components of
what remains classifies the manifold's topology at a given time.

The quartic is solved in closed form (depressed quartic, resolvent cubic,
two quadratics) with a degeneracy cascade down through cubic, quadratic
and linear when leading coefficients vanish, all vectorized over arrays of
coefficient sets.  Closed-form roots get guarded Newton polish before
real/complex classification; entries whose residual still misses the
documented bound are re-solved through the companion matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ConfigError, DomainError
from .fields import Grid2D
from .model import EnvConfig, omega0

__all__ = [
    "MetricPoint",
    "QuarticCoeffs",
    "quartic_coeffs",
    "QuarticRoots",
    "solve_metric_quartic",
    "solve_quartic_arrays",
    "RegionMap",
    "classify_manifold",
    "region_from_mask",
    "AngleResult",
    "angles",
]

DEGEN_TOL = 1e-14     # leading-coefficient cutoff, relative to max |A_n|
IMAG_TOL = 1e-9       # |Im root| below this (relative) counts as real
RESID_REL = 1e-10     # per-root residual gate before the stable fallback


@dataclass(frozen=True)
class MetricPoint:
    """The 2x2 metric at one phase-plane point: diag(eps_r, eps_i) plus
    the antisymmetric off-diagonal y."""

    eps_r: float
    eps_i: float
    y: float

    @property
    def g12(self) -> float:
        return self.y

    @property
    def g21(self) -> float:
        return -self.y

    @property
    def det(self) -> float:
        return self.eps_r * self.eps_i + self.y * self.y


@dataclass(frozen=True)
class QuarticCoeffs:
    """Coefficients A0..A4 of the off-diagonal equation at one point."""

    a0: float
    a1: float
    a2: float
    a3: float
    a4: float

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.a2, self.a3, self.a4])


def quartic_coeffs(u1: float, u2: float, t: float, cfg: EnvConfig) -> QuarticCoeffs:
    """Evaluate the five coefficients at a point and time."""
    a = cfg.eps_r * cfg.eps_i
    om = omega0(t, cfg)
    k1 = u1 * u1 - u2 * u2 + om * om
    u11 = u1 * u1
    u22 = u2 * u2
    return QuarticCoeffs(
        a0=a * (4.0 * a * u1 - 4.0 * cfg.eps_r * u11 * u22 - cfg.eps_i * k1 * k1),
        a1=-2.0 * a * u2 * (cfg.eps_r + cfg.eps_i),
        a2=24.0 * a * u1 + 8.0 * cfg.eps_r * u11 * u22 + 2.0 * cfg.eps_i * k1 * k1,
        a3=-8.0 * u2 * (cfg.eps_r + cfg.eps_i),
        a4=32.0 * u1,
    )


@dataclass
class QuarticRoots:
    """Classified roots of one coefficient set."""

    real_roots: np.ndarray   # sorted, with multiplicity
    complex_pairs: int
    degree: int


def _cbrt(x: np.ndarray) -> np.ndarray:
    """Real cube root, sign preserved."""
    return np.sign(x) * np.abs(x) ** (1.0 / 3.0)


def _cubic_one_real(alpha: np.ndarray, beta: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """One real root of x^3 + alpha x^2 + beta x + gamma for each entry."""
    a13 = alpha / 3.0
    f = beta / 3.0 - a13 * a13
    g = a13 * (2.0 * a13 * a13 - beta) + gamma
    h = 0.25 * g * g + f * f * f

    # trig branch (three real roots, pick the one the cosine gives)
    with np.errstate(invalid="ignore", divide="ignore"):
        j = np.sqrt(np.maximum(-f, 0.0))
        j3 = j * j * j
        arg = np.where(j3 > 0.0, -0.5 * g / np.where(j3 > 0.0, j3, 1.0), 0.0)
        trig = 2.0 * j * np.cos(np.arccos(np.clip(arg, -1.0, 1.0)) / 3.0) - a13

        sqrt_h = np.sqrt(np.maximum(h, 0.0))
        cardano = _cbrt(-0.5 * g + sqrt_h) + _cbrt(-0.5 * g - sqrt_h) - a13

    triple = (f == 0.0) & (g == 0.0) & (h == 0.0)
    out = np.where(h <= 0.0, trig, cardano)
    return np.where(triple, -_cbrt(gamma), out)


def _quadratic_pair(b: np.ndarray, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Both (complex) roots of x^2 + b x + c per entry, cancellation-safe.

    The root far from zero is computed by the sign-matched formula and the
    near one from the product of roots, so a huge b does not wash out the
    small root.
    """
    b = np.asarray(b, dtype=complex)
    c = np.asarray(c, dtype=complex)
    disc = np.sqrt(0.25 * b * b - c)
    # pick the half-b sign that adds magnitudes instead of cancelling
    flip = (b.real * disc.real + b.imag * disc.imag) < 0.0
    disc = np.where(flip, -disc, disc)
    big = -0.5 * b - disc
    safe = big != 0
    small = np.where(safe, c / np.where(safe, big, 1.0), -0.5 * b + disc)
    return big, small


def _horner(x: np.ndarray, coeffs: list[np.ndarray]) -> np.ndarray:
    a0, a1, a2, a3, a4 = coeffs
    return (((a4 * x + a3) * x + a2) * x + a1) * x + a0


def _dhorner(x: np.ndarray, coeffs: list[np.ndarray]) -> np.ndarray:
    a0, a1, a2, a3, a4 = coeffs
    return ((4.0 * a4 * x + 3.0 * a3) * x + 2.0 * a2) * x + a1


def _polish(roots: np.ndarray, coeffs: list[np.ndarray], passes: int = 4) -> np.ndarray:
    """Newton steps on p(x) = sum A_n x^n, kept only when the residual drops."""
    x = roots
    for _ in range(passes):
        p = _horner(x, coeffs)
        dp = _dhorner(x, coeffs)
        safe = np.abs(dp) > 0.0
        step = np.where(safe, p / np.where(safe, dp, 1.0), 0.0)
        x_new = x - step
        better = np.abs(_horner(x_new, coeffs)) < np.abs(p)
        x = np.where(better, x_new, x)
    return x


def solve_quartic_arrays(
    a0: np.ndarray, a1: np.ndarray, a2: np.ndarray, a3: np.ndarray, a4: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vector solve of A4 y^4 + ... + A0 = 0 over matching arrays.

    Returns (roots, is_real, degree): roots is (..., 4) complex with NaN
    where a slot is unused, is_real marks polished roots whose imaginary
    part is below the relative tolerance, degree is the effective degree
    each entry was solved at.
    """
    arrs = [np.asarray(x, dtype=float) for x in (a0, a1, a2, a3, a4)]
    shape = np.broadcast_shapes(*(x.shape for x in arrs))
    a0, a1, a2, a3, a4 = [np.broadcast_to(x, shape).ravel() for x in arrs]
    n = a0.size

    scale = np.max(np.abs(np.stack([a0, a1, a2, a3, a4])), axis=0)
    if np.any(scale == 0.0):
        raise ConfigError("all-zero coefficient vector has no defined roots")
    tol = DEGEN_TOL * scale

    degree = np.zeros(n, dtype=int)
    degree[np.abs(a1) >= tol] = 1
    degree[np.abs(a2) >= tol] = 2
    degree[np.abs(a3) >= tol] = 3
    degree[np.abs(a4) >= tol] = 4

    roots = np.full((n, 4), np.nan + 0j, dtype=complex)

    m = degree == 4
    if np.any(m):
        b, c, d, e = a3[m] / a4[m], a2[m] / a4[m], a1[m] / a4[m], a0[m] / a4[m]
        qb = 0.25 * b
        qb2 = qb * qb
        p = 3.0 * qb2 - 0.5 * c
        q = b * qb2 - c * qb + 0.5 * d
        r = 3.0 * qb2 * qb2 - c * qb2 + d * qb - e
        z0 = _cubic_one_real(p, r, p * r - 0.5 * q * q)
        s = np.sqrt((2.0 * p + 2.0 * z0).astype(complex))
        t = np.where(s == 0, z0 * z0 + r, -q / np.where(s == 0, 1.0, s))
        r0, r1 = _quadratic_pair(s, z0 + t)
        r2, r3 = _quadratic_pair(-s, z0 - t)
        roots[m, 0] = r0 - qb
        roots[m, 1] = r1 - qb
        roots[m, 2] = r2 - qb
        roots[m, 3] = r3 - qb

    m = degree == 3
    if np.any(m):
        alpha, beta, gamma = a2[m] / a3[m], a1[m] / a3[m], a0[m] / a3[m]
        x0 = _cubic_one_real(alpha, beta, gamma)
        # deflate: x^3 + alpha x^2 + beta x + gamma = (x - x0)(x^2 + b x + c)
        b = alpha + x0
        c = beta + x0 * b
        r1, r2 = _quadratic_pair(b, c)
        roots[m, 0] = x0
        roots[m, 1] = r1
        roots[m, 2] = r2

    m = degree == 2
    if np.any(m):
        r1, r2 = _quadratic_pair(a1[m] / a2[m], a0[m] / a2[m])
        roots[m, 0] = r1
        roots[m, 1] = r2

    m = degree == 1
    if np.any(m):
        roots[m, 0] = -a0[m] / a1[m]

    slot = np.arange(4)[None, :]
    used = slot < degree[:, None]
    coeffs = [a0[:, None], a1[:, None], a2[:, None], a3[:, None], a4[:, None]]
    polished = _polish(np.where(used, roots, 0.0), coeffs)
    roots = np.where(used, polished, roots)

    # Badly scaled coefficient sets (tiny leading term against huge mid
    # terms) can defeat the closed form beyond what Newton recovers.  Any
    # entry whose residual misses the documented bound is re-solved through
    # the companion matrix, which is slower but unconditionally stable.
    bound = RESID_REL * scale[:, None] * np.maximum(1.0, np.abs(roots)) ** 4
    resid = np.abs(_horner(roots, coeffs))
    bad = np.any(used & ~(resid <= bound), axis=1)
    for i in np.flatnonzero(bad):
        deg = degree[i]
        poly = np.array([a4[i], a3[i], a2[i], a1[i], a0[i]])[4 - deg:]
        roots[i, :deg] = np.roots(poly)
    if np.any(bad):
        polished = _polish(np.where(used, roots, 0.0), coeffs)
        roots = np.where(used, polished, roots)

    mag = np.maximum(1.0, np.abs(roots.real))
    is_real = used & (np.abs(roots.imag) <= IMAG_TOL * mag)

    return (
        roots.reshape(shape + (4,)),
        is_real.reshape(shape + (4,)),
        degree.reshape(shape),
    )


def solve_metric_quartic(coeffs: QuarticCoeffs) -> QuarticRoots:
    """Closed-form roots of one coefficient set, classified."""
    roots, is_real, degree = solve_quartic_arrays(
        np.array([coeffs.a0]), np.array([coeffs.a1]), np.array([coeffs.a2]),
        np.array([coeffs.a3]), np.array([coeffs.a4]),
    )
    rr = np.sort(roots[0][is_real[0]].real)
    deg = int(degree[0])
    return QuarticRoots(
        real_roots=rr,
        complex_pairs=(deg - len(rr)) // 2,
        degree=deg,
    )


@dataclass
class RegionMap:
    """Excision map of the manifold at one time."""

    grid: Grid2D
    t: float
    retained: np.ndarray        # bool (L, M): quartic has a real root here
    components: int             # connected components of the retained set
    components_upper: int       # same, restricted to u2 > 0
    components_lower: int       # same, restricted to u2 < 0

    def __post_init__(self):
        if self.retained.shape != self.grid.shape:
            raise ConfigError(
                f"retained map shape {self.retained.shape} does not match grid {self.grid.shape}"
            )

    @property
    def excised_count(self) -> int:
        return int(self.retained.size - self.retained.sum())

    def connectivity_bound_ok(self, n_max: int = 4) -> bool:
        return max(self.components, self.components_upper, self.components_lower) <= n_max


_FOUR_CONN = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


def classify_manifold(grid: Grid2D, t: float, cfg: EnvConfig) -> RegionMap:
    """Solve the quartic on every node and count surviving components.

    A node is retained when at least one root is real; flood fill is
    4-neighbor.  Component counts are reported for the full plane and for
    each open half-plane u2 > 0, u2 < 0.
    """
    u1 = grid.u1[None, :]
    u2 = grid.u2[:, None]
    a = cfg.eps_r * cfg.eps_i
    om = omega0(t, cfg)
    k1 = u1 * u1 - u2 * u2 + om * om
    u11u22 = (u1 * u1) * (u2 * u2)
    a0 = a * (4.0 * a * u1 - 4.0 * cfg.eps_r * u11u22 - cfg.eps_i * k1 * k1)
    a1 = -2.0 * a * u2 * (cfg.eps_r + cfg.eps_i)
    a2 = 24.0 * a * u1 + 8.0 * cfg.eps_r * u11u22 + 2.0 * cfg.eps_i * k1 * k1
    a3 = np.broadcast_to(-8.0 * u2 * (cfg.eps_r + cfg.eps_i), grid.shape)
    a4 = np.broadcast_to(32.0 * u1, grid.shape)

    _, is_real, _ = solve_quartic_arrays(a0, a1, a2, a3, a4)
    retained = np.any(is_real, axis=-1)
    return region_from_mask(grid, t, retained)


def region_from_mask(grid: Grid2D, t: float, retained: np.ndarray) -> RegionMap:
    """Wrap a retained-node mask in a RegionMap with component counts."""
    retained = np.ascontiguousarray(retained, dtype=bool)
    if retained.shape != grid.shape:
        raise ConfigError(
            f"retained map shape {retained.shape} does not match grid {grid.shape}"
        )

    def count(mask: np.ndarray) -> int:
        if not mask.any():
            return 0
        _, num = ndimage.label(mask, structure=_FOUR_CONN)
        return int(num)

    upper = grid.u2 > 0.0
    lower = grid.u2 < 0.0
    return RegionMap(
        grid=grid,
        t=t,
        retained=retained,
        components=count(retained),
        components_upper=count(retained[upper, :]),
        components_lower=count(retained[lower, :]),
    )


@dataclass(frozen=True)
class AngleResult:
    """Deformed angles between two directions under the antisymmetric metric."""

    psi_plus: float
    psi_minus: float
    delta: float
    lambda_scale: float
    dtheta: float


def angles(dtheta: float, y: float, lambda_scale: float = 1.0) -> AngleResult:
    """The two deformed angles arccos[sqrt(1+(y/l)^2) cos(dtheta +/- delta)].

    delta is the metric deformation angle with cos(delta) = l/sqrt(l^2+y^2)
    and sin(delta) = y/sqrt(l^2+y^2).
    """
    if lambda_scale <= 0.0:
        raise ConfigError(f"lambda_scale must be positive, got {lambda_scale}")
    delta = math.atan2(y, lambda_scale)
    stretch = math.sqrt(1.0 + (y / lambda_scale) ** 2)
    out = []
    for sign, name in ((+1.0, "psi_plus"), (-1.0, "psi_minus")):
        arg = stretch * math.cos(dtheta + sign * delta)
        if abs(arg) > 1.0 + 1e-12:
            raise DomainError(
                f"{name} undefined: |sqrt(1+(y/lambda)^2) cos(dtheta {'+' if sign > 0 else '-'} delta)|"
                f" = {abs(arg):.6g} exceeds 1"
            )
        out.append(math.acos(max(-1.0, min(1.0, arg))))
    return AngleResult(
        psi_plus=out[0],
        psi_minus=out[1],
        delta=delta,
        lambda_scale=lambda_scale,
        dtheta=dtheta,
    )
