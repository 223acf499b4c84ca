"""Phase-plane grids and field containers.

Conventions used package-wide:
  * value arrays have shape (L, M): row index k walks the u2 axis, column
    index j walks the u1 axis;
  * grids that contain the origin build their coordinates as
    (index - center) * spacing, so mirrored nodes are exact negations of
    each other (the reflection checks rely on this);
  * integrals are trapezoidal.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError, GridMismatchError

__all__ = [
    "Grid2D",
    "Field2D",
    "ComplexField",
    "default_grid",
    "trapezoid_mass",
    "reflect_u2",
]


@dataclass(frozen=True)
class Grid2D:
    """Uniform rectangular grid on the (u1, u2) phase plane."""

    u1_min: float
    u1_max: float
    u2_min: float
    u2_max: float
    M: int
    L: int
    du1: float
    du2: float

    def __post_init__(self):
        if self.M < 3 or self.L < 3:
            raise ConfigError(f"grid needs at least 3 nodes per side, got {self.M}x{self.L}")
        if self.du1 <= 0.0 or self.du2 <= 0.0:
            raise ConfigError("grid spacings must be positive")
        if self.u1_max <= self.u1_min or self.u2_max <= self.u2_min:
            raise ConfigError("grid bounds must be increasing")
        for name, lo, hi, n, d in (
            ("u1", self.u1_min, self.u1_max, self.M, self.du1),
            ("u2", self.u2_min, self.u2_max, self.L, self.du2),
        ):
            implied = (hi - lo) / (n - 1)
            if abs(implied - d) > 1e-9 * d:
                raise ConfigError(
                    f"{name} spacing {d} inconsistent with bounds/counts (implies {implied})"
                )

    @classmethod
    def centered(cls, M: int, L: int, du1: float, du2: float) -> "Grid2D":
        """Grid whose u1 = 0 and u2 = 0 lines fall exactly on nodes."""
        j0, k0 = M // 2, L // 2
        return cls(
            u1_min=-(j0 * du1),
            u1_max=(M - 1 - j0) * du1,
            u2_min=-(k0 * du2),
            u2_max=(L - 1 - k0) * du2,
            M=M,
            L=L,
            du1=du1,
            du2=du2,
        )

    def _zero_index(self, lo: float, d: float, n: int) -> int | None:
        i = int(round(-lo / d))
        if 0 <= i < n and abs(lo + i * d) <= 1e-9 * d:
            return i
        return None

    @cached_property
    def u1(self) -> np.ndarray:
        j0 = self._zero_index(self.u1_min, self.du1, self.M)
        if j0 is not None:
            return (np.arange(self.M) - j0) * self.du1
        return self.u1_min + np.arange(self.M) * self.du1

    @cached_property
    def u2(self) -> np.ndarray:
        k0 = self._zero_index(self.u2_min, self.du2, self.L)
        if k0 is not None:
            return (np.arange(self.L) - k0) * self.du2
        return self.u2_min + np.arange(self.L) * self.du2

    @property
    def u1_zero_index(self) -> int:
        j0 = self._zero_index(self.u1_min, self.du1, self.M)
        if j0 is None:
            raise ConfigError("u1 = 0 is not a grid node")
        return j0

    @property
    def u2_zero_index(self) -> int:
        k0 = self._zero_index(self.u2_min, self.du2, self.L)
        if k0 is None:
            raise ConfigError("u2 = 0 is not a grid node")
        return k0

    @property
    def shape(self) -> tuple[int, int]:
        """(L, M): the shape of value arrays living on this grid."""
        return (self.L, self.M)


def default_grid() -> Grid2D:
    """The standard 600 x 800 phase-plane window with 0.02 spacing."""
    return Grid2D.centered(M=600, L=800, du1=0.02, du2=0.02)


def _check_values(grid: Grid2D, values: np.ndarray, name: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        raise GridMismatchError(
            f"{name} shape {values.shape} does not match grid shape {grid.shape}"
        )
    return values


@dataclass
class Field2D:
    """A scalar field sampled on a Grid2D at one time."""

    grid: Grid2D
    values: np.ndarray
    t: float

    def __post_init__(self):
        self.values = _check_values(self.grid, self.values, "values")

    def copy(self) -> "Field2D":
        return Field2D(self.grid, self.values.copy(), self.t)


@dataclass
class ComplexField:
    """Two real components of a complex field on a shared grid."""

    grid: Grid2D
    qr: np.ndarray
    qi: np.ndarray
    t: float

    def __post_init__(self):
        self.qr = _check_values(self.grid, self.qr, "qr")
        self.qi = _check_values(self.grid, self.qi, "qi")

    def copy(self) -> "ComplexField":
        return ComplexField(self.grid, self.qr.copy(), self.qi.copy(), self.t)


def trapezoid_mass(grid: Grid2D, values: np.ndarray) -> float:
    """Trapezoidal integral of a sampled field over the grid rectangle."""
    values = _check_values(grid, values, "values")
    return float(np.trapezoid(np.trapezoid(values, dx=grid.du1, axis=1), dx=grid.du2))


def reflect_u2(grid: Grid2D, values: np.ndarray) -> np.ndarray:
    """The field sampled at (u1, -u2).

    Rows are re-indexed about the u2 = 0 node; a row whose mirror falls off
    the grid (at most one, for an even row count) is returned as zeros, which
    is exact for fields with a zero boundary ring.
    """
    values = _check_values(grid, values, "values")
    k0 = grid.u2_zero_index
    out = np.zeros_like(values)
    src = 2 * k0 - np.arange(grid.L)
    ok = (src >= 0) & (src < grid.L)
    out[ok] = values[src[ok]]
    return out
