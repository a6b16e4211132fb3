"""Radial grids and the field types that live on them.

A radial function u on R^3 is sampled at r_j = j*dr, j = 1..n, dr = R/(n+1).
Its radial Fourier coefficients live at rho_k = k*pi/R, k = 1..n. Both
field types are immutable values: the sample arrays are copied on
construction and marked read-only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from src.nlkg.errors import GridError

MIN_NODES = 8


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class RadialGrid:
    """
    Uniform interior grid on (0, R) with Dirichlet ends for w = r*u.

    R:
        Domain radius.
    n:
        Number of interior nodes; a power of two >= 8 for user grids.
    strict:
        Internal refinement grids (dealiasing) relax the power-of-two rule.
    """
    R: float
    n: int
    strict: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not np.isfinite(self.R) or self.R <= 0:
            raise GridError(f"R must be positive and finite, got {self.R}")
        if int(self.n) != self.n or self.n < 1:
            raise GridError(f"n must be a positive integer, got {self.n}")
        if self.strict:
            if self.n < MIN_NODES:
                raise GridError(f"n must be >= {MIN_NODES}, got {self.n}")
            if not _is_power_of_two(int(self.n)):
                raise GridError(f"n must be a power of two, got {self.n}")

    @cached_property
    def dr(self) -> float:
        return self.R / (self.n + 1)

    @cached_property
    def r(self) -> np.ndarray:
        nodes = self.dr * np.arange(1, self.n + 1, dtype=float)
        nodes.setflags(write=False)
        return nodes

    @cached_property
    def rho(self) -> np.ndarray:
        freqs = (np.pi / self.R) * np.arange(1, self.n + 1, dtype=float)
        freqs.setflags(write=False)
        return freqs

    @property
    def drho(self) -> float:
        return np.pi / self.R

    @property
    def rho_max(self) -> float:
        return self.n * np.pi / self.R

    def refined(self, pad: int) -> "RadialGrid":
        """Grid on the same domain whose spectral nodes extend those of self.

        The first n spectral nodes coincide, so coefficients can be zero-padded
        onto the refined grid and truncated back without interpolation.
        """
        if pad < 1:
            raise GridError(f"refinement factor must be >= 1, got {pad}")
        if pad == 1:
            return self
        return RadialGrid(self.R, pad * (self.n + 1) - 1, strict=False)

    def check_same(self, other: "RadialGrid") -> None:
        if self != other:
            raise GridError(f"grid mismatch: {self} vs {other}")


def _frozen_array(values, n: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if arr.shape != (n,):
        raise GridError(f"{what} must have shape ({n},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise GridError(f"{what} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RadialField:
    """Samples u(r_j) of a radial function on a RadialGrid."""
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen_array(self.values, self.grid.n, "field values"))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "RadialField":
        return cls(grid, np.zeros(grid.n))

    @classmethod
    def from_function(cls, grid: RadialGrid, fn: Callable[[np.ndarray], np.ndarray]) -> "RadialField":
        return cls(grid, fn(grid.r))

    @property
    def w(self) -> np.ndarray:
        """r*u at the nodes, the quantity the sine transform acts on."""
        return self.grid.r * self.values

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def __add__(self, other: "RadialField") -> "RadialField":
        self.grid.check_same(other.grid)
        return RadialField(self.grid, self.values + other.values)

    def __sub__(self, other: "RadialField") -> "RadialField":
        self.grid.check_same(other.grid)
        return RadialField(self.grid, self.values - other.values)

    def __neg__(self) -> "RadialField":
        return RadialField(self.grid, -self.values)

    def __mul__(self, c: float) -> "RadialField":
        return RadialField(self.grid, c * self.values)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SpectralField:
    """
    Radial Fourier coefficients under the convention

        u_hat(rho) = (4*pi/rho) * integral_0^inf sin(rho*r) * r * u(r) dr

    sampled at rho_k, k = 1..n.
    """
    grid: RadialGrid
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _frozen_array(self.coeffs, self.grid.n, "spectral coefficients"))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "SpectralField":
        return cls(grid, np.zeros(grid.n))

    def scaled(self, weights: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, weights * self.coeffs)
