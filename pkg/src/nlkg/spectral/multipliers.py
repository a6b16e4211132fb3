"""Radial Fourier multipliers: <D> powers, the I-operator and Littlewood-Paley bumps.

Every symbol is a real function of the radial frequency rho >= 0 and acts
diagonally on SpectralField coefficients. The transition profiles are fixed
choices (see DESIGN.md):

* eta on 1 < x < 2 is the cubic Hermite interpolant of log(eta) in log2(x)
  matching value and log-log slope at both ends, so m is C^1 and monotone;
* phi(y) = 1 - S(y - 1) with S the quintic smoothstep, so phi is C^2 with
  exact support [0, 2].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from src.nlkg.errors import SymbolError
from src.nlkg.spectral.grid import RadialField, RadialGrid
from src.nlkg.spectral.transform import forward_coeffs, inverse_values

Band = Literal["<=", "=", ">", "<<", ">~"]

# P_<<M = P_<=M/128 and P_>~M = P_>M/128
LL_FACTOR = 128


def is_dyadic(x: float) -> bool:
    if x <= 0 or not math.isfinite(x):
        return False
    exponent = math.log2(x)
    return abs(exponent - round(exponent)) < 1e-12


def smoothstep(x: np.ndarray) -> np.ndarray:
    """Quintic smoothstep on [0, 1], clamped outside."""
    x = np.clip(x, 0.0, 1.0)
    return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)


def phi(y: np.ndarray) -> np.ndarray:
    """Radial bump: 1 on [0, 1], 0 on [2, inf), nonincreasing."""
    return 1.0 - smoothstep(np.asarray(y, dtype=float) - 1.0)


def eta(x: np.ndarray, s: float) -> np.ndarray:
    """Profile of the I-operator symbol: 1 for x <= 1, x^-(1-s) for x >= 2."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    decay = 1.0 - s
    high = x >= 2.0
    out[high] = x[high] ** (-decay)
    mid = (x > 1.0) & ~high
    tau = np.log2(x[mid])
    out[mid] = np.exp(-decay * math.log(2.0) * tau * tau * (2.0 - tau))
    return out


@dataclass(frozen=True)
class MultiplierSymbol:
    """A real symbol rho -> sigma(rho) with a human-readable name."""
    name: str
    rule: Callable[[np.ndarray], np.ndarray]

    def __call__(self, rho) -> np.ndarray:
        return np.asarray(self.rule(np.asarray(rho, dtype=float)), dtype=float)

    def __mul__(self, other: "MultiplierSymbol") -> "MultiplierSymbol":
        return MultiplierSymbol(f"{self.name}*{other.name}", lambda rho: self(rho) * other(rho))

    def sqrt(self) -> "MultiplierSymbol":
        """T^(1/2) for a multiplier with nonnegative symbol."""
        return MultiplierSymbol(f"sqrt({self.name})", lambda rho: np.sqrt(np.clip(self(rho), 0.0, None)))

    # -- named constructors -------------------------------------------------

    @classmethod
    def identity(cls) -> "MultiplierSymbol":
        return cls("1", lambda rho: np.ones_like(rho))

    @classmethod
    def bracket_power(cls, sigma: float) -> "MultiplierSymbol":
        """(1 + rho)^sigma, the <D>^sigma used in Sobolev norms."""
        return cls(f"<D>^{sigma:g}", lambda rho: (1.0 + rho) ** sigma)

    @classmethod
    def dispersion(cls) -> "MultiplierSymbol":
        """sqrt(1 + rho^2), the Klein-Gordon dispersion relation."""
        return cls("omega", lambda rho: np.sqrt(1.0 + rho * rho))

    @classmethod
    def dispersion_power(cls, sigma: float) -> "MultiplierSymbol":
        """(1 + rho^2)^(sigma/2), the true H^sigma weight."""
        return cls(f"omega^{sigma:g}", lambda rho: (1.0 + rho * rho) ** (0.5 * sigma))

    @classmethod
    def i_symbol(cls, N: float, s: float) -> "MultiplierSymbol":
        """m(rho) = eta(rho/N)."""
        return cls(f"m[N={N:g},s={s:g}]", lambda rho: eta(rho / N, s))

    @classmethod
    def lp_phi(cls, M: float) -> "MultiplierSymbol":
        return cls(f"phi(./{M:g})", lambda rho: phi(rho / M))

    lp_leq = lp_phi

    @classmethod
    def lp_psi(cls, M: float) -> "MultiplierSymbol":
        return cls(f"psi(./{M:g})", lambda rho: phi(rho / M) - phi(2.0 * rho / M))

    @classmethod
    def lp_gt(cls, M: float) -> "MultiplierSymbol":
        return cls(f"1-phi(./{M:g})", lambda rho: 1.0 - phi(rho / M))

    @classmethod
    def lp_ll(cls, M: float) -> "MultiplierSymbol":
        return cls.lp_leq(M / LL_FACTOR)

    @classmethod
    def lp_gtrsim(cls, M: float) -> "MultiplierSymbol":
        return cls.lp_gt(M / LL_FACTOR)

    @classmethod
    def lp_band(cls, M1: float, M2: float) -> "MultiplierSymbol":
        """P_{M1 < . <= M2} = P_<=M2 - P_<=M1."""
        if M2 <= M1:
            raise SymbolError(f"band needs M1 < M2, got ({M1}, {M2})")
        return cls(f"band({M1:g},{M2:g}]", lambda rho: phi(rho / M2) - phi(rho / M1))


def symbol_on_grid(sigma: MultiplierSymbol, grid: RadialGrid) -> np.ndarray:
    values = sigma(grid.rho)
    if values.shape != grid.rho.shape or not np.all(np.isfinite(values)):
        raise SymbolError(f"symbol {sigma.name} is not finite on the resolved band [{grid.rho[0]:.6g}, {grid.rho_max:.6g}]")
    return values


def apply_multiplier(f: RadialField, sigma: MultiplierSymbol) -> RadialField:
    grid = f.grid
    weights = symbol_on_grid(sigma, grid)
    return RadialField(grid, inverse_values(weights * forward_coeffs(f.values, grid), grid))


def band_symbol(band: Band, M: float) -> MultiplierSymbol:
    if not is_dyadic(M):
        raise SymbolError(f"Littlewood-Paley frequency must be dyadic, got {M}")
    if band == "<=":
        return MultiplierSymbol.lp_leq(M)
    if band == "=":
        return MultiplierSymbol.lp_psi(M)
    if band == ">":
        return MultiplierSymbol.lp_gt(M)
    if band == "<<":
        return MultiplierSymbol.lp_ll(M)
    if band == ">~":
        return MultiplierSymbol.lp_gtrsim(M)
    raise SymbolError(f"unknown band {band!r}")


def lp_project(f: RadialField, band: Band, M: float) -> RadialField:
    return apply_multiplier(f, band_symbol(band, M))


def dyadic_range(grid: RadialGrid) -> list[float]:
    """Dyadic M whose bumps psi(./M) together cover every resolved frequency."""
    lo = math.floor(math.log2(grid.rho[0])) - 1
    hi = math.ceil(math.log2(grid.rho_max)) + 1
    return [2.0 ** k for k in range(lo, hi + 1)]
