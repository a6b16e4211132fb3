"""Radial Lebesgue and Sobolev norms, the radial derivative and the origin value."""
from __future__ import annotations

import math
from typing import Literal

import numpy as np
from scipy.special import spherical_jn

from src.nlkg.errors import ConfigError
from src.nlkg.spectral.grid import RadialField, RadialGrid
from src.nlkg.spectral.multipliers import MultiplierSymbol, symbol_on_grid
from src.nlkg.spectral.transform import forward_coeffs, inverse_w, sine_amplitudes, w_prime

# Nodes closest to r = 0 where the (w'r - w)/r^2 quotient loses digits;
# there the derivative is summed directly from the spherical Bessel series.
_DIRECT_NODES = 4


def radial_integral(integrand: np.ndarray, grid: RadialGrid) -> float:
    """4*pi * integral_0^R integrand(r) r^2 dr by the trapezoid rule.

    The end values vanish (r = 0 and the Dirichlet end r = R), so the rule
    reduces to a plain sum over the interior nodes.
    """
    return float(4.0 * np.pi * grid.dr * np.sum(grid.r * grid.r * integrand))


def lebesgue_norm(f: RadialField, r_exp: float) -> float:
    if r_exp == math.inf:
        return float(np.max(np.abs(f.values))) if f.grid.n else 0.0
    if not r_exp >= 1:
        raise ConfigError("r", f"Lebesgue exponent must be >= 1, got {r_exp}")
    total = radial_integral(np.abs(f.values) ** r_exp, f.grid)
    return total ** (1.0 / r_exp)


def plancherel_norm(coeffs: np.ndarray, grid: RadialGrid) -> float:
    """L^2(R^3) norm of the field with the given coefficients.

    (2*pi)^-3 * integral |u_hat|^2 4*pi*rho^2 d rho with d rho = pi/R; on the
    DST-I grid this equals the trapezoid L^2 norm exactly.
    """
    weighted = grid.rho * coeffs
    return math.sqrt(float(np.dot(weighted, weighted)) / (2.0 * np.pi * grid.R))


def weighted_norm(f: RadialField, sigma: MultiplierSymbol) -> float:
    """|| sigma(D) f ||_{L^2} computed on the spectral side."""
    weights = symbol_on_grid(sigma, f.grid)
    return plancherel_norm(weights * forward_coeffs(f.values, f.grid), f.grid)


def sobolev_norm(f: RadialField, sigma: float) -> float:
    """||f||_{H^sigma} = || (1 + |xi|)^sigma f_hat ||, the bracket convention."""
    return weighted_norm(f, MultiplierSymbol.bracket_power(sigma))


def h1_norm(f: RadialField) -> float:
    """True H^1 norm (integral of |grad f|^2 + |f|^2), weight sqrt(1 + rho^2)."""
    return weighted_norm(f, MultiplierSymbol.dispersion_power(1.0))


def radial_derivative_from_coeffs(coeffs: np.ndarray, grid: RadialGrid) -> np.ndarray:
    r = grid.r
    w = inverse_w(coeffs, grid)
    _, wp = w_prime(coeffs, grid)
    du = (wp * r - w) / (r * r)
    # u = sum_k a_k rho_k j0(rho_k r)  =>  u_r = -sum_k a_k rho_k^2 j1(rho_k r)
    k = min(_DIRECT_NODES, grid.n)
    a = sine_amplitudes(coeffs, grid)
    rho = grid.rho
    args = np.outer(r[:k], rho)
    du[:k] = -(spherical_jn(1, args) @ (a * rho * rho))
    return du


def radial_derivative(f: RadialField) -> RadialField:
    return RadialField(f.grid, radial_derivative_from_coeffs(forward_coeffs(f.values, f.grid), f.grid))


def value_at_origin(f: RadialField, method: Literal["extrapolate", "spectral"] = "extrapolate") -> float:
    """u(0) = lim w(r)/r.

    "extrapolate" fits a quadratic through the three smallest nodes;
    "spectral" sums the cosine series of w' at r = 0.
    """
    if method == "spectral":
        origin, _ = w_prime(forward_coeffs(f.values, f.grid), f.grid)
        return origin
    u1, u2, u3 = f.values[:3]
    return float(3.0 * u1 - 3.0 * u2 + u3)
