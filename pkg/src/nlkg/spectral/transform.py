"""Radial Fourier transform on a RadialGrid via the type-I discrete sine transform.

For radial u on R^3, with w = r*u,

    u_hat(rho) = (4*pi/rho) * integral_0^R sin(rho*r) w(r) dr

and on the grid r_j = j*dr, rho_k = k*pi/R the sine kernel is exactly the
DST-I kernel sin(pi*j*k/(n+1)). The quadrature is the trapezoid rule with
vanishing end values, so the forward/inverse pair is exact up to round-off.

The array-level helpers (`forward_coeffs`, `inverse_values`, `resample_coeffs`,
`w_prime`) are what the propagator uses in its inner loop; the field-level
functions wrap them for everything else.
"""
from __future__ import annotations

import numpy as np
from scipy.fft import dct, dst, idst

from src.nlkg.errors import GridError
from src.nlkg.spectral.grid import RadialField, RadialGrid, SpectralField


def forward_coeffs(values: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """Sample values u(r_j) -> coefficients u_hat(rho_k)."""
    w = grid.r * values
    return (2.0 * np.pi * grid.dr) * dst(w, type=1) / grid.rho


def inverse_w(coeffs: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """Coefficients u_hat(rho_k) -> w(r_j) = r_j * u(r_j)."""
    return idst(grid.rho * coeffs / (2.0 * np.pi * grid.dr), type=1)


def inverse_values(coeffs: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """Coefficients u_hat(rho_k) -> sample values u(r_j)."""
    return inverse_w(coeffs, grid) / grid.r


def resample_coeffs(coeffs: np.ndarray, source: RadialGrid, target: RadialGrid) -> np.ndarray:
    """Move coefficients between grids sharing R (zero-pad or truncate)."""
    if source.R != target.R:
        raise GridError(f"cannot resample between R={source.R} and R={target.R}")
    out = np.zeros(target.n)
    keep = min(source.n, target.n)
    out[:keep] = coeffs[:keep]
    return out


def sine_amplitudes(coeffs: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """a_k with w(r) = sum_k a_k sin(rho_k r)."""
    return grid.rho * coeffs / (2.0 * np.pi * grid.R)


def w_prime(coeffs: np.ndarray, grid: RadialGrid) -> tuple[float, np.ndarray]:
    """Spectral derivative of w = r*u.

    Returns (w'(0), w'(r_j)). The cosine series is summed with a DCT-I over
    the extended index range 0..n+1 whose end entries vanish; w'(0) equals
    u(0) because w(r) = r*u(r).
    """
    b = sine_amplitudes(coeffs, grid) * grid.rho
    padded = np.zeros(grid.n + 2)
    padded[1:-1] = b
    y = dct(padded, type=1) / 2.0
    return float(y[0]), y[1:-1]


def to_spectral(f: RadialField) -> SpectralField:
    return SpectralField(f.grid, forward_coeffs(f.values, f.grid))


def to_physical(F: SpectralField) -> RadialField:
    return RadialField(F.grid, inverse_values(F.coeffs, F.grid))
