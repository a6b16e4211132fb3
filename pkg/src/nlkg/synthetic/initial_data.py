"""Seeded initial data for NLKG runs.

Three kinds, selected by RunConfig.data.kind:
- gaussian: A exp(-r^2 / width^2), ut = 0
- band_limited: the Gaussian with its spectrum smoothly cut off below rho = cutoff
- rough_spectral: u_hat(rho_k) = (1 + rho_k)^(-slope) g_k with g_k from a seeded
  normal stream, localised by a Gaussian envelope and scaled to ||u0||_{L^2} = A
"""
from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from src.nlkg.errors import ConfigError
from src.nlkg.evolution.state import State
from src.nlkg.spectral.grid import RadialField, RadialGrid
from src.nlkg.spectral.multipliers import phi
from src.nlkg.spectral.norms import plancherel_norm, radial_integral
from src.nlkg.spectral.transform import forward_coeffs, inverse_values

logger = logging.getLogger(__name__)

DATA_KINDS = ("gaussian", "band_limited", "rough_spectral")


def _check_width(name: str, width: float) -> None:
    if not width > 0:
        raise ConfigError(name, f"must be positive, got {width}")


def gaussian(grid: RadialGrid, A: float, width: float = 1.0) -> State:
    _check_width("width", width)
    u = A * np.exp(-(grid.r / width) ** 2)
    return State(RadialField(grid, u), RadialField.zeros(grid))


def band_limited(grid: RadialGrid, A: float, width: float = 1.0, cutoff: float = 4.0) -> State:
    """Gaussian profile tapered by phi(2 rho / cutoff): spectrum exactly zero for rho >= cutoff."""
    _check_width("width", width)
    if not cutoff > 0:
        raise ConfigError("cutoff", f"must be positive, got {cutoff}")
    coeffs = forward_coeffs(A * np.exp(-(grid.r / width) ** 2), grid)
    coeffs *= phi(2.0 * grid.rho / cutoff)
    coeffs[grid.rho >= cutoff] = 0.0
    return State(RadialField(grid, inverse_values(coeffs, grid)), RadialField.zeros(grid))


def _rough_component(grid: RadialGrid, rng: np.random.Generator, slope: float, envelope: np.ndarray, A: float) -> np.ndarray:
    coeffs = (1.0 + grid.rho) ** (-slope) * rng.standard_normal(grid.n)
    u = inverse_values(coeffs, grid) * envelope
    mass = np.sqrt(radial_integral(u * u, grid))
    if mass == 0.0:
        return u
    return (A / mass) * u


def rough_spectral(
    grid: RadialGrid,
    A: float,
    s: float,
    seed: int,
    slope: Optional[float] = None,
    envelope_width: Optional[float] = None,
    velocity_slope: Optional[float] = None,
) -> State:
    """H^s-type data whose spectrum decays like (1 + rho)^-(s + 3/2).

    The same seed always yields the same field. With velocity_slope set, ut is
    drawn from the continuation of the same stream with that spectral slope
    and scaled to ||ut||_{L^2} = A; otherwise ut = 0.
    """
    slope = s + 1.5 if slope is None else slope
    envelope_width = grid.R / 6.0 if envelope_width is None else envelope_width
    _check_width("envelope_width", envelope_width)
    rng = np.random.default_rng(seed)
    envelope = np.exp(-(grid.r / envelope_width) ** 2)
    u = _rough_component(grid, rng, slope, envelope, A)
    if velocity_slope is None:
        ut = np.zeros(grid.n)
    else:
        ut = _rough_component(grid, rng, velocity_slope, envelope, A)
    logger.debug(
        "rough_spectral: seed=%d slope=%g envelope=%g, spectral L2 %.6g",
        seed, slope, envelope_width, plancherel_norm(forward_coeffs(u, grid), grid),
    )
    return State(RadialField(grid, u), RadialField(grid, ut))


def make_initial_data(grid: RadialGrid, kind: str, amplitude: float, seed: int = 0, s: float = 0.95,
                      width: float = 1.0, cutoff: float = 4.0, spectral_slope: Optional[float] = None,
                      envelope_width: Optional[float] = None) -> State:
    if kind == "gaussian":
        return gaussian(grid, amplitude, width)
    if kind == "band_limited":
        return band_limited(grid, amplitude, width, cutoff)
    if kind == "rough_spectral":
        return rough_spectral(grid, amplitude, s, seed, spectral_slope, envelope_width)
    raise ConfigError("data.kind", f"must be one of {DATA_KINDS}, got {kind!r}")
