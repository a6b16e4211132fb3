"""Radial spectral core: grids, the sine-transform Fourier pair, multipliers and norms."""
from src.nlkg.spectral.grid import RadialField, RadialGrid, SpectralField
from src.nlkg.spectral.multipliers import MultiplierSymbol, apply_multiplier, dyadic_range, lp_project
from src.nlkg.spectral.norms import (
    h1_norm,
    lebesgue_norm,
    radial_derivative,
    sobolev_norm,
    value_at_origin,
)
from src.nlkg.spectral.transform import to_physical, to_spectral

__all__ = [
    "MultiplierSymbol",
    "RadialField",
    "RadialGrid",
    "SpectralField",
    "apply_multiplier",
    "dyadic_range",
    "h1_norm",
    "lebesgue_norm",
    "lp_project",
    "radial_derivative",
    "sobolev_norm",
    "to_physical",
    "to_spectral",
    "value_at_origin",
]
