"""Tests for the frequency-localised kernel quadrature, envelope fits and Strichartz probes."""
import math

import numpy as np
import pytest
from scipy.integrate import quad

from src.nlkg.diagnostics.kernels import (
    KernelQuadratureConfig,
    decay_envelope_fit,
    kernel_profile,
    kernel_value,
    probe_grid,
    strichartz_probe,
    x_window,
)
from src.nlkg.diagnostics.params import AdmissiblePair, default_pair_set
from src.nlkg.errors import ConfigError, InsufficientSamplesError, SymbolError
from src.nlkg.spectral.grid import RadialField, RadialGrid

GAUSS_ONLY = KernelQuadratureConfig(filon_threshold=math.inf)


def _phi(y: float) -> float:
    if y <= 1.0:
        return 1.0
    if y >= 2.0:
        return 0.0
    x = y - 1.0
    return 1.0 - x ** 3 * (10.0 - 15.0 * x + 6.0 * x * x)


def _origin_oracle(M: float) -> float:
    def integrand(rho):
        psi = _phi(rho / M) - _phi(2.0 * rho / M)
        return 4.0 * math.pi * psi * psi * rho * rho

    value, _ = quad(integrand, 0.5 * M, 2.0 * M, points=[M], epsabs=0.0, epsrel=1e-12)
    return value


def test_origin_value_matches_quadrature_oracle():
    value = kernel_value(8.0, 0.0, 0.0)
    assert value.imag == 0.0
    assert value.real == pytest.approx(_origin_oracle(8.0), rel=1e-6)


def test_origin_value_scales_as_frequency_cubed():
    ratio = kernel_value(8.0, 0.0, 0.0).real / kernel_value(16.0, 0.0, 0.0).real
    assert ratio == pytest.approx(1.0 / 8.0, rel=1e-10)


@pytest.mark.parametrize("t, x", [(3.0, 2.9), (4.0, 0.05), (3.5, 0.0)])
def test_weighted_rule_agrees_with_gauss_panels(t, x):
    scale = abs(kernel_value(8.0, 0.0, 0.0))
    filon = kernel_value(8.0, t, x)
    gauss = kernel_value(8.0, t, x, cfg=GAUSS_ONLY)
    assert abs(filon - gauss) <= 1e-8 * scale


def test_kernel_is_even_in_x():
    assert kernel_value(8.0, 0.5, -0.3) == kernel_value(8.0, 0.5, 0.3)


@pytest.mark.parametrize("t, x", [(0.5, 0.3), (1.2, 0.0), (3.5, 0.0), (4.0, 0.05), (3.0, 2.9)])
def test_kernel_is_conjugate_symmetric_in_time(t, x):
    scale = abs(kernel_value(8.0, 0.0, 0.0))
    forward = kernel_value(8.0, t, x)
    backward = kernel_value(8.0, -t, x)
    assert abs(backward - forward.conjugate()) <= 1e-10 * scale


def test_profile_matches_pointwise_values():
    xs = np.array([0.0, 0.1, 0.4])
    profile = kernel_profile(8.0, 0.5, xs)
    pointwise = [kernel_value(8.0, 0.5, x) for x in xs]
    np.testing.assert_allclose(profile, pointwise, rtol=1e-10, atol=1e-10 * abs(pointwise[0]))
    assert kernel_profile(8.0, 0.5, []).shape == (0,)


def test_low_frequency_kernel_at_origin():
    low = kernel_value(8.0, 0.0, 0.0, low=True)
    assert low.real > kernel_value(8.0, 0.0, 0.0).real
    assert low.imag == 0.0


def test_non_dyadic_frequency_rejected():
    with pytest.raises(SymbolError):
        kernel_value(3.0, 0.0, 0.0)


# ---------------------------------------------------------------------------
# Decay envelope
# ---------------------------------------------------------------------------

def test_envelope_decays_like_inverse_time():
    probe = decay_envelope_fit(8.0, n_t=8)
    assert probe.within_bound
    assert -1.2 <= probe.exponent <= -0.8


@pytest.mark.parametrize("M", [8.0, 16.0])
def test_envelope_is_flat_before_one_over_M(M):
    peak = kernel_value(M, 0.0, 0.0).real
    for t in (0.1 / M, 0.5 / M, 1.0 / M):
        sup = float(np.max(np.abs(kernel_profile(M, t, x_window(M, t)))))
        assert 0.5 * peak <= sup <= peak * (1.0 + 1e-9)


def test_envelope_window_must_stay_inside_range():
    with pytest.raises(ConfigError):
        decay_envelope_fit(8.0, t_range=(0.1, 4.0))
    with pytest.raises(InsufficientSamplesError):
        decay_envelope_fit(8.0, n_t=2)


@pytest.mark.slow
@pytest.mark.parametrize("M", [16.0, 32.0])
def test_envelope_at_higher_frequencies(M):
    assert decay_envelope_fit(M, n_t=12).within_bound


# ---------------------------------------------------------------------------
# Strichartz probe
# ---------------------------------------------------------------------------

def test_probe_grid_resolves_the_band():
    grid = probe_grid(16.0, 16.0)
    assert grid.R == 26.0
    assert grid.rho_max >= 64.0


def test_strichartz_ratio_is_positive():
    probe = strichartz_probe(4.0, AdmissiblePair.of(4.0, 4.0), T=1.0)
    assert probe.ratio > 0.0
    assert math.isfinite(probe.ratio)


def test_strichartz_ratio_of_zero_data():
    grid = RadialGrid(20.0, 256)
    probe = strichartz_probe(4.0, AdmissiblePair.of(math.inf, 2.0), RadialField.zeros(grid), T=1.0)
    assert probe.ratio == 0.0


def test_energy_pair_ratio_is_conserved_norm():
    # (inf, 2) at level 0: the free flow is unitary on L^2
    probe = strichartz_probe(4.0, AdmissiblePair.of(math.inf, 2.0), T=1.0)
    assert probe.ratio == pytest.approx(1.0, rel=1e-8)


@pytest.mark.slow
@pytest.mark.parametrize("pair", default_pair_set(0.95), ids=lambda pair: pair.label)
def test_strichartz_ratio_is_flat_in_frequency(pair):
    Ms = [8.0, 16.0, 32.0]
    ratios = [strichartz_probe(M, pair, T=8.0).ratio for M in Ms]
    slope, _ = np.polyfit(np.log2(Ms), np.log2(ratios), 1)
    assert -0.2 <= slope <= 0.2
