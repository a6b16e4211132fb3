"""Frequency-localised Klein-Gordon kernels, their decay envelopes and
empirical Strichartz ratios.

    K_M(t, x) = integral |psi(xi/M)|^2 exp(i t <xi>) exp(i xi.x) d xi
              = 4 pi integral |psi(rho/M)|^2 rho^2 sinc(rho |x|) exp(i t omega) d rho

with omega = sqrt(1 + rho^2) and sinc(z) = sin(z)/z. The integrand vanishes
outside [M/2, 2M] and is a polynomial in rho on [M/2, M] and [M, 2M]
between the oscillatory factors, so both pieces are integrated separately.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad

from src.nlkg.diagnostics.functionals import time_norm
from src.nlkg.diagnostics.params import AdmissiblePair
from src.nlkg.errors import ConfigError, InsufficientSamplesError, QuadratureError, SymbolError
from src.nlkg.evolution.propagator import dispersion
from src.nlkg.spectral.grid import RadialField, RadialGrid
from src.nlkg.spectral.multipliers import band_symbol, is_dyadic, phi, symbol_on_grid
from src.nlkg.spectral.norms import lebesgue_norm, plancherel_norm
from src.nlkg.spectral.transform import forward_coeffs, inverse_values

logger = logging.getLogger(__name__)

ENVELOPE_BOUNDS = (-1.2, -0.8)
# x-window margin and spacing, in units of 1/M
WINDOW_MARGIN = 4.0
WINDOW_SPACING = 0.125
PROFILE_CHUNK = 64


@dataclass(frozen=True)
class KernelQuadratureConfig:
    """
    Settings for the radial kernel quadrature.

    gauss_order:
        Gauss-Legendre nodes per panel.
    panel_fraction:
        Panel width is at most panel_fraction * pi / (|t| + |x|), a fraction
        of the shortest oscillation period of the integrand.
    filon_threshold:
        Above rho_max * (|t| + |x|) the oscillatory factors are handed to
        QUADPACK's weighted (QAWO) rule instead of Gauss panels.
    max_panels:
        Panel budget per smooth piece.
    quad_limit:
        Subdivision limit of each weighted quad call.
    epsrel:
        Relative tolerance, scaled by M^3 for the absolute tolerance.
    """
    gauss_order: int = 16
    panel_fraction: float = 0.1
    filon_threshold: float = 50.0
    max_panels: int = 200_000
    quad_limit: int = 200
    epsrel: float = 1e-10


DEFAULT_QUADRATURE = KernelQuadratureConfig()


def _bump(M: float, low: bool) -> Callable[[np.ndarray], np.ndarray]:
    if low:
        return lambda rho: phi(rho / M) ** 2
    return lambda rho: (phi(rho / M) - phi(2.0 * rho / M)) ** 2


def _pieces(M: float, low: bool) -> list[tuple[float, float]]:
    if low:
        return [(0.0, M), (M, 2.0 * M)]
    return [(0.5 * M, M), (M, 2.0 * M)]


def _check_frequency(M: float) -> None:
    if not is_dyadic(M):
        raise SymbolError(f"kernel frequency must be dyadic, got {M}")


def _gauss_rule(pieces, width: float, cfg: KernelQuadratureConfig) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(cfg.gauss_order)
    nodes, weights = [], []
    for a, b in pieces:
        n_panels = max(1, math.ceil((b - a) / width)) if math.isfinite(width) else 1
        if n_panels > cfg.max_panels:
            raise QuadratureError(f"{n_panels} panels needed on [{a:g}, {b:g}], budget {cfg.max_panels}")
        edges = np.linspace(a, b, n_panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes.append((mid[:, None] + half[:, None] * x[None, :]).ravel())
        weights.append((half[:, None] * w[None, :]).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def _panel_width(t: float, x: float, cfg: KernelQuadratureConfig) -> float:
    reach = abs(t) + abs(x)
    return cfg.panel_fraction * math.pi / reach if reach > 0 else math.inf


def _gauss_kernel(M: float, t: float, xs: np.ndarray, low: bool, cfg: KernelQuadratureConfig) -> np.ndarray:
    width = _panel_width(t, float(np.max(xs)) if len(xs) else 0.0, cfg)
    rho, w = _gauss_rule(_pieces(M, low), width, cfg)
    amplitude = 4.0 * np.pi * w * _bump(M, low)(rho) * rho * rho * np.exp(1j * t * np.sqrt(1.0 + rho * rho))
    out = np.empty(len(xs), dtype=complex)
    for start in range(0, len(xs), PROFILE_CHUNK):
        chunk = xs[start:start + PROFILE_CHUNK]
        out[start:start + PROFILE_CHUNK] = np.sinc(np.outer(chunk, rho) / np.pi) @ amplitude
    return out


def _weighted_quad(f, a: float, b: float, freq: float, kind: str, cfg: KernelQuadratureConfig, epsabs: float) -> float:
    """integral_a^b f(rho) cos(freq rho) or sin(freq rho) d rho via QAWO."""
    sign = 1.0
    if freq < 0:
        freq = -freq
        sign = -1.0 if kind == "sin" else 1.0
    if freq == 0:
        if kind == "sin":
            return 0.0
        out = quad(f, a, b, limit=cfg.quad_limit, epsabs=epsabs, epsrel=cfg.epsrel, full_output=1)
    else:
        out = quad(f, a, b, weight=kind, wvar=freq, limit=cfg.quad_limit,
                   epsabs=epsabs, epsrel=cfg.epsrel, full_output=1)
    if len(out) > 3:
        raise QuadratureError(f"weighted quadrature on [{a:g}, {b:g}] at frequency {freq:g}: {out[3]}")
    return sign * out[0]


def _filon_kernel(M: float, t: float, x: float, cfg: KernelQuadratureConfig) -> complex:
    """Split exp(i t omega) = exp(i t rho) g(rho), g = exp(i t / (omega + rho)) slowly varying,
    and leave the fast phases rho*(x +- t) to the weighted rule."""
    bump = _bump(M, low=False)
    epsabs = cfg.epsrel * M ** 3

    def g(rho):
        phase = t / (np.sqrt(1.0 + rho * rho) + rho)
        return np.cos(phase), np.sin(phase)

    real = imag = 0.0
    for a, b in _pieces(M, low=False):
        if x * 2.0 * M <= 1.0:
            # sinc(rho x) is slowly varying: only exp(i t rho) oscillates
            def h(rho):
                return 4.0 * np.pi * bump(rho) * rho * rho * np.sinc(rho * x / np.pi)

            real += _weighted_quad(lambda r: h(r) * g(r)[0], a, b, t, "cos", cfg, epsabs)
            real -= _weighted_quad(lambda r: h(r) * g(r)[1], a, b, t, "sin", cfg, epsabs)
            imag += _weighted_quad(lambda r: h(r) * g(r)[1], a, b, t, "cos", cfg, epsabs)
            imag += _weighted_quad(lambda r: h(r) * g(r)[0], a, b, t, "sin", cfg, epsabs)
        else:
            # sin(rho x) exp(i rho t) = [sin(rho(x+t)) + sin(rho(x-t))]/2 + i[cos(rho(x-t)) - cos(rho(x+t))]/2
            def h(rho):
                return 2.0 * np.pi / x * bump(rho) * rho

            gc = lambda r: h(r) * g(r)[0]
            gs = lambda r: h(r) * g(r)[1]
            plus, minus = x + t, x - t
            real += _weighted_quad(gc, a, b, plus, "sin", cfg, epsabs) + _weighted_quad(gc, a, b, minus, "sin", cfg, epsabs)
            real -= _weighted_quad(gs, a, b, minus, "cos", cfg, epsabs) - _weighted_quad(gs, a, b, plus, "cos", cfg, epsabs)
            imag += _weighted_quad(gs, a, b, plus, "sin", cfg, epsabs) + _weighted_quad(gs, a, b, minus, "sin", cfg, epsabs)
            imag += _weighted_quad(gc, a, b, minus, "cos", cfg, epsabs) - _weighted_quad(gc, a, b, plus, "cos", cfg, epsabs)
    return complex(real, imag)


def _use_filon(M: float, t: float, x: float, low: bool, cfg: KernelQuadratureConfig) -> bool:
    return not low and 2.0 * M * (abs(t) + abs(x)) > cfg.filon_threshold


def kernel_value(M: float, t: float, x: float, low: bool = False,
                 cfg: KernelQuadratureConfig = DEFAULT_QUADRATURE) -> complex:
    """K_M(t, x); with low=True the low-frequency kernel built from |phi(rho/M)|^2."""
    _check_frequency(M)
    x = abs(x)
    if _use_filon(M, t, x, low, cfg):
        return _filon_kernel(M, t, x, cfg)
    return complex(_gauss_kernel(M, t, np.array([x]), low, cfg)[0])


def kernel_profile(M: float, t: float, xs, low: bool = False,
                   cfg: KernelQuadratureConfig = DEFAULT_QUADRATURE) -> np.ndarray:
    """K_M(t, x) for every x in xs."""
    _check_frequency(M)
    xs = np.abs(np.asarray(xs, dtype=float))
    if len(xs) == 0:
        return np.zeros(0, dtype=complex)
    if _use_filon(M, t, float(np.max(xs)), low, cfg):
        return np.array([_filon_kernel(M, t, float(x), cfg) for x in xs])
    return _gauss_kernel(M, t, xs, low, cfg)


# ---------------------------------------------------------------------------
# Decay envelope
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelProbe:
    """sup_x |K_M(t, .)| on a t-grid with its fitted power law amplitude * t^exponent."""
    M: float
    t_samples: np.ndarray
    x_samples: tuple[np.ndarray, ...] = field(repr=False)
    values: tuple[np.ndarray, ...] = field(repr=False)
    sup_values: np.ndarray
    amplitude: float
    exponent: float

    @property
    def within_bound(self) -> bool:
        lo, hi = ENVELOPE_BOUNDS
        return lo <= self.exponent <= hi


def x_window(M: float, t: float) -> np.ndarray:
    """x-grid around the light cone: group velocities of the band lie in [v_min, 1)."""
    v_min = 0.5 * M / math.sqrt(1.0 + 0.25 * M * M)
    lo = max(0.0, v_min * abs(t) - WINDOW_MARGIN / M)
    hi = abs(t) + WINDOW_MARGIN / M
    dx = WINDOW_SPACING / M
    return np.arange(lo, hi + 0.5 * dx, dx)


def decay_envelope_fit(M: float, t_range: Optional[tuple[float, float]] = None, n_t: int = 12,
                       cfg: KernelQuadratureConfig = DEFAULT_QUADRATURE) -> KernelProbe:
    """Log-log fit of sup_x |K_M(t, .)| against t on t_range within [2/M, M/2]."""
    _check_frequency(M)
    lo_allowed, hi_allowed = 2.0 / M, 0.5 * M
    t0, t1 = t_range if t_range is not None else (lo_allowed, hi_allowed)
    if n_t < 3 or not t0 < t1:
        raise InsufficientSamplesError(f"envelope fit needs >= 3 distinct times, got n_t={n_t} on [{t0}, {t1}]")
    slack = 1e-12 * hi_allowed
    if t0 < lo_allowed - slack or t1 > hi_allowed + slack:
        raise ConfigError("t_range", f"must lie in [2/M, M/2] = [{lo_allowed:g}, {hi_allowed:g}], got [{t0:g}, {t1:g}]")

    ts = np.geomspace(t0, t1, n_t)
    xs_all, values_all, sups = [], [], []
    for t in ts:
        xs = x_window(M, t)
        values = kernel_profile(M, t, xs, cfg=cfg)
        xs_all.append(xs)
        values_all.append(values)
        sups.append(float(np.max(np.abs(values))))
    sups = np.array(sups)
    slope, intercept = np.polyfit(np.log(ts), np.log(sups), 1)
    probe = KernelProbe(
        M=M,
        t_samples=ts,
        x_samples=tuple(xs_all),
        values=tuple(values_all),
        sup_values=sups,
        amplitude=float(np.exp(intercept)),
        exponent=float(slope),
    )
    if not probe.within_bound:
        logger.warning("Envelope exponent %.4g for M=%g lies outside %s", probe.exponent, M, ENVELOPE_BOUNDS)
    return probe


# ---------------------------------------------------------------------------
# Strichartz probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StrichartzProbe:
    M: float
    pair: AdmissiblePair
    T: float
    norm: float
    denominator: float

    @property
    def ratio(self) -> float:
        return 0.0 if self.denominator == 0.0 else self.norm / self.denominator


def probe_grid(M: float, T: float) -> RadialGrid:
    """Grid holding the packet until time T and resolving frequencies up to 4M."""
    R = T + 10.0
    n = 64
    while n * math.pi / R < 4.0 * M:
        n *= 2
    return RadialGrid(R, n)


def strichartz_probe(M: float, pair: AdmissiblePair, data: Optional[RadialField] = None,
                     T: Optional[float] = None, steps_per_unit: Optional[int] = None) -> StrichartzProbe:
    """||exp(i t <D>) P_M f||_{L^q_t([0,T]) L^r_x} / (M^m ||P_M f||_{L^2}).

    Without data, f has a flat spectrum, so P_M f has coefficients psi(rho/M).
    """
    _check_frequency(M)
    T = float(M) if T is None else float(T)
    if data is None:
        grid = probe_grid(M, T)
        coeffs = symbol_on_grid(band_symbol("=", M), grid)
    else:
        grid = data.grid
        coeffs = symbol_on_grid(band_symbol("=", M), grid) * forward_coeffs(data.values, grid)

    l2 = plancherel_norm(coeffs, grid)
    denominator = M ** pair.m * l2
    if l2 == 0.0:
        return StrichartzProbe(M, pair, T, 0.0, 0.0)

    steps_per_unit = steps_per_unit or int(8 * M)
    n_t = max(2, math.ceil(steps_per_unit * T))
    times = np.linspace(0.0, T, n_t + 1)
    omega = dispersion(grid)
    norms = np.empty(len(times))
    for k, t in enumerate(times):
        # exp(i t <D>) f = cos(t <D>) f + i sin(t <D>) f, both real
        c = inverse_values(np.cos(t * omega) * coeffs, grid)
        s = inverse_values(np.sin(t * omega) * coeffs, grid)
        norms[k] = lebesgue_norm(RadialField(grid, np.hypot(c, s)), pair.r)
    probe = StrichartzProbe(M, pair, T, time_norm(norms, times, pair.q), denominator)
    logger.debug("Strichartz probe M=%g pair=%s: ratio %.6g", M, pair.label, probe.ratio)
    return probe
