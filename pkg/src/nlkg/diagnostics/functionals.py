"""Energies, mollified energies, mixed space-time norms and the N-scaling sweeps.

    E(u) = 1/2 |ut|^2 + 1/2 |grad u|^2 + 1/2 |u|^2 + 1/(p+1) |u|^(p+1)_{p+1}

The gradient term is summed on the spectral side. The potential term is
integrated on the same refined grid the propagator evaluates the
nonlinearity on, so E is the Hamiltonian the Strang splitting integrates.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from src.nlkg.diagnostics.params import AdmissiblePair, IMethodParams
from src.nlkg.errors import AdmissibilityError, ConfigError, InsufficientSamplesError
from src.nlkg.evolution.propagator import evolve
from src.nlkg.evolution.state import EvolutionConfig, State, Trajectory
from src.nlkg.spectral.grid import RadialField, RadialGrid
from src.nlkg.spectral.multipliers import MultiplierSymbol, is_dyadic, symbol_on_grid
from src.nlkg.spectral.norms import lebesgue_norm, plancherel_norm, radial_integral, sobolev_norm
from src.nlkg.spectral.transform import forward_coeffs, inverse_values, resample_coeffs

logger = logging.getLogger(__name__)

FieldMap = Callable[[State], RadialField]


# ---------------------------------------------------------------------------
# Energies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyParts:
    kinetic: float
    gradient: float
    mass: float
    potential: float

    @property
    def quadratic(self) -> float:
        return self.kinetic + self.gradient + self.mass

    @property
    def total(self) -> float:
        return self.quadratic + self.potential


def potential_integral(values: np.ndarray, grid: RadialGrid, p: float, dealias_pad: int = 2) -> float:
    """integral |u|^(p+1) dx with u interpolated onto the refined grid."""
    if not np.any(values):
        return 0.0
    if dealias_pad == 1:
        return radial_integral(np.abs(values) ** (p + 1.0), grid)
    fine = grid.refined(dealias_pad)
    u_fine = inverse_values(resample_coeffs(forward_coeffs(values, grid), grid, fine), fine)
    return radial_integral(np.abs(u_fine) ** (p + 1.0), fine)


def energy_parts(st: State, p: float, dealias_pad: int = 2) -> EnergyParts:
    grid = st.grid
    uh = forward_coeffs(st.u.values, grid)
    grad = plancherel_norm(grid.rho * uh, grid)
    return EnergyParts(
        kinetic=0.5 * radial_integral(st.ut.values ** 2, grid),
        gradient=0.5 * grad * grad,
        mass=0.5 * radial_integral(st.u.values ** 2, grid),
        potential=potential_integral(st.u.values, grid, p, dealias_pad) / (p + 1.0),
    )


def energy(st: State, p: float, dealias_pad: int = 2) -> float:
    return energy_parts(st, p, dealias_pad).total


def _multiplier_weights(sigma: MultiplierSymbol, grid: RadialGrid) -> Optional[np.ndarray]:
    """Symbol values on the grid, or None when the symbol is identically 1 there."""
    weights = symbol_on_grid(sigma, grid)
    if np.all(weights == 1.0):
        return None
    return weights


def _weighted(values: np.ndarray, weights: Optional[np.ndarray], grid: RadialGrid) -> np.ndarray:
    if weights is None:
        return values
    return inverse_values(weights * forward_coeffs(values, grid), grid)


def apply_i(st: State, prm: IMethodParams) -> State:
    """(Iu, I ut); returns st itself when I is the identity on the resolved band."""
    grid = st.grid
    weights = _multiplier_weights(prm.symbol, grid)
    if weights is None:
        return st
    return State(
        RadialField(grid, _weighted(st.u.values, weights, grid)),
        RadialField(grid, _weighted(st.ut.values, weights, grid)),
        st.t,
    )


def mollified_energy(st: State, prm: IMethodParams, dealias_pad: int = 2) -> float:
    """E(Iu)."""
    return energy(apply_i(st, prm), prm.p, dealias_pad)


def hs_pair_norm(st: State, s: float) -> float:
    """||u||_{H^s} + ||ut||_{H^(s-1)}."""
    return sobolev_norm(st.u, s) + sobolev_norm(st.ut, s - 1.0)


# ---------------------------------------------------------------------------
# Space-time norms
# ---------------------------------------------------------------------------

def time_norm(values: np.ndarray, times: np.ndarray, q: float) -> float:
    if math.isinf(q):
        return float(np.max(values))
    if len(times) < 2:
        return 0.0
    return float(trapezoid(values ** q, times)) ** (1.0 / q)


def spacetime_norm(traj: Trajectory, q: float, r: float, transform: Optional[FieldMap] = None) -> float:
    """||transform(v)||_{L^q_t L^r_x} over the sampled interval.

    The time integral is the trapezoid rule on the sample instants;
    q = inf takes the maximum.
    """
    if len(traj) == 0:
        raise InsufficientSamplesError("space-time norm of an empty trajectory")
    if not (q >= 1 and r >= 1):
        raise ConfigError("q" if not q >= 1 else "r", f"exponents must be >= 1, got q={q}, r={r}")
    transform = transform or (lambda st: st.u)
    values = np.array([lebesgue_norm(transform(st), r) for st in traj.states])
    return time_norm(values, traj.times, q)


def _z_terms(traj: Trajectory, pair: AdmissiblePair, prm: IMethodParams) -> float:
    """||d/dt <D>^-m I v||_{L^q L^r} + ||<D>^(1-m) I v||_{L^q L^r}."""
    grid = traj.grid
    i_weights = symbol_on_grid(prm.symbol, grid)
    bracket = 1.0 + grid.rho
    wt = i_weights * bracket ** (-pair.m)
    wu = i_weights * bracket ** (1.0 - pair.m)

    def time_part(st: State) -> RadialField:
        return RadialField(grid, _weighted(st.ut.values, wt, grid))

    def space_part(st: State) -> RadialField:
        return RadialField(grid, _weighted(st.u.values, wu, grid))

    return spacetime_norm(traj, pair.q, pair.r, time_part) + spacetime_norm(traj, pair.q, pair.r, space_part)


def z_norm(traj: Trajectory, m: float, prm: IMethodParams, pairs: Sequence[AdmissiblePair]) -> float:
    """Z_{m,s} restricted to a finite set of pairs, all at level m."""
    if not pairs:
        raise AdmissibilityError("z_norm needs at least one admissible pair")
    for pair in pairs:
        if not pair.at_level(m):
            raise AdmissibilityError(f"pair {pair.label} has level {pair.m:g}, not m = {m:g}")
    return max(_z_terms(traj, pair, prm) for pair in pairs)


def z_total(traj: Trajectory, prm: IMethodParams, pairs: Sequence[AdmissiblePair]) -> float:
    """Z = sup over levels: each pair evaluated at its own level."""
    if not pairs:
        raise AdmissibilityError("z_total needs at least one admissible pair")
    return max(z_norm(traj, pair.m, prm, [pair]) for pair in pairs)


@dataclass(frozen=True)
class PartitionInterval:
    t_start: float
    t_end: float
    norm: float


def partition_intervals(traj: Trajectory, prm: IMethodParams, threshold: float) -> list[PartitionInterval]:
    """Greedy split of the sampled time axis into consecutive intervals J_j
    with ||Iu||_{L^(p+2)_t(J_j) L^(p+2)_x} <= threshold.

    An interval spanning a single sample step is accepted even when it alone
    exceeds the threshold.
    """
    if threshold <= 0:
        raise ConfigError("partition_threshold", f"must be positive, got {threshold}")
    if len(traj) < 2:
        raise InsufficientSamplesError("partition needs at least two samples")
    exp = prm.p + 2.0
    density = np.array([lebesgue_norm(apply_i(st, prm).u, exp) ** exp for st in traj.states])
    times = traj.times
    budget = threshold ** exp

    intervals: list[PartitionInterval] = []
    start = 0
    acc = 0.0
    for k in range(1, len(times)):
        step = 0.5 * (density[k - 1] + density[k]) * (times[k] - times[k - 1])
        if acc + step > budget and k - 1 > start:
            intervals.append(PartitionInterval(float(times[start]), float(times[k - 1]), acc ** (1.0 / exp)))
            start = k - 1
            acc = 0.0
        acc += step
    intervals.append(PartitionInterval(float(times[start]), float(times[-1]), acc ** (1.0 / exp)))
    logger.debug("Partitioned [%g, %g] into %d intervals", times[0], times[-1], len(intervals))
    return intervals


# ---------------------------------------------------------------------------
# N-scaling sweeps
# ---------------------------------------------------------------------------

# Values whose spread relative to their size is below this count as constant.
FLAT_TOL = 1e-12


def log2_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log2(ys) against log2(xs).

    Constant or identically zero series have slope 0; any other
    non-positive value makes the fit undefined (nan).
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 2:
        return math.nan
    scale = float(np.max(np.abs(ys))) if len(ys) else 0.0
    if scale == 0.0 or float(np.ptp(ys)) <= FLAT_TOL * scale:
        return 0.0
    if np.any(ys <= 0):
        return math.nan
    slope, _ = np.polyfit(np.log2(xs), np.log2(ys), 1)
    return float(slope)


def _check_n_list(N_list: Sequence[float]) -> list[float]:
    N_list = [float(N) for N in N_list]
    if len(N_list) < 2:
        raise InsufficientSamplesError(f"N sweep needs at least two values, got {N_list}")
    if any(not is_dyadic(N) for N in N_list):
        raise ConfigError("N_list", f"every N must be dyadic, got {N_list}")
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ConfigError("N_list", f"must be strictly increasing, got {N_list}")
    return N_list


@dataclass(frozen=True)
class SlopeReport:
    """A per-N measurement with its fitted log2-log2 slope."""
    N_values: tuple[float, ...]
    values: tuple[float, ...]
    slope: float
    predicted: float
    bound: float

    @property
    def within_bound(self) -> bool:
        return math.isfinite(self.slope) and self.slope <= self.bound


def initial_mollified_growth(
    data: State,
    s: float,
    p: float,
    N_list: Sequence[float],
    dealias_pad: int = 2,
) -> SlopeReport:
    """E(Iu0) for each N; the growth rate is bounded by N^(2(1-s))."""
    N_list = _check_n_list(N_list)
    values = [mollified_energy(data, IMethodParams(N, s, p), dealias_pad) for N in N_list]
    report = SlopeReport(
        N_values=tuple(N_list),
        values=tuple(values),
        slope=log2_slope(N_list, values),
        predicted=2.0 * (1.0 - s),
        bound=2.0 * (1.0 - s) + 0.1,
    )
    if not report.within_bound:
        logger.warning(
            "Initial mollified energy slope %.4g exceeds the bound %.4g (s=%g)",
            report.slope, report.bound, s,
        )
    return report


@dataclass(frozen=True)
class MollifiedDrift:
    N: float
    E_Iu0: float
    delta: float
    series: tuple[float, ...]


def mollified_energy_drift(traj: Trajectory, prm: IMethodParams) -> MollifiedDrift:
    """sup_t |E(Iu(t)) - E(Iu0)| over the sampled trajectory."""
    pad = traj.config.dealias_pad
    series = np.array([mollified_energy(st, prm, pad) for st in traj.states])
    e0 = float(series[0])
    return MollifiedDrift(prm.N, e0, float(np.max(np.abs(series - e0))), tuple(series))


@dataclass(frozen=True)
class SweepReport:
    slope: SlopeReport
    drifts: tuple[MollifiedDrift, ...]
    trajectory: Trajectory


def almost_conservation_sweep(
    data: State,
    p: float,
    s: float,
    N_list: Sequence[float],
    T: float,
    dt: float,
    sample_stride: int = 10,
    dealias_pad: int = 2,
) -> SweepReport:
    """Delta(N) = sup_t |E(Iu(t)) - E(Iu0)| for each N, with its log2 slope.

    One evolution serves every N: I acts only on the diagnostics.
    """
    N_list = _check_n_list(N_list)
    cfg = EvolutionConfig(p=p, dt=dt, T=T, sample_stride=sample_stride, dealias_pad=dealias_pad)
    traj = evolve(data, cfg)
    drifts = tuple(mollified_energy_drift(traj, IMethodParams(N, s, p)) for N in N_list)
    deltas = [d.delta for d in drifts]
    predicted = -(5.0 - p) / 2.0
    report = SlopeReport(
        N_values=tuple(N_list),
        values=tuple(deltas),
        slope=log2_slope(N_list, deltas),
        predicted=predicted,
        bound=predicted / 2.0,
    )
    logger.info(
        "Almost conservation sweep: slope %.4g (predicted %.4g) over N=%s",
        report.slope, predicted, N_list,
    )
    return SweepReport(report, drifts, traj)
