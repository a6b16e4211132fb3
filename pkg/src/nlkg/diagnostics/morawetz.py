"""Morawetz-Strauss budget for v = Iu, the commutator F(Iu) - IF(u), and the
radial Sobolev ratio.

v solves v_tt - Lap v + v + F(v) = C with C = F(Iu) - IF(u). Pairing the
equation with v_r + v/r over [t0, t1] x R^3 gives, for radial v,

    (p-1)/(p+1) W + 2*pi int v(t,0)^2 dt = R1 + R2 - flux(t1) + flux(t0)

    W      = int int |v|^(p+1) / |x|
    R1     = int int v_r * C
    R2     = int int v / |x| * C
    flux   = int v_t * (v_r + v/r) dx

With w = r*v every 1/|x| is absorbed by the measure 4*pi*r^2 dr:

    W    = 4*pi int int r |v|^(p+1) dr dt
    R1   = 4*pi int int (r w_r - w) C dr dt
    R2   = 4*pi int int w C dr dt
    flux = 4*pi int w_r w_t dr

The boundary members of the budget are boundary_X = -flux(X).

The space integrals are taken on the refined grid the nonlinearity is
evaluated on. Their integrands vanish at r = 0 but, except for R1, not
their slope, so each trapezoid sum carries the h^2/12 * f'(0) endpoint
term of the Euler-Maclaurin expansion.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.nlkg.diagnostics.params import IMethodParams
from src.nlkg.errors import (
    InconsistentBudgetError,
    InsufficientSamplesError,
    NumericalFailure,
    ZeroFieldError,
)
from src.nlkg.evolution.propagator import nonlinearity_coeffs
from src.nlkg.evolution.state import State, Trajectory
from src.nlkg.spectral.grid import RadialField, RadialGrid
from src.nlkg.spectral.multipliers import symbol_on_grid
from src.nlkg.spectral.norms import h1_norm, plancherel_norm, radial_derivative_from_coeffs, radial_integral
from src.nlkg.spectral.transform import forward_coeffs, inverse_values, inverse_w, resample_coeffs, w_prime

logger = logging.getLogger(__name__)

# Relative angular deficit above which a budget logs a warning.
ANGULAR_RTOL = 1e-6


def _i_weights(prm: IMethodParams, grid: RadialGrid) -> Optional[np.ndarray]:
    weights = symbol_on_grid(prm.symbol, grid)
    return None if np.all(weights == 1.0) else weights


def _commutator_coeffs(uh: np.ndarray, weights: Optional[np.ndarray], grid: RadialGrid, p: float, pad: int) -> np.ndarray:
    if weights is None or not np.any(uh):
        return np.zeros(grid.n)
    f_iu = nonlinearity_coeffs(weights * uh, grid, p, pad)
    f_u = nonlinearity_coeffs(uh, grid, p, pad)
    return f_iu - weights * f_u


def commutator(st: State, prm: IMethodParams, dealias_pad: int = 2) -> RadialField:
    """F(Iu) - IF(u), both nonlinearities evaluated on the refined grid."""
    grid = st.grid
    coeffs = _commutator_coeffs(forward_coeffs(st.u.values, grid), _i_weights(prm, grid), grid, prm.p, dealias_pad)
    return RadialField(grid, inverse_values(coeffs, grid))


def _gradient_energies(coeffs: np.ndarray, grid: RadialGrid) -> tuple[float, float]:
    """(int |grad f|^2 by Plancherel, int |f_r|^2 summed on the grid)."""
    grad = plancherel_norm(grid.rho * coeffs, grid)
    du = radial_derivative_from_coeffs(coeffs, grid)
    return grad * grad, radial_integral(du * du, grid)


def angular_deficit(f: RadialField) -> float:
    """int (|grad f|^2 - |f_r|^2) dx.

    |grad f|^2 comes from the spectral side (rho^2 |f_hat|^2), f_r from the
    cosine series of w = r*f. For a radial field resolved away from r = R
    the two agree to round-off.
    """
    spectral, direct = _gradient_energies(forward_coeffs(f.values, f.grid), f.grid)
    return spectral - direct


def _pairing(integrand: np.ndarray, slope_at_origin: float, grid: RadialGrid) -> float:
    """4*pi int_0^R integrand dr for an integrand vanishing at both ends."""
    return float(4.0 * np.pi * (grid.dr * np.sum(integrand) + grid.dr * grid.dr / 12.0 * slope_at_origin))


@dataclass(frozen=True)
class MorawetzSample:
    """Integrands of the budget at one instant (space integrals done)."""
    t: float
    potential: float
    origin: float
    r1: float
    r2: float
    flux: float
    origin_value: float
    angular: float
    gradient: float

    @property
    def relative_angular(self) -> float:
        return 0.0 if self.gradient == 0.0 else abs(self.angular) / self.gradient


def morawetz_sample(st: State, prm: IMethodParams, dealias_pad: int = 2) -> MorawetzSample:
    grid = st.grid
    fine = grid.refined(dealias_pad)
    r = fine.r
    weights = _i_weights(prm, grid)

    uh = forward_coeffs(st.u.values, grid)
    uth = forward_coeffs(st.ut.values, grid)
    vh = uh if weights is None else weights * uh
    vth = uth if weights is None else weights * uth
    ch = _commutator_coeffs(uh, weights, grid, prm.p, dealias_pad)

    vh_fine = resample_coeffs(vh, grid, fine)
    vth_fine = resample_coeffs(vth, grid, fine)
    ch_fine = resample_coeffs(ch, grid, fine)

    w = inverse_w(vh_fine, fine)
    v0, wr = w_prime(vh_fine, fine)
    vt0, _ = w_prime(vth_fine, fine)
    c0, _ = w_prime(ch_fine, fine)
    wt = inverse_w(vth_fine, fine)
    c = inverse_values(ch_fine, fine)
    spectral, direct = _gradient_energies(vh, grid)

    return MorawetzSample(
        t=st.t,
        potential=_pairing(r * np.abs(w / r) ** (prm.p + 1.0), abs(v0) ** (prm.p + 1.0), fine),
        origin=2.0 * np.pi * v0 * v0,
        r1=_pairing((r * wr - w) * c, 0.0, fine),
        r2=_pairing(w * c, v0 * c0, fine),
        flux=_pairing(wr * wt, v0 * vt0, fine),
        origin_value=v0,
        angular=spectral - direct,
        gradient=spectral,
    )


@dataclass(frozen=True)
class MorawetzBudget:
    """Time-integrated members of the Morawetz identity for Iu on [t_start, t_end].

    angular_term is the exact value for radial fields; angular_defect is the
    largest relative deficit measured along the way.
    """
    p: float
    t_start: float
    t_end: float
    weighted_potential: float
    origin_term: float
    angular_term: float
    boundary_start: float
    boundary_end: float
    R1: float
    R2: float
    contaminated: bool = False
    angular_defect: float = 0.0

    @property
    def residual(self) -> float:
        lhs = (self.p - 1.0) / (self.p + 1.0) * self.weighted_potential + self.origin_term + self.angular_term
        return abs(lhs - (self.boundary_end - self.boundary_start) - (self.R1 + self.R2))


class MorawetzAccumulator:
    """Running trapezoid-in-time accumulation of MorawetzSamples."""

    def __init__(self, prm: IMethodParams, dealias_pad: int = 2):
        self.prm = prm
        self.dealias_pad = dealias_pad
        self.first: Optional[MorawetzSample] = None
        self.last: Optional[MorawetzSample] = None
        self.weighted_potential = 0.0
        self.origin_term = 0.0
        self.R1 = 0.0
        self.R2 = 0.0
        self.angular_defect = 0.0

    def add(self, st: State) -> MorawetzSample:
        sample = morawetz_sample(st, self.prm, self.dealias_pad)
        if self.last is None:
            self.first = sample
        else:
            half = 0.5 * (sample.t - self.last.t)
            self.weighted_potential += half * (self.last.potential + sample.potential)
            self.origin_term += half * (self.last.origin + sample.origin)
            self.R1 += half * (self.last.r1 + sample.r1)
            self.R2 += half * (self.last.r2 + sample.r2)
        self.angular_defect = max(self.angular_defect, sample.relative_angular)
        self.last = sample
        return sample

    def budget(self, contaminated: bool = False) -> MorawetzBudget:
        if self.first is None or self.last is None:
            raise InsufficientSamplesError("Morawetz budget needs at least one sample")
        return MorawetzBudget(
            p=self.prm.p,
            t_start=self.first.t,
            t_end=self.last.t,
            weighted_potential=self.weighted_potential,
            origin_term=self.origin_term,
            angular_term=0.0,
            boundary_start=-self.first.flux,
            boundary_end=-self.last.flux,
            R1=self.R1,
            R2=self.R2,
            contaminated=contaminated,
            angular_defect=self.angular_defect,
        )


def morawetz_budget(traj: Trajectory, prm: IMethodParams) -> MorawetzBudget:
    if traj.contaminated:
        logger.warning(
            "Morawetz budget on a boundary-contaminated trajectory (%d flagged samples); "
            "reflections from r=R enter the flux terms.",
            len(traj.flags),
        )
    acc = MorawetzAccumulator(prm, traj.config.dealias_pad)
    for st in traj.states:
        acc.add(st)
    budget = acc.budget(contaminated=traj.contaminated)
    if budget.angular_defect > ANGULAR_RTOL:
        logger.warning(
            "angular deficit %.3g relative to the gradient energy (contaminated=%s); "
            "the field is not resolved away from r=R",
            budget.angular_defect, traj.contaminated,
        )
    return budget


def r1_r2_integrals(traj: Trajectory, prm: IMethodParams) -> tuple[float, float]:
    budget = morawetz_budget(traj, prm)
    return budget.R1, budget.R2


@dataclass(frozen=True)
class MorawetzRatio:
    numerator: float
    denominator: float
    ratio: float


def morawetz_strauss_check(budget: MorawetzBudget, sup_E_Iu: float) -> MorawetzRatio:
    """C_measured = W / (sup E(Iu) + |R1| + |R2|), 0/0 read as 0."""
    numerator = budget.weighted_potential
    denominator = sup_E_Iu + abs(budget.R1) + abs(budget.R2)
    if denominator == 0.0:
        if numerator != 0.0:
            raise InconsistentBudgetError(
                f"weighted potential {numerator:.6g} with zero energy and zero remainders"
            )
        return MorawetzRatio(0.0, 0.0, 0.0)
    ratio = numerator / denominator
    if not (math.isfinite(ratio) and ratio >= 0.0):
        raise NumericalFailure(f"Morawetz ratio must be finite and nonnegative, got {ratio}")
    return MorawetzRatio(numerator, denominator, ratio)


# Analytic constant of the radial Sobolev inequality sup r|f| <= c ||f||_{H^1}.
RADIAL_SOBOLEV_BOUND = 1.0 / math.sqrt(4.0 * math.pi)


def radial_sobolev_ratio(f: RadialField) -> float:
    """sup_r r|f(r)| / ||f||_{H^1}, the H^1 norm with weight sqrt(1 + rho^2)."""
    if f.is_zero():
        raise ZeroFieldError("radial Sobolev ratio of the zero field is undefined")
    return float(np.max(f.grid.r * np.abs(f.values))) / h1_norm(f)
