"""Tests for the Morawetz budget of Iu, the commutator and the radial Sobolev ratio."""
import dataclasses
import math

import numpy as np
import pytest

from src.nlkg.diagnostics.functionals import energy
from src.nlkg.diagnostics.morawetz import (
    ANGULAR_RTOL,
    RADIAL_SOBOLEV_BOUND,
    MorawetzAccumulator,
    MorawetzBudget,
    angular_deficit,
    commutator,
    morawetz_budget,
    morawetz_sample,
    morawetz_strauss_check,
    r1_r2_integrals,
    radial_sobolev_ratio,
)
from src.nlkg.diagnostics.params import IMethodParams
from src.nlkg.errors import InconsistentBudgetError, InsufficientSamplesError, ZeroFieldError
from src.nlkg.evolution.propagator import evolve, strang_step
from src.nlkg.evolution.state import EvolutionConfig, State
from src.nlkg.spectral.grid import RadialField, RadialGrid
from src.nlkg.spectral.multipliers import eta
from src.nlkg.spectral.norms import plancherel_norm
from src.nlkg.spectral.transform import forward_coeffs
from src.nlkg.synthetic.initial_data import gaussian, rough_spectral


def _budget(p=4.0, n=256, **evolution):
    grid = RadialGrid(20.0, n)
    cfg = EvolutionConfig(p=p, **evolution)
    traj = evolve(gaussian(grid, 1.0), cfg)
    # rho_max <= 80 for n <= 512, so N = 128 makes I the identity
    return morawetz_budget(traj, IMethodParams(128.0, 0.95, p))


def test_angular_term_vanishes_for_radial_fields(gaussian_field):
    coeffs = forward_coeffs(gaussian_field.values, gaussian_field.grid)
    gradient = plancherel_norm(gaussian_field.grid.rho * coeffs, gaussian_field.grid) ** 2
    assert gradient == pytest.approx(5.9, rel=0.01)
    assert abs(angular_deficit(gaussian_field)) <= 1e-10 * gradient


def test_angular_deficit_sees_mass_at_the_wall(small_grid):
    # u = 1 up to r = R jumps at the wall: the spectral gradient energy grows with n
    wall = RadialField(small_grid, np.ones(small_grid.n))
    assert abs(angular_deficit(wall)) > 1.0


def test_budget_members_for_smooth_run():
    budget = _budget(dt=0.01, T=1.0, sample_stride=1)
    assert budget.angular_term == 0.0
    assert budget.angular_defect <= ANGULAR_RTOL
    assert budget.weighted_potential > 0.0
    assert budget.origin_term > 0.0
    assert budget.R1 == 0.0 and budget.R2 == 0.0
    assert budget.t_end == pytest.approx(1.0)
    assert not budget.contaminated


def test_weighted_potential_nondecreasing_in_T():
    grid = RadialGrid(20.0, 256)
    traj = evolve(gaussian(grid, 1.0), EvolutionConfig(p=4.0, dt=0.01, T=2.0, sample_stride=1))
    acc = MorawetzAccumulator(IMethodParams(64.0, 0.95, 4.0))
    history = []
    for st in traj.states:
        acc.add(st)
        history.append(acc.weighted_potential)
    assert history[0] == 0.0
    assert all(b >= a for a, b in zip(history, history[1:]))


def test_residual_converges_at_second_order():
    coarse = _budget(dt=0.02, T=2.0, sample_stride=1).residual
    fine = _budget(dt=0.01, T=2.0, sample_stride=1).residual
    assert fine < coarse
    assert math.log2(coarse / fine) >= 1.8


def test_residual_does_not_depend_on_grid_size():
    coarse = _budget(n=256, dt=0.01, T=2.0, sample_stride=1).residual
    fine = _budget(n=512, dt=0.01, T=2.0, sample_stride=1).residual
    assert abs(fine - coarse) <= 0.05 * coarse


def test_space_integrals_do_not_depend_on_refinement(small_grid):
    st = gaussian(small_grid, 1.0)
    for _ in range(25):
        st = strang_step(st, 0.02, 4.0)
    prm = IMethodParams(64.0, 0.95, 4.0)
    pad2 = morawetz_sample(st, prm, dealias_pad=2)
    pad4 = morawetz_sample(st, prm, dealias_pad=4)
    assert pad4.potential == pytest.approx(pad2.potential, rel=1e-7)
    assert pad4.flux == pytest.approx(pad2.flux, rel=1e-7, abs=1e-10)
    assert pad4.origin == pytest.approx(pad2.origin, rel=1e-9)


def test_remainder_signs_close_the_budget():
    # N = 2 on a width-1 Gaussian: I acts on the bulk of the spectrum
    grid = RadialGrid(20.0, 1024)
    cfg = EvolutionConfig(p=4.0, dt=0.005, T=2.0, sample_stride=1)
    budget = morawetz_budget(evolve(gaussian(grid, 1.0), cfg), IMethodParams(2.0, 0.95, 4.0))
    assert abs(budget.R1) > 1e-4 and abs(budget.R2) > 1e-4
    flipped = [
        dataclasses.replace(budget, R1=-budget.R1).residual,
        dataclasses.replace(budget, R2=-budget.R2).residual,
        dataclasses.replace(budget, R1=-budget.R1, R2=-budget.R2).residual,
    ]
    assert budget.residual < 0.1 * min(flipped)


def test_linear_regime_potential_is_negligible(small_grid):
    s0 = gaussian(small_grid, 1e-3)
    traj = evolve(s0, EvolutionConfig(p=4.0, dt=0.01, T=1.0, sample_stride=1))
    budget = morawetz_budget(traj, IMethodParams(64.0, 0.95, 4.0))
    assert budget.weighted_potential <= 1e-6 * energy(s0, 4.0)


def test_accumulator_needs_samples():
    with pytest.raises(InsufficientSamplesError):
        MorawetzAccumulator(IMethodParams(8.0, 0.95, 4.0)).budget()


# ---------------------------------------------------------------------------
# Commutator and remainders
# ---------------------------------------------------------------------------

def test_commutator_vanishes_when_i_is_identity(gaussian_state):
    c = commutator(gaussian_state, IMethodParams(64.0, 0.95, 4.0))
    assert c.is_zero()


def test_commutator_of_rough_data(rough_state):
    c = commutator(rough_state, IMethodParams(4.0, 0.95, 4.0))
    assert np.max(np.abs(c.values)) > 0.0


def test_commutator_matches_dense_double_resolution_sum():
    grid = RadialGrid(20.0, 128)
    st = rough_spectral(grid, 0.5, s=0.95, seed=3)
    prm = IMethodParams(4.0, 0.95, 4.0)
    r, rho = grid.r, grid.rho
    basis = np.sin(np.outer(r, rho))
    amplitudes = np.linalg.solve(basis, r * st.u.values)

    m = 2 * (grid.n + 1)
    r_fine = grid.R / m * np.arange(1, m)
    basis_fine = np.sin(np.outer(r_fine, rho))
    weights = eta(rho / prm.N, prm.s)

    def project(values):
        return (2.0 / m) * basis_fine.T @ (r_fine * values)

    def power(a):
        u = basis_fine @ a / r_fine
        return np.abs(u) ** (prm.p - 1.0) * u

    expected = project(power(weights * amplitudes)) - weights * project(power(amplitudes))
    np.testing.assert_allclose(commutator(st, prm, 2).values, basis @ expected / r, rtol=0.0, atol=1e-8)


def test_remainders_shrink_with_N(rough_state):
    cfg = EvolutionConfig(p=4.0, dt=1e-3, T=0.2, sample_stride=10)
    traj = evolve(rough_state, cfg)
    low = r1_r2_integrals(traj, IMethodParams(4.0, 0.95, 4.0))
    high = r1_r2_integrals(traj, IMethodParams(32.0, 0.95, 4.0))
    assert abs(high[0]) + abs(high[1]) < abs(low[0]) + abs(low[1])


# ---------------------------------------------------------------------------
# Morawetz-Strauss ratio
# ---------------------------------------------------------------------------

def _zero_budget(weighted_potential=0.0):
    return MorawetzBudget(
        p=4.0, t_start=0.0, t_end=1.0, weighted_potential=weighted_potential,
        origin_term=0.0, angular_term=0.0, boundary_start=0.0, boundary_end=0.0, R1=0.0, R2=0.0,
    )


def test_strauss_ratio_of_zero_data():
    result = morawetz_strauss_check(_zero_budget(), 0.0)
    assert result.ratio == 0.0


def test_strauss_ratio_inconsistent_budget():
    with pytest.raises(InconsistentBudgetError):
        morawetz_strauss_check(_zero_budget(1.0), 0.0)


def test_strauss_ratio_is_bounded_for_smooth_run():
    budget = _budget(dt=0.01, T=2.0, sample_stride=1)
    result = morawetz_strauss_check(budget, 1.0)
    assert result.denominator == 1.0
    assert result.ratio == budget.weighted_potential


# ---------------------------------------------------------------------------
# Radial Sobolev ratio
# ---------------------------------------------------------------------------

def test_radial_sobolev_bound_over_random_corpus():
    grid = RadialGrid(30.0, 1024)
    ratios = [radial_sobolev_ratio(rough_spectral(grid, 1.0, s=0.95, seed=seed).u) for seed in range(50)]
    assert max(ratios) <= RADIAL_SOBOLEV_BOUND + 1e-3
    assert min(ratios) > 0.0


def test_radial_sobolev_ratio_of_zero_field(small_grid):
    with pytest.raises(ZeroFieldError):
        radial_sobolev_ratio(RadialField.zeros(small_grid))


def test_radial_sobolev_ratio_is_scale_free(gaussian_field):
    doubled = RadialField(gaussian_field.grid, 2.0 * gaussian_field.values)
    assert radial_sobolev_ratio(doubled) == pytest.approx(radial_sobolev_ratio(gaussian_field))


def test_zero_state_has_empty_budget(small_grid):
    traj = evolve(State.zeros(small_grid), EvolutionConfig(p=4.0, dt=0.01, T=0.1, sample_stride=1))
    budget = morawetz_budget(traj, IMethodParams(8.0, 0.95, 4.0))
    assert budget.weighted_potential == 0.0
    assert budget.residual == 0.0
