"""Tests for the exact free flow, the Strang-split evolution and trajectories."""
import logging
import math

import numpy as np
import pytest

from src.nlkg.diagnostics.functionals import energy, energy_parts
from src.nlkg.errors import BlowUpError, ConfigError, SampleTimeError
from src.nlkg.evolution import propagator
from src.nlkg.evolution.propagator import (
    duhamel_tail,
    evolve,
    free_flow,
    inverse_free_flow,
    nonlinear_kick,
    strang_step,
)
from src.nlkg.evolution.state import EvolutionConfig, State
from src.nlkg.spectral.grid import RadialField, RadialGrid
from src.nlkg.spectral.norms import lebesgue_norm
from src.nlkg.synthetic.initial_data import gaussian, rough_spectral


def _max_diff(a: State, b: State) -> float:
    return max(np.max(np.abs(a.u.values - b.u.values)), np.max(np.abs(a.ut.values - b.ut.values)))


def test_free_flow_group_law(gaussian_state):
    two_steps = free_flow(free_flow(gaussian_state, 0.7), 1.3)
    one_step = free_flow(gaussian_state, 2.0)
    assert two_steps.t == pytest.approx(2.0)
    assert _max_diff(two_steps, one_step) <= 1e-12


def test_free_flow_inverts(gaussian_state):
    back = inverse_free_flow(free_flow(gaussian_state, 3.0), 3.0)
    assert _max_diff(back, gaussian_state) <= 1e-12


def test_free_flow_of_zero_is_zero(small_grid):
    assert free_flow(State.zeros(small_grid), 5.0).is_zero()


def test_free_flow_conserves_quadratic_energy(gaussian_state):
    before = energy_parts(gaussian_state, 4.0).quadratic
    after = energy_parts(free_flow(gaussian_state, 4.0), 4.0).quadratic
    assert after == pytest.approx(before, rel=1e-12)


def test_free_flow_of_single_mode(small_grid):
    k = 12
    rho = small_grid.rho[k - 1]
    omega = math.sqrt(1.0 + rho * rho)
    mode = np.sin(rho * small_grid.r) / small_grid.r
    st = State(RadialField(small_grid, mode), RadialField.zeros(small_grid))
    out = free_flow(st, 1.7)
    np.testing.assert_allclose(out.u.values, math.cos(omega * 1.7) * mode, rtol=0.0, atol=1e-12)
    np.testing.assert_allclose(out.ut.values, -omega * math.sin(omega * 1.7) * mode, rtol=0.0, atol=1e-12)


def test_kick_of_flat_top_bump():
    grid = RadialGrid(20.0, 512)
    A, tau = 0.5, 0.1
    u = A * np.exp(-(grid.r / 4.0) ** 8)
    st = State(RadialField(grid, u), RadialField.zeros(grid))
    kicked = nonlinear_kick(st, tau, 4.0)
    assert kicked.ut.values[0] == pytest.approx(-tau * A ** 4, rel=1e-6)
    np.testing.assert_allclose(kicked.ut.values, -tau * np.abs(u) ** 3 * u, rtol=0.0, atol=1e-8)


def test_kick_of_zero_or_zero_time_is_identity(gaussian_state, small_grid):
    zero = State.zeros(small_grid)
    assert nonlinear_kick(zero, 0.1, 4.0) is zero
    assert nonlinear_kick(gaussian_state, 0.0, 4.0) is gaussian_state


def test_kick_leaves_position_unchanged(gaussian_state):
    kicked = nonlinear_kick(gaussian_state, 0.1, 4.0)
    np.testing.assert_array_equal(kicked.u.values, gaussian_state.u.values)
    # defocusing: the kick pushes ut against u
    assert np.dot(kicked.ut.values, gaussian_state.u.values) < 0.0


def test_linear_evolution_matches_free_flow(gaussian_state):
    cfg = EvolutionConfig(p=4.0, dt=0.01, T=1.0, sample_stride=10, nonlinear=False)
    traj = evolve(gaussian_state, cfg)
    assert _max_diff(traj.final, free_flow(gaussian_state, 1.0)) <= 1e-12


def test_evolve_agrees_with_strang_steps(gaussian_state):
    cfg = EvolutionConfig(p=4.0, dt=0.01, T=0.05, sample_stride=5)
    traj = evolve(gaussian_state, cfg)
    st = gaussian_state
    for _ in range(5):
        st = strang_step(st, 0.01, 4.0)
    assert _max_diff(traj.final, st) <= 1e-12


def test_evolve_runs_the_shared_strang_step(gaussian_state, monkeypatch):
    calls = []
    shared = propagator._strang_coeffs

    def counting(*args, **kwargs):
        calls.append(args[4])
        return shared(*args, **kwargs)

    monkeypatch.setattr(propagator, "_strang_coeffs", counting)
    evolve(gaussian_state, EvolutionConfig(p=4.0, dt=0.01, T=0.05, sample_stride=5))
    assert calls == [0.01] * 5
    strang_step(gaussian_state, 0.01, 4.0)
    assert len(calls) == 6


def test_strang_step_is_time_reversible(gaussian_state):
    st = gaussian_state
    for _ in range(20):
        st = strang_step(st, 0.01, 4.0)
    assert _max_diff(st, gaussian_state) > 1e-3
    for _ in range(20):
        st = strang_step(st, -0.01, 4.0)
    assert st.t == pytest.approx(0.0, abs=1e-12)
    assert _max_diff(st, gaussian_state) <= 1e-10


def test_sample_times_and_count(gaussian_state):
    cfg = EvolutionConfig(p=4.0, dt=0.01, T=1.0, sample_stride=10)
    traj = evolve(gaussian_state, cfg)
    assert len(traj) == math.floor(1.0 / (0.01 * 10)) + 1 == cfg.n_samples
    np.testing.assert_allclose(traj.times, np.arange(11) * 0.1, atol=1e-12)
    assert traj.state_at(0.5).t == pytest.approx(0.5)
    with pytest.raises(SampleTimeError):
        traj.state_at(0.55)


def test_window_selects_samples(gaussian_state):
    cfg = EvolutionConfig(p=4.0, dt=0.01, T=1.0, sample_stride=10, nonlinear=False)
    traj = evolve(gaussian_state, cfg)
    sub = traj.window(0.2, 0.5)
    np.testing.assert_allclose(sub.times, [0.2, 0.3, 0.4, 0.5], atol=1e-12)


def test_strang_self_convergence(gaussian_state):
    finals = []
    for dt in (0.02, 0.01, 0.005):
        steps = round(1.0 / dt)
        cfg = EvolutionConfig(p=4.0, dt=dt, T=1.0, sample_stride=steps)
        finals.append(evolve(gaussian_state, cfg).final)
    coarse = _max_diff(finals[0], finals[1])
    fine = _max_diff(finals[1], finals[2])
    assert 3.5 <= coarse / fine <= 4.5


def test_nonlinear_energy_drift_small_run(small_grid):
    s0 = gaussian(small_grid, 0.5)
    cfg = EvolutionConfig(p=4.0, dt=1e-3, T=2.0, sample_stride=10)
    traj = evolve(s0, cfg)
    e0 = energy(s0, 4.0)
    drift = max(abs(energy(st, 4.0) - e0) for st in traj.states)
    assert drift <= 1e-6 * e0


@pytest.mark.slow
def test_nonlinear_energy_drift_reference_run():
    grid = RadialGrid(30.0, 4096)
    s0 = gaussian(grid, 0.5)
    cfg = EvolutionConfig(p=4.0, dt=1e-3, T=20.0, sample_stride=100)
    traj = evolve(s0, cfg)
    e0 = energy(s0, 4.0)
    drift = max(abs(energy(st, 4.0) - e0) for st in traj.states)
    assert drift <= 1e-6 * e0


def test_blow_up_is_reported(small_grid):
    s0 = gaussian(small_grid, 1000.0)
    cfg = EvolutionConfig(p=4.9, dt=0.1, T=2.0, sample_stride=1)
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(BlowUpError) as excinfo:
            evolve(s0, cfg)
    assert 0.0 < excinfo.value.t <= 2.0


def test_boundary_guard_flags_wide_data(caplog):
    grid = RadialGrid(10.0, 128)
    s0 = gaussian(grid, 0.1, width=4.0)
    cfg = EvolutionConfig(p=4.0, dt=0.01, T=0.1, sample_stride=1, boundary_guard=0.5)
    with caplog.at_level(logging.WARNING):
        traj = evolve(s0, cfg)
    assert traj.contaminated
    assert traj.flags[0].t == 0.0
    assert "boundary_guard" in caplog.text


def test_compact_data_is_not_flagged(gaussian_state):
    traj = evolve(gaussian_state, EvolutionConfig(p=4.0, dt=0.01, T=0.5, sample_stride=5))
    assert not traj.contaminated


def test_few_samples_warn(gaussian_state, caplog):
    with caplog.at_level(logging.WARNING):
        evolve(gaussian_state, EvolutionConfig(p=4.0, dt=0.01, T=0.1, sample_stride=1))
    assert "samples" in caplog.text


def test_duhamel_tail_vanishes_without_nonlinearity(gaussian_state):
    cfg = EvolutionConfig(p=4.0, dt=0.01, T=1.0, sample_stride=10, nonlinear=False)
    traj = evolve(gaussian_state, cfg)
    tail = duhamel_tail(traj, 1.0)
    assert np.max(np.abs(tail.u.values)) <= 1e-12


def test_duhamel_tail_nonzero_with_nonlinearity(gaussian_state):
    traj = evolve(gaussian_state, EvolutionConfig(p=4.0, dt=0.01, T=1.0, sample_stride=10))
    assert np.max(np.abs(duhamel_tail(traj, 1.0).u.values)) > 1e-4


def test_evolution_is_deterministic():
    grid = RadialGrid(20.0, 256)
    s0 = rough_spectral(grid, 0.3, s=0.95, seed=7)
    cfg = EvolutionConfig(p=4.0, dt=0.01, T=0.3, sample_stride=3)
    a, b = evolve(s0, cfg), evolve(s0, cfg)
    for sa, sb in zip(a.states, b.states):
        np.testing.assert_array_equal(sa.u.values, sb.u.values)
        np.testing.assert_array_equal(sa.ut.values, sb.ut.values)


@pytest.mark.parametrize("field, value", [("p", 5.0), ("p", 3.0), ("dt", 0.0), ("T", -1.0),
                                          ("sample_stride", 0), ("dealias_pad", 0), ("boundary_guard", 1.5)])
def test_evolution_config_validation(field, value):
    with pytest.raises(ConfigError) as excinfo:
        EvolutionConfig(**{field: value})
    assert excinfo.value.field == field


def test_small_data_follows_the_free_flow(small_grid):
    A = 1e-3
    s0 = gaussian(small_grid, A)
    traj = evolve(s0, EvolutionConfig(p=4.0, dt=0.01, T=1.0, sample_stride=10))
    for st in traj.states:
        assert _max_diff(st, free_flow(s0, st.t)) <= 10.0 * A ** 4


def test_zero_data_stays_zero(small_grid):
    cfg = EvolutionConfig(p=4.0, dt=0.01, T=0.5, sample_stride=5)
    traj = evolve(State.zeros(small_grid), cfg)
    assert len(traj) == cfg.n_samples
    assert all(st.is_zero() for st in traj.states)
    assert not traj.contaminated
    assert duhamel_tail(traj, 0.5).is_zero()


def _tail_mass(grid, A, t=1.0):
    traj = evolve(gaussian(grid, A), EvolutionConfig(p=4.0, dt=0.01, T=t, sample_stride=10))
    return lebesgue_norm(duhamel_tail(traj, t).u, 2.0)


def test_duhamel_tail_in_the_linear_regime(small_grid):
    A = 1e-2
    weak = _tail_mass(small_grid, A)
    # ||u_nl(t)||_2 <= t sup ||F(u)||_2 and ||F(A e^{-r^2})||_2 = A^4 (pi/8)^(3/4)
    assert 0.0 < weak <= 2.0 * A ** 4 * (math.pi / 2.0) ** 0.75
    assert 15.0 <= _tail_mass(small_grid, 2.0 * A) / weak <= 17.0


def test_duhamel_tail_at_start_is_zero(gaussian_state):
    traj = evolve(gaussian_state, EvolutionConfig(p=4.0, dt=0.01, T=0.1, sample_stride=1))
    tail = duhamel_tail(traj, 0.0)
    assert max(np.max(np.abs(tail.u.values)), np.max(np.abs(tail.ut.values))) <= 1e-14
