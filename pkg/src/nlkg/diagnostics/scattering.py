"""Pullback by the free flow, Cauchy-criterion monitoring and scattering states.

v scatters when K^-1(t) v(t) converges in H^s x H^(s-1). The limit is
realised at the final sample: v_+ = K^-1(T) v(T). Its distance from the
pullback at an earlier checkpoint is exactly the truncated Duhamel tail the
Cauchy report measures.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from src.nlkg.diagnostics.functionals import hs_pair_norm
from src.nlkg.errors import InsufficientSamplesError
from src.nlkg.evolution.propagator import free_flow, inverse_free_flow
from src.nlkg.evolution.state import State, Trajectory
from src.nlkg.spectral.grid import RadialField

logger = logging.getLogger(__name__)

MIN_CHECKPOINTS = 3


def pullback(st: State) -> State:
    """K^-1(t) v(t), a State at time 0."""
    return inverse_free_flow(st, st.t)


@dataclass(frozen=True)
class ScatteringState:
    u_plus_0: RadialField
    u_plus_1: RadialField
    contaminated: bool = False

    def as_state(self) -> State:
        return State(self.u_plus_0, self.u_plus_1, 0.0)


def extract_scattering_state(traj: Trajectory) -> ScatteringState:
    if traj.contaminated:
        logger.warning(
            "Scattering state extracted from a boundary-contaminated trajectory (first flag at t=%g)",
            traj.flags[0].t,
        )
    v_plus = pullback(traj.final)
    return ScatteringState(v_plus.u, v_plus.ut, traj.contaminated)


def scattering_error(traj: Trajectory, scat: ScatteringState, t: float, s: float) -> float:
    """||v(t) - K(t) v_+||_{H^s x H^(s-1)}."""
    v_t = traj.state_at(t)
    linear = free_flow(scat.as_state(), v_t.t)
    return hs_pair_norm(v_t - linear, s)


@dataclass(frozen=True)
class CauchyReport:
    s: float
    checkpoints: tuple[float, ...]
    diffs: tuple[float, ...]
    errors: tuple[float, ...]
    final_error: float
    contaminated: bool = False

    @property
    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.diffs, self.diffs[1:]))


def default_checkpoints(traj: Trajectory) -> list[float]:
    """Dyadic schedule T/8, T/4, T/2, T snapped to sample instants."""
    T = float(traj.times[-1])
    return [float(traj.times[traj.index_of(T / k)]) for k in (8, 4, 2, 1)]


def cauchy_report(traj: Trajectory, s: float, checkpoints: Optional[Sequence[float]] = None) -> CauchyReport:
    """Consecutive pullback differences across checkpoints in H^s x H^(s-1)."""
    checkpoints = list(checkpoints) if checkpoints is not None else default_checkpoints(traj)
    if len(checkpoints) < MIN_CHECKPOINTS:
        raise InsufficientSamplesError(
            f"Cauchy report needs at least {MIN_CHECKPOINTS} checkpoints, got {len(checkpoints)}"
        )
    pulled = [pullback(traj.state_at(t)) for t in checkpoints]
    diffs = tuple(hs_pair_norm(b - a, s) for a, b in zip(pulled, pulled[1:]))
    scat = extract_scattering_state(traj)
    errors = tuple(scattering_error(traj, scat, t, s) for t in checkpoints)
    report = CauchyReport(
        s=s,
        checkpoints=tuple(float(t) for t in checkpoints),
        diffs=diffs,
        errors=errors,
        final_error=scattering_error(traj, scat, float(traj.times[-1]), s),
        contaminated=traj.contaminated,
    )
    logger.info("Cauchy diffs at %s: %s", report.checkpoints, ", ".join(f"{d:.3e}" for d in diffs))
    return report
