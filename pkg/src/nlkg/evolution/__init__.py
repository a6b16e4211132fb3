"""Free Klein-Gordon flow, Strang-split evolution and sampled trajectories."""
from src.nlkg.evolution.propagator import (
    duhamel_tail,
    evolve,
    free_flow,
    inverse_free_flow,
    nonlinear_kick,
    strang_step,
)
from src.nlkg.evolution.state import BoundaryFlag, EvolutionConfig, State, Trajectory

__all__ = [
    "BoundaryFlag",
    "EvolutionConfig",
    "State",
    "Trajectory",
    "duhamel_tail",
    "evolve",
    "free_flow",
    "inverse_free_flow",
    "nonlinear_kick",
    "strang_step",
]
