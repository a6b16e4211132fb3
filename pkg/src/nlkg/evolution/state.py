"""States, evolution settings and sampled trajectories."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from src.nlkg.errors import ConfigError, GridError, SampleTimeError
from src.nlkg.spectral.grid import RadialField, RadialGrid

# Sample times are k * sample_stride * dt; lookups match within this many dt.
TIME_MATCH_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class State:
    """The pair (u, du/dt) at time t."""
    u: RadialField
    ut: RadialField
    t: float = 0.0

    def __post_init__(self) -> None:
        if self.u.grid != self.ut.grid:
            raise GridError("u and ut must live on the same grid")
        if not math.isfinite(self.t):
            raise GridError(f"state time must be finite, got {self.t}")

    @property
    def grid(self) -> RadialGrid:
        return self.u.grid

    @classmethod
    def zeros(cls, grid: RadialGrid, t: float = 0.0) -> "State":
        zero = RadialField.zeros(grid)
        return cls(zero, zero, t)

    def at_time(self, t: float) -> "State":
        return State(self.u, self.ut, t)

    def __sub__(self, other: "State") -> "State":
        return State(self.u - other.u, self.ut - other.ut, self.t)

    def __add__(self, other: "State") -> "State":
        return State(self.u + other.u, self.ut + other.ut, self.t)

    def is_zero(self) -> bool:
        return self.u.is_zero() and self.ut.is_zero()


@dataclass(frozen=True)
class EvolutionConfig:
    """
    Settings for one Strang-split evolution.

    p:
        Nonlinearity exponent, 3 < p < 5.
    dt:
        Time step (> 0).
    T:
        Final time (>= 0); the run takes floor(T/dt) steps.
    sample_stride:
        Steps between stored samples.
    dealias_pad:
        Refinement factor of the grid on which |u|^(p-1) u is evaluated.
    boundary_guard:
        Fraction of R whose ball must hold >= 1 - 1e-6 of the L^2 mass of u.
    nonlinear:
        False switches the kick off, leaving the exact free flow.
    """
    p: float = 4.0
    dt: float = 1e-3
    T: float = 1.0
    sample_stride: int = 10
    dealias_pad: int = 2
    boundary_guard: float = 0.75
    nonlinear: bool = True

    def __post_init__(self) -> None:
        if not 3.0 < self.p < 5.0:
            raise ConfigError("p", f"must satisfy 3 < p < 5, got {self.p}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError("dt", f"must be positive, got {self.dt}")
        if not (math.isfinite(self.T) and self.T >= 0):
            raise ConfigError("T", f"must be nonnegative, got {self.T}")
        if int(self.sample_stride) != self.sample_stride or self.sample_stride < 1:
            raise ConfigError("sample_stride", f"must be a positive integer, got {self.sample_stride}")
        if int(self.dealias_pad) != self.dealias_pad or self.dealias_pad < 1:
            raise ConfigError("dealias_pad", f"must be an integer >= 1, got {self.dealias_pad}")
        if not 0.0 < self.boundary_guard <= 1.0:
            raise ConfigError("boundary_guard", f"must lie in (0, 1], got {self.boundary_guard}")

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.T / self.dt + TIME_MATCH_TOL))

    @property
    def n_samples(self) -> int:
        return self.n_steps // self.sample_stride + 1

    def sample_time(self, k: int) -> float:
        return k * self.sample_stride * self.dt


@dataclass(frozen=True)
class BoundaryFlag:
    """A sample at which more L^2 mass than allowed sat outside the guard ball."""
    t: float
    outside_fraction: float


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-sampled States of one evolution."""
    config: EvolutionConfig
    grid: RadialGrid
    times: np.ndarray
    states: tuple[State, ...]
    flags: tuple[BoundaryFlag, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        times = np.array(self.times, dtype=float, copy=True)
        if times.ndim != 1 or len(times) != len(self.states):
            raise GridError("times and states must be aligned")
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            raise GridError("sample times must be strictly increasing")
        for st in self.states:
            if st.grid != self.grid:
                raise GridError("every state must live on the trajectory grid")
        times.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "flags", tuple(self.flags))

    def __len__(self) -> int:
        return len(self.states)

    @property
    def contaminated(self) -> bool:
        return bool(self.flags)

    @property
    def initial(self) -> State:
        return self.states[0]

    @property
    def final(self) -> State:
        return self.states[-1]

    def index_of(self, t: float) -> int:
        if len(self.times) == 0:
            raise SampleTimeError(f"t={t} requested from an empty trajectory")
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > TIME_MATCH_TOL * max(1.0, self.config.dt, abs(t)):
            raise SampleTimeError(f"t={t} is not a sample time of this trajectory")
        return idx

    def state_at(self, t: float) -> State:
        return self.states[self.index_of(t)]

    def window(self, t0: float, t1: float) -> "Trajectory":
        """Sub-trajectory of the samples in [t0, t1]."""
        mask = (self.times >= t0 - TIME_MATCH_TOL) & (self.times <= t1 + TIME_MATCH_TOL)
        idx = np.flatnonzero(mask)
        return Trajectory(
            self.config,
            self.grid,
            self.times[idx],
            tuple(self.states[i] for i in idx),
            tuple(f for f in self.flags if t0 <= f.t <= t1),
        )
