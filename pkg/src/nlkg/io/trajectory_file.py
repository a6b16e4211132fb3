"""Binary trajectory files.

Layout (all little-endian):

    header   magic "NLKG" | version u4 | n u4 | R f8 | dt f8 | samples u4 |
             sample_stride u4 | p f8 | s f8 | N f8 | t0 f8 | dealias_pad u4 |
             boundary_guard f8 | nonlinear u1
    frames   samples x (u: n x f8, ut: n x f8)

Sample k lies at t = t0 + k * sample_stride * dt, so times are rebuilt exactly.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.nlkg.errors import TrajectoryFileError
from src.nlkg.evolution.state import EvolutionConfig, State, Trajectory
from src.nlkg.spectral.grid import RadialField, RadialGrid

logger = logging.getLogger(__name__)

MAGIC = b"NLKG"
VERSION = 2

HEADER_DTYPE = np.dtype([
    ("magic", "S4"),
    ("version", "<u4"),
    ("n", "<u4"),
    ("R", "<f8"),
    ("dt", "<f8"),
    ("samples", "<u4"),
    ("sample_stride", "<u4"),
    ("p", "<f8"),
    ("s", "<f8"),
    ("N", "<f8"),
    ("t0", "<f8"),
    ("dealias_pad", "<u4"),
    ("boundary_guard", "<f8"),
    ("nonlinear", "u1"),
])


@dataclass(frozen=True)
class TrajectoryFileHeader:
    n: int
    R: float
    dt: float
    samples: int
    sample_stride: int
    p: float
    s: float
    N: float
    t0: float = 0.0
    dealias_pad: int = 2
    boundary_guard: float = 0.75
    nonlinear: bool = True


def write_trajectory(path: Path, traj: Trajectory, s: float, N: float) -> Path:
    path = Path(path)
    cfg = traj.config
    header = np.zeros(1, dtype=HEADER_DTYPE)
    header[0] = (
        MAGIC, VERSION, traj.grid.n, traj.grid.R, cfg.dt, len(traj), cfg.sample_stride, cfg.p, s, N,
        traj.initial.t, cfg.dealias_pad, cfg.boundary_guard, cfg.nonlinear,
    )
    frames = np.empty((len(traj), 2, traj.grid.n), dtype="<f8")
    for k, st in enumerate(traj.states):
        frames[k, 0] = st.u.values
        frames[k, 1] = st.ut.values
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as f:
        f.write(header.tobytes())
        f.write(frames.tobytes())
    logger.info("Wrote %d samples to %s", len(traj), path)
    return path


def read_header(path: Path) -> TrajectoryFileHeader:
    raw = Path(path).read_bytes()[:HEADER_DTYPE.itemsize]
    if len(raw) < HEADER_DTYPE.itemsize:
        raise TrajectoryFileError(f"{path}: truncated header")
    header = np.frombuffer(raw, dtype=HEADER_DTYPE)[0]
    if bytes(header["magic"]) != MAGIC:
        raise TrajectoryFileError(f"{path}: bad magic {bytes(header['magic'])!r}")
    if int(header["version"]) != VERSION:
        raise TrajectoryFileError(f"{path}: unsupported version {int(header['version'])}")
    return TrajectoryFileHeader(
        n=int(header["n"]),
        R=float(header["R"]),
        dt=float(header["dt"]),
        samples=int(header["samples"]),
        sample_stride=int(header["sample_stride"]),
        p=float(header["p"]),
        s=float(header["s"]),
        N=float(header["N"]),
        t0=float(header["t0"]),
        dealias_pad=int(header["dealias_pad"]),
        boundary_guard=float(header["boundary_guard"]),
        nonlinear=bool(header["nonlinear"]),
    )


def read_trajectory(path: Path) -> tuple[Trajectory, TrajectoryFileHeader]:
    """Rebuild the Trajectory (flags are not stored) and return it with its header."""
    path = Path(path)
    header = read_header(path)
    body = path.read_bytes()[HEADER_DTYPE.itemsize:]
    expected = header.samples * 2 * header.n * 8
    if len(body) != expected:
        raise TrajectoryFileError(f"{path}: expected {expected} frame bytes, found {len(body)}")
    frames = np.frombuffer(body, dtype="<f8").reshape(header.samples, 2, header.n)
    grid = RadialGrid(header.R, header.n)
    T = (header.samples - 1) * header.sample_stride * header.dt
    cfg = EvolutionConfig(
        p=header.p,
        dt=header.dt,
        T=max(T, 0.0),
        sample_stride=header.sample_stride,
        dealias_pad=header.dealias_pad,
        boundary_guard=header.boundary_guard,
        nonlinear=header.nonlinear,
    )
    times = np.array([header.t0 + cfg.sample_time(k) for k in range(header.samples)])
    states = tuple(
        State(RadialField(grid, frames[k, 0]), RadialField(grid, frames[k, 1]), float(times[k]))
        for k in range(header.samples)
    )
    logger.info("Read %d samples from %s", header.samples, path)
    return Trajectory(cfg, grid, times, states), header
