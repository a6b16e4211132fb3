"""
Experiment orchestration behind the CLI subcommands.

Each cmd_* takes a validated RunConfig and an output directory, does its
computation, writes its files and returns an outcome object the CLI
summarises. Sweep points run in worker processes and hand their results
back by value; only this module writes files.
"""
from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np
import pandas as pd
import yaml

from src.nlkg.diagnostics.functionals import (
    energy,
    initial_mollified_growth,
    log2_slope,
    mollified_energy_drift,
    partition_intervals,
)
from src.nlkg.diagnostics.kernels import decay_envelope_fit, kernel_value, strichartz_probe
from src.nlkg.diagnostics.morawetz import (
    RADIAL_SOBOLEV_BOUND,
    morawetz_budget,
    morawetz_strauss_check,
)
from src.nlkg.diagnostics.params import AdmissiblePair, IMethodParams, default_pair_set
from src.nlkg.diagnostics.records import RECORD_COLUMNS, DiagnosticsObserver
from src.nlkg.diagnostics.scattering import cauchy_report, default_checkpoints, extract_scattering_state, scattering_error
from src.nlkg.errors import InsufficientSamplesError, SampleTimeError
from src.nlkg.evolution.propagator import GUARD_MASS_TOL, evolve, outside_mass_fraction
from src.nlkg.evolution.state import BoundaryFlag, EvolutionConfig, State, Trajectory
from src.nlkg.io.config_loader import load_config
from src.nlkg.io.csv_writer import rows_frame, write_csv
from src.nlkg.io.trajectory_file import read_trajectory, write_trajectory
from src.nlkg.schemas.contracts import DiagnosticsRow, KernelProbeRow, RunConfig, SweepNRow, SweepPRow
from src.nlkg.spectral.grid import RadialGrid
from src.nlkg.synthetic.initial_data import make_initial_data
from src.nlkg.theory.exponents import (
    critical_regularity,
    exponent_report,
    holder_identity_defects,
    threshold_branches,
)

logger = logging.getLogger(__name__)

RUN_CONFIG_FILE = "config.yaml"
SWEEP_N_CSV = "sweep_n.csv"
SWEEP_P_CSV = "sweep_p.csv"
PROBE_KERNEL_CSV = "probe_kernel.csv"
EXPONENTS_JSON = "exponents.json"
REPORT_JSON = "report.json"

SWEEP_N_COLUMNS = ["row_kind", "N", "delta_E_Iu", "E_Iu0", "R1", "R2", "slope", "predicted_slope"]
SWEEP_P_COLUMNS = ["p", "s_c", "s_threshold", "energy_drift", "delta_E_Iu", "morawetz_ratio"]
PROBE_KERNEL_COLUMNS = [
    "M", "pair", "q", "r", "m", "strichartz_ratio", "envelope_exponent", "envelope_amplitude", "K_M_origin",
]


# ---------------------------------------------------------------------------
# Building blocks
# ---------------------------------------------------------------------------

def build_grid(cfg: RunConfig) -> RadialGrid:
    return RadialGrid(cfg.grid.R, cfg.grid.n)


def initial_state(cfg: RunConfig, grid: Optional[RadialGrid] = None) -> State:
    d = cfg.data
    return make_initial_data(
        grid or build_grid(cfg),
        d.kind,
        d.amplitude,
        seed=d.seed,
        s=cfg.s,
        width=d.width,
        cutoff=d.cutoff,
        spectral_slope=d.spectral_slope,
        envelope_width=d.envelope_width,
    )


def evolution_config(cfg: RunConfig, p: Optional[float] = None) -> EvolutionConfig:
    e = cfg.evolution
    return EvolutionConfig(
        p=cfg.p if p is None else p,
        dt=e.dt,
        T=e.T,
        sample_stride=e.sample_stride,
        dealias_pad=e.dealias_pad,
        boundary_guard=e.boundary_guard,
    )


def i_params(cfg: RunConfig, p: Optional[float] = None, N: Optional[float] = None) -> IMethodParams:
    return IMethodParams(cfg.N if N is None else N, cfg.s, cfg.p if p is None else p)


def probe_pairs(cfg: RunConfig) -> list[AdmissiblePair]:
    if cfg.kernel.pairs is None:
        return default_pair_set(cfg.s)
    return [AdmissiblePair.of(q, r) for q, r in cfg.kernel.pairs]


def config_document(cfg: RunConfig) -> dict[str, Any]:
    """RunConfig as plain YAML-safe data (tuples become lists)."""
    def plain(value):
        if isinstance(value, dict):
            return {k: plain(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [plain(v) for v in value]
        return value

    return plain(cfg.model_dump())


def write_config(cfg: RunConfig, out_dir: Path) -> Path:
    path = Path(out_dir) / RUN_CONFIG_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        yaml.safe_dump(config_document(cfg), f, sort_keys=True)
    return path


def jsonable(value: Any) -> Any:
    """Exact rationals as {numerator, denominator}; non-finite floats as null."""
    if isinstance(value, Fraction):
        return {"numerator": value.numerator, "denominator": value.denominator}
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def write_json(payload: dict, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info("Wrote: %s", path)
    return path


def fan_out(fn: Callable, tasks: Sequence[tuple], jobs: int) -> list:
    """fn(*task) for every task, in task order; jobs > 1 runs them in worker processes."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(*task) for task in tasks]
    results: dict[int, Any] = {}
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        futures = {pool.submit(fn, *task): k for k, task in enumerate(tasks)}
        for future in as_completed(futures):
            k = futures[future]
            results[k] = future.result()
            logger.info("Finished sweep point %d/%d", len(results), len(tasks))
    return [results[k] for k in range(len(tasks))]


def _fit_loglog(xs: Sequence[float], ys: Sequence[float]) -> float:
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    if len(xs) < 2 or np.any(ys <= 0):
        return math.nan
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

@dataclass
class RunOutcome:
    out_dir: Path
    n_samples: int
    contaminated: bool
    diagnostics_csv: Path
    trajectory_file: Optional[Path]
    max_radial_sobolev_ratio: float
    morawetz_residual: Optional[float] = None
    morawetz_ratio: Optional[float] = None
    E_Iu_drift: float = 0.0


def cmd_run(cfg: RunConfig, out_dir: Path) -> RunOutcome:
    """Evolve the configured data, writing diagnostics.csv and the trajectory file."""
    out_dir = Path(out_dir)
    prm = i_params(cfg)
    evo = evolution_config(cfg)
    observer = DiagnosticsObserver(prm, evo.dealias_pad)
    traj = evolve(initial_state(cfg), evo, [observer])

    df = rows_frame([rec.as_row() for rec in observer.records], RECORD_COLUMNS)
    csv_path = write_csv(df, out_dir / cfg.output.diagnostics_csv, DiagnosticsRow)
    traj_path = None
    if cfg.output.trajectory:
        traj_path = write_trajectory(out_dir / cfg.output.trajectory_file, traj, cfg.s, cfg.N)
    write_config(cfg, out_dir)

    e_iu = df["E_Iu"].to_numpy()
    outcome = RunOutcome(
        out_dir=out_dir,
        n_samples=len(traj),
        contaminated=traj.contaminated,
        diagnostics_csv=csv_path,
        trajectory_file=traj_path,
        max_radial_sobolev_ratio=float(df["radial_sobolev_ratio"].max()),
        E_Iu_drift=float(np.max(np.abs(e_iu - e_iu[0]))),
    )
    if cfg.diagnostics.morawetz:
        budget = observer.morawetz.budget(contaminated=traj.contaminated)
        outcome.morawetz_residual = budget.residual
        outcome.morawetz_ratio = morawetz_strauss_check(budget, observer.sup_E_Iu).ratio
    if cfg.diagnostics.radial_sobolev and outcome.max_radial_sobolev_ratio > RADIAL_SOBOLEV_BOUND + 1e-3:
        logger.warning(
            "Radial Sobolev ratio %.6g exceeds (4 pi)^(-1/2) = %.6g",
            outcome.max_radial_sobolev_ratio, RADIAL_SOBOLEV_BOUND,
        )
    return outcome


# ---------------------------------------------------------------------------
# sweep-n
# ---------------------------------------------------------------------------

def _sweep_n_point(traj: Trajectory, N: float, s: float, p: float) -> dict:
    prm = IMethodParams(N, s, p)
    drift = mollified_energy_drift(traj, prm)
    budget = morawetz_budget(traj, prm)
    return {
        "row_kind": "N",
        "N": N,
        "delta_E_Iu": drift.delta,
        "E_Iu0": drift.E_Iu0,
        "R1": budget.R1,
        "R2": budget.R2,
    }


@dataclass
class SweepNOutcome:
    path: Path
    rows: list[dict]
    slope: float
    predicted_slope: float
    initial_growth_slope: Optional[float] = None


def cmd_sweep_n(cfg: RunConfig, out_dir: Path, jobs: int = 1) -> SweepNOutcome:
    """sup_t |E(Iu(t)) - E(Iu0)| per N on one evolution, with the fitted log2 slope."""
    data = initial_state(cfg)
    traj = evolve(data, evolution_config(cfg))
    N_list = sorted(float(N) for N in cfg.N_list)
    rows = fan_out(_sweep_n_point, [(traj, N, cfg.s, cfg.p) for N in N_list], jobs)
    rows.sort(key=lambda row: row["N"])

    predicted = -(5.0 - cfg.p) / 2.0
    slope = log2_slope([row["N"] for row in rows], [row["delta_E_Iu"] for row in rows])
    if math.isfinite(slope) and slope > predicted / 2.0:
        logger.warning("Fitted slope %.4g is above the ceiling %.4g", slope, predicted / 2.0)
    elif not math.isfinite(slope):
        logger.info("Slope not applicable for N_list=%s", N_list)
    rows.append({"row_kind": "slope", "slope": slope, "predicted_slope": predicted})

    growth = None
    if len(N_list) >= 2:
        growth = initial_mollified_growth(data, cfg.s, cfg.p, N_list, cfg.evolution.dealias_pad).slope

    path = write_csv(rows_frame(rows, SWEEP_N_COLUMNS), Path(out_dir) / SWEEP_N_CSV, SweepNRow)
    return SweepNOutcome(path, rows, slope, predicted, growth)


# ---------------------------------------------------------------------------
# sweep-p
# ---------------------------------------------------------------------------

def _sweep_p_point(cfg: RunConfig, p: float) -> dict:
    prm = i_params(cfg, p=p)
    evo = evolution_config(cfg, p=p)
    traj = evolve(initial_state(cfg), evo)
    energies = np.array([energy(st, p, evo.dealias_pad) for st in traj.states])
    scale = abs(energies[0]) if energies[0] != 0.0 else 1.0
    drift = mollified_energy_drift(traj, prm)
    budget = morawetz_budget(traj, prm)
    low, high = threshold_branches(p)
    return {
        "p": p,
        "s_c": float(critical_regularity(p)),
        "s_threshold": float(low if p <= 4 else high),
        "energy_drift": float(np.max(np.abs(energies - energies[0]))) / scale,
        "delta_E_Iu": drift.delta,
        "morawetz_ratio": morawetz_strauss_check(budget, max(drift.series)).ratio,
    }


@dataclass
class SweepPOutcome:
    path: Path
    rows: list[dict]


def cmd_sweep_p(cfg: RunConfig, out_dir: Path, jobs: int = 1) -> SweepPOutcome:
    """One evolution per p in p_list: drift, mollified drift and Morawetz ratio."""
    p_list = sorted(float(p) for p in cfg.p_list)
    rows = fan_out(_sweep_p_point, [(cfg, p) for p in p_list], jobs)
    rows.sort(key=lambda row: row["p"])
    path = write_csv(rows_frame(rows, SWEEP_P_COLUMNS), Path(out_dir) / SWEEP_P_CSV, SweepPRow)
    return SweepPOutcome(path, rows)


# ---------------------------------------------------------------------------
# probe-kernel
# ---------------------------------------------------------------------------

def _probe_kernel_point(M: float, pairs: list[AdmissiblePair], n_t: int, probe_T: Optional[float]) -> list[dict]:
    exponent = amplitude = None
    # the fit needs the intermediate regime [2/M, M/2] to be nonempty
    if 2.0 / M < 0.5 * M:
        envelope = decay_envelope_fit(M, n_t=n_t)
        exponent, amplitude = envelope.exponent, envelope.amplitude
    origin = kernel_value(M, 0.0, 0.0)
    rows = []
    for pair in pairs:
        probe = strichartz_probe(M, pair, T=probe_T)
        rows.append({
            "M": M,
            "pair": pair.label,
            "q": pair.q,
            "r": pair.r,
            "m": pair.m,
            "strichartz_ratio": probe.ratio,
            "envelope_exponent": exponent,
            "envelope_amplitude": amplitude,
            "K_M_origin": origin,
        })
    return rows


@dataclass
class ProbeKernelOutcome:
    path: Path
    rows: list[dict]
    strichartz_slopes: dict[str, float] = field(default_factory=dict)


def cmd_probe_kernel(cfg: RunConfig, out_dir: Path, jobs: int = 1) -> ProbeKernelOutcome:
    """Envelope fits, K_M(0, 0) and Strichartz ratios for every M and pair."""
    pairs = probe_pairs(cfg)
    M_list = sorted(float(M) for M in cfg.kernel.M_list)
    chunks = fan_out(
        _probe_kernel_point, [(M, pairs, cfg.kernel.n_t, cfg.kernel.probe_T) for M in M_list], jobs,
    )
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda row: (row["M"], row["m"], row["pair"]))

    slopes = {}
    for pair in pairs:
        mine = [row for row in rows if row["pair"] == pair.label]
        slopes[pair.label] = _fit_loglog([row["M"] for row in mine], [row["strichartz_ratio"] for row in mine])
        logger.info("Strichartz ratio slope vs M for %s: %.4g", pair.label, slopes[pair.label])

    path = write_csv(rows_frame(rows, PROBE_KERNEL_COLUMNS), Path(out_dir) / PROBE_KERNEL_CSV, KernelProbeRow)
    return ProbeKernelOutcome(path, rows, slopes)


# ---------------------------------------------------------------------------
# exponents
# ---------------------------------------------------------------------------

def exponents_payload(p, s) -> dict:
    """ExponentReport of (p, s) with exact rationals where the inputs are exact."""
    report = exponent_report(p, s)
    payload = asdict(report)
    payload["above_threshold"] = report.above_threshold
    payload["holder_identity_defects"] = list(holder_identity_defects(report.p, report.s))
    return payload


def cmd_exponents(p, s, out_dir: Optional[Path] = None) -> dict:
    payload = exponents_payload(p, s)
    if out_dir is not None:
        write_json(payload, Path(out_dir) / EXPONENTS_JSON)
    return payload


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def with_boundary_flags(traj: Trajectory, guard: float) -> Trajectory:
    """Recompute boundary flags for a trajectory read back from disk."""
    flags = []
    for st in traj.states:
        outside = outside_mass_fraction(st.u.values, traj.grid, guard)
        if outside > GUARD_MASS_TOL:
            flags.append(BoundaryFlag(st.t, outside))
    return replace(traj, config=replace(traj.config, boundary_guard=guard), flags=tuple(flags))


def cmd_report(run_dir: Path) -> dict:
    """JSON summary of a finished run: Cauchy report, scattering errors, Morawetz check."""
    run_dir = Path(run_dir)
    cfg = load_config(run_dir / RUN_CONFIG_FILE)
    traj, header = read_trajectory(run_dir / cfg.output.trajectory_file)
    traj = replace(traj, config=replace(traj.config, dealias_pad=cfg.evolution.dealias_pad))
    traj = with_boundary_flags(traj, cfg.evolution.boundary_guard)
    records = pd.read_csv(run_dir / cfg.output.diagnostics_csv)
    prm = i_params(cfg)

    e_iu = records["E_Iu"].to_numpy()
    e_u = records["E_u"].to_numpy()
    payload: dict[str, Any] = {
        "run_dir": str(run_dir),
        "p": header.p,
        "s": header.s,
        "N": header.N,
        "samples": len(traj),
        "T": float(traj.times[-1]),
        "contaminated": traj.contaminated,
        "boundary_flags": len(traj.flags),
        "E_u_drift": float(np.max(np.abs(e_u - e_u[0]))),
        "E_Iu_drift": float(np.max(np.abs(e_iu - e_iu[0]))),
        "max_radial_sobolev_ratio": float(records["radial_sobolev_ratio"].max()),
        "radial_sobolev_bound": RADIAL_SOBOLEV_BOUND,
    }

    if len(traj) >= 2:
        payload["partition"] = [
            asdict(iv) for iv in partition_intervals(traj, prm, cfg.diagnostics.partition_threshold)
        ]

    if cfg.diagnostics.morawetz:
        budget = morawetz_budget(traj, prm)
        check = morawetz_strauss_check(budget, float(np.max(e_iu)))
        payload["morawetz"] = {
            **asdict(budget),
            "residual": budget.residual,
            "strauss_ratio": check.ratio,
        }

    if cfg.diagnostics.scattering:
        payload["scattering"] = _scattering_section(traj, cfg)
    return payload


def _scattering_section(traj: Trajectory, cfg: RunConfig) -> dict:
    scat = extract_scattering_state(traj)
    section: dict[str, Any] = {
        "error_history": [
            {"t": float(t), "error": scattering_error(traj, scat, float(t), cfg.s)} for t in traj.times
        ],
    }
    try:
        checkpoints = cfg.diagnostics.checkpoints or default_checkpoints(traj)
        report = cauchy_report(traj, cfg.s, checkpoints)
    except (SampleTimeError, InsufficientSamplesError) as e:
        logger.warning("Cauchy report skipped: %s", e)
        section["cauchy"] = None
        return section
    section["cauchy"] = {**asdict(report), "strictly_decreasing": report.strictly_decreasing}
    return section


def write_report(run_dir: Path, out_dir: Optional[Path] = None) -> tuple[dict, Path]:
    payload = cmd_report(run_dir)
    path = write_json(payload, Path(out_dir or run_dir) / REPORT_JSON)
    return payload, path
