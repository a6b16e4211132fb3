"""
Command-line entry point for the NLKG simulator.

Usage:
    python run_nlkg.py run --config cfg.yaml --out out/
    python run_nlkg.py sweep-n --config cfg.yaml --jobs 4
    python run_nlkg.py sweep-p --config cfg.yaml --jobs 3
    python run_nlkg.py probe-kernel --config cfg.yaml
    python run_nlkg.py exponents --p 4 --s 11/12
    python run_nlkg.py report out/

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
NLKG_LOG=DEBUG|INFO|WARNING|ERROR sets the log level (default INFO).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from src.nlkg.errors import (
    AdmissibilityError,
    ConfigError,
    ExponentRangeError,
    NlkgError,
)
from src.nlkg.experiments import (
    cmd_exponents,
    cmd_probe_kernel,
    cmd_run,
    cmd_sweep_n,
    cmd_sweep_p,
    jsonable,
    write_report,
)
from src.nlkg.io.config_loader import load_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def configure_logging() -> None:
    name = os.environ.get("NLKG_LOG", "INFO").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s")


@contextmanager
def step(name: str):
    print(f"\n--- {name} ---")
    start = time.time()
    yield
    print(f"Completed: {name} ({time.time() - start:.1f}s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Radial 3D defocusing NLKG simulator and I-method diagnostics.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="YAML run configuration (defaults when omitted)")
    common.add_argument("--out", type=Path, default=None, help="Output directory (overrides output.dir)")
    common.add_argument("--jobs", type=int, default=1, help="Worker processes for sweeps (default: 1)")
    common.add_argument("--seed", type=int, default=None, help="Overrides data.seed")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="Evolve and write diagnostics.csv + trajectory file")
    sub.add_parser("sweep-n", parents=[common], help="Almost conservation sweep over N_list")
    sub.add_parser("sweep-p", parents=[common], help="One evolution per p in p_list")
    sub.add_parser("probe-kernel", parents=[common], help="Dispersive kernel and Strichartz probes")
    exps = sub.add_parser("exponents", parents=[common], help="Closed-form exponents for (p, s)")
    exps.add_argument("--p", default=None, help="Exponent p, e.g. 4 or 9/2 (defaults to the config)")
    exps.add_argument("--s", default=None, help="Regularity s, e.g. 11/12 (defaults to the config)")
    rep = sub.add_parser("report", parents=[common], help="JSON summary of a finished run directory")
    rep.add_argument("run_dir", type=Path, nargs="?", default=None, help="Run directory (defaults to --out)")
    return parser


def _out_dir(args, cfg) -> Path:
    return args.out if args.out is not None else Path(cfg.output.dir)


def _print_header(command: str) -> None:
    print("=" * 60)
    print(f"NLKG Simulator: {command}")
    print("=" * 60)


def dispatch(args) -> None:
    if args.command == "exponents" and args.p is not None and args.s is not None:
        cfg = None
    else:
        with step("Configuration"):
            cfg = load_config(args.config, seed=args.seed)

    if args.command == "run":
        with step("Evolution + diagnostics"):
            outcome = cmd_run(cfg, _out_dir(args, cfg))
        print(f"Samples: {outcome.n_samples}{' (boundary-contaminated)' if outcome.contaminated else ''}")
        print(f"sup |E(Iu(t)) - E(Iu0)|: {outcome.E_Iu_drift:.6e}")
        if outcome.morawetz_residual is not None:
            print(f"Morawetz residual: {outcome.morawetz_residual:.6e}  ratio: {outcome.morawetz_ratio:.6g}")
        print(f"Wrote: {outcome.diagnostics_csv}")
        if outcome.trajectory_file is not None:
            print(f"Wrote: {outcome.trajectory_file}")

    elif args.command == "sweep-n":
        with step("Almost conservation sweep"):
            outcome = cmd_sweep_n(cfg, _out_dir(args, cfg), jobs=args.jobs)
        print(f"Fitted log2 slope: {outcome.slope:.4g} (predicted {outcome.predicted_slope:.4g})")
        if outcome.initial_growth_slope is not None:
            print(f"E(Iu0) growth slope: {outcome.initial_growth_slope:.4g}")
        print(f"Wrote: {outcome.path}")

    elif args.command == "sweep-p":
        with step("p sweep"):
            outcome = cmd_sweep_p(cfg, _out_dir(args, cfg), jobs=args.jobs)
        print(f"Rows: {len(outcome.rows)}")
        print(f"Wrote: {outcome.path}")

    elif args.command == "probe-kernel":
        with step("Kernel probes"):
            outcome = cmd_probe_kernel(cfg, _out_dir(args, cfg), jobs=args.jobs)
        for label, slope in outcome.strichartz_slopes.items():
            print(f"Strichartz slope {label}: {slope:.4g}")
        print(f"Wrote: {outcome.path}")

    elif args.command == "exponents":
        # repr keeps config floats as their decimal text, so Fraction parsing is exact
        p = args.p if args.p is not None else repr(cfg.p)
        s = args.s if args.s is not None else repr(cfg.s)
        out = args.out if args.out is not None else (Path(cfg.output.dir) if cfg is not None else None)
        with step("Exponent report"):
            payload = cmd_exponents(p, s, out)
        print(json.dumps(jsonable(payload), indent=2, sort_keys=True))

    elif args.command == "report":
        run_dir = args.run_dir or _out_dir(args, cfg)
        with step("Run report"):
            _, path = write_report(run_dir, args.out)
        print(f"Wrote: {path}")


def main(argv: Optional[list[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("FAILED: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG

    _print_header(args.command)
    try:
        dispatch(args)
    except ValidationError as e:
        for err in e.errors():
            field = ".".join(str(part) for part in err["loc"]) or "config"
            print(f"FAILED: config error in {field}: {err['msg']}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, ExponentRangeError, AdmissibilityError) as e:
        print(f"FAILED: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"FAILED: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except (NlkgError, ArithmeticError) as e:
        print(f"FAILED: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as e:
        print(f"FAILED: bad argument: {e}", file=sys.stderr)
        return EXIT_CONFIG

    print("\n" + "=" * 60)
    print(f"{args.command} complete.")
    print("=" * 60)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
