"""Command-line entry point: ``rydberg-w <experiment> [options]``.

Exit codes: 0 success, 2 configuration error, 3 solver failure outside a
sweep (sweeps record failed points as NaN rows instead).
"""

from __future__ import annotations

import argparse
import logging
import sys
import time

import numpy as np

from .exceptions import ConfigError, RydbergWError
from .experiments import EXPERIMENTS, default_config, load_config, run_experiment, write_csv

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydberg-w",
        description="Reproduce the dissipative W-state preparation experiments as CSV data.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="experiment")
    helps = {
        "fig3a": "steady-state fidelity over (delta, omega)",
        "fig3b": "steady-state fidelity over (kappa, gamma_e)",
        "fig3c": "fidelity against time, full and effective models",
        "urp-sweep": "fidelity and purity against u_rp",
        "expt-table": "the three experimental parameter sets",
        "custom": "any config file (single point or grid)",
    }
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", metavar="PATH", help="JSON experiment config")
        p.add_argument("--out", metavar="PATH", help="CSV output path (default <experiment>.csv)")
        p.add_argument("--workers", type=int, default=1, metavar="N", help="parallel sweep workers")
        p.add_argument("--solver", choices=("nullspace", "longtime"), help="steady-state method")
        p.add_argument("--tol", type=float, metavar="X", help="solver tolerance")
        p.add_argument("--nc", type=int, metavar="N", help="cavity photon levels")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _resolve_config(args):
    config = load_config(args.config) if args.config else default_config(args.experiment)
    if config.experiment != args.experiment:
        raise ConfigError(
            f"config is for experiment {config.experiment!r}, not {args.experiment!r}"
        )
    changes = {}
    if args.solver:
        changes["solver"] = args.solver
    if args.tol is not None:
        changes["tol"] = args.tol
    if args.nc is not None:
        changes["params"] = {**config.params, "n_c": args.nc}
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")
    return config.replace(**changes) if changes else config


def _summary(result, path, elapsed) -> str:
    lines = [f"{result.meta['experiment']}: {len(result.rows)} rows -> {path} ({elapsed:.1f} s)"]
    for name in ("fidelity", "fidelity_eff", "fidelity_full"):
        if name in result.columns:
            col = np.array([np.nan if v in (None, "") else v for v in
                            (r[result.columns.index(name)] for r in result.rows)], dtype=float)
            if np.isfinite(col).any():
                lines.append(f"  {name}: max {np.nanmax(col):.6f}, min {np.nanmin(col):.6f}")
    if "error" in result.columns:
        failed = sum(1 for r in result.rows if r[result.columns.index("error")])
        if failed:
            lines.append(f"  {failed} point(s) failed; see the error column")
    return "\n".join(lines)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = _resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or config.output or f"{config.experiment}.csv"
    t0 = time.perf_counter()
    try:
        result = run_experiment(config, workers=args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RydbergWError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    write_csv(result, out)
    print(_summary(result, out, time.perf_counter() - t0))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
