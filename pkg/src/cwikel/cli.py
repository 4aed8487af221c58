"""Command-line entry point.

Each subcommand assembles an ExperimentConfig, runs it, writes the report
tables (CSV) and optionally plots (SVG); the exit status is nonzero exactly
when an asserted check fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import CwikelError
from .experiments import ExperimentConfig, Report, emit_plots, run


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out-dir", default=".", help="directory for report tables")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plots", action="store_true", help="emit SVG plots")
    p.add_argument("--report-json", default=None, help="also dump the full report as JSON")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cwikel",
                                 description="numerical workbench for critical Cwikel-type estimates")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rearrange", help="decreasing rearrangement of a grid function")
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None, help="CSV path for the step function")
    _add_common(p)

    p = sub.add_parser("cover", help="equal-budget cube covering")
    p.add_argument("--input", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default=None, help="covering JSON path")
    _add_common(p)

    p = sub.add_parser("approx", help="finite-rank approximant error")
    p.add_argument("--input", required=True)
    p.add_argument("--u", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--report", default=None, help="CSV path for the error row")
    _add_common(p)

    p = sub.add_parser("spectrum", help="singular values of the truncated operator")
    p.add_argument("--f", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--out", default=None, help="CSV path for the spectrum")
    _add_common(p)

    p = sub.add_parser("sweep", help="quasi-norm ratio across lattice cutoffs")
    p.add_argument("--f", required=True)
    p.add_argument("--Ns", required=True, help="comma-separated cutoffs")
    _add_common(p)

    p = sub.add_parser("counterexample", help="ball-family growth record")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--ns", default="2,4,8,16", help="comma-separated family sizes")
    p.add_argument("--N", type=int, default=96)
    p.add_argument("--resolution", type=int, default=None)
    p.add_argument("--out", default=None, help="CSV path for the growth record")
    _add_common(p)

    p = sub.add_parser("equivalence", help="split norm vs right-hand-side norm")
    p.add_argument("--f", required=True)
    p.add_argument("--out", default=None, help="JSON path for the comparison")
    _add_common(p)

    p = sub.add_parser("bs-count", help="eigenvalue counting identity")
    p.add_argument("--f", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--N", type=int, default=6)
    _add_common(p)

    p = sub.add_parser("report", help="run an experiment config file end to end")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None, help="override the config's out_dir")
    p.add_argument("--plots", action="store_true")
    p.add_argument("--report-json", default=None)
    return ap


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    cmd = args.command
    if cmd == "report":
        cfg = ExperimentConfig.from_json(args.config)
        if args.out_dir:
            cfg.out_dir = args.out_dir
        return cfg
    inputs, params = {}, {}
    if cmd == "rearrange":
        inputs["f"] = args.input
    elif cmd == "cover":
        inputs["f"] = args.input
        params = {"n": args.n}
        if args.out:
            params["out"] = args.out
    elif cmd == "approx":
        inputs = {"f": args.input, "u": args.u}
        params = {"n": args.n}
    elif cmd == "spectrum":
        inputs["f"] = args.f
        params = {"N": args.N, "p": args.p}
    elif cmd == "sweep":
        inputs["f"] = args.f
        params = {"Ns": [int(x) for x in args.Ns.split(",")]}
    elif cmd == "counterexample":
        params = {"d": args.d, "ns": [int(x) for x in args.ns.split(",")],
                  "N": args.N}
        if args.resolution:
            params["resolution"] = args.resolution
    elif cmd == "equivalence":
        inputs["f"] = args.f
        if args.out:
            params["out"] = args.out
    elif cmd == "bs-count":
        inputs["f"] = args.f
        params = {"t": args.t, "N": args.N}
    return ExperimentConfig(kind=cmd, inputs=inputs, params=params,
                            seed=getattr(args, "seed", 0),
                            out_dir=args.out_dir or ".")


def _write_named_output(args: argparse.Namespace, report: Report) -> None:
    """Honor the per-subcommand --out/--report shortcuts."""
    out = getattr(args, "out", None) or getattr(args, "report", None)
    if not out:
        return
    table_for = {"rearrange": "mu", "spectrum": "spectrum",
                 "counterexample": "growth", "approx": "errors"}
    name = table_for.get(args.command)
    if name and name in report.tables:
        header, rows = report.tables[name]
        with open(out, "w") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(repr(x) if isinstance(x, float) else str(x)
                                  for x in row) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = run(cfg)
        report.write_tables(cfg.out_dir)
        if args.command not in ("cover", "equivalence"):  # these write via params
            _write_named_output(args, report)
        if getattr(args, "plots", False):
            emit_plots(report, cfg.out_dir)
        if getattr(args, "report_json", None):
            report.to_json(args.report_json)
        for line in report.summary_lines():
            print(line)
    except CwikelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 1 if report.failed() else 0


if __name__ == "__main__":
    sys.exit(main())
