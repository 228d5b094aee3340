"""Command-line entry point: ``varlp <experiment> [--config ...]``, ``list``, ``check``.

Exit codes: 0 success, 1 configuration error, 2 a numerical sentinel
(inf/nan cell) under ``--strict`` or a failed acceptance criterion.
"""

from __future__ import annotations

import argparse
import os
import sys

from .experiments import EXPERIMENTS
from .harness import ConfigError, emit, load_config, run_experiment

OUT_DIR_ENV = "VARLP_OUT_DIR"


def _parser():
    ap = argparse.ArgumentParser(prog="varlp", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list experiments and what they test")
    chk = sub.add_parser("check", help="run the acceptance criteria")
    chk.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    for eid, exp in EXPERIMENTS.items():
        p = sub.add_parser(eid, help=exp.summary)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--strict", action="store_true",
                       help="exit 2 when the table contains inf/nan cells")
    return ap


def _out_path(path):
    base = os.environ.get(OUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list":
        wid = max(map(len, EXPERIMENTS))
        wan = max(len(e.anchor) for e in EXPERIMENTS.values())
        for eid, exp in EXPERIMENTS.items():
            print(f"{eid:{wid}s}  {exp.anchor:{wan}s}  {exp.summary}")
        return 0
    if args.command == "check":
        from .acceptance import run_all
        results = run_all(args.only)
        for r in results:
            print(r.line())
        return 0 if all(r.passed for r in results) else 2
    try:
        cfg = load_config(args.config, args.command, args.seed)
    except ConfigError as e:
        for field, msg in e.errors:
            print(f"config error: {field}: {msg}", file=sys.stderr)
        return 1
    table = run_experiment(cfg)
    data = emit(table, args.format)
    out = args.out or cfg.output
    if out:
        try:
            with open(_out_path(out), "wb") as fh:
                fh.write(data)
        except OSError as e:
            print(f"cannot write output: {e}", file=sys.stderr)
            return 1
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    if args.strict and table.has_sentinel():
        print("numerical sentinel (inf/nan) in results", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
