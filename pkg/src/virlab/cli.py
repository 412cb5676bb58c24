"""``vir-lab`` command line.

    vir-lab run <descriptor.json> [--seed N] [--out DIR]
    vir-lab list
    vir-lab validate <descriptor.json>

Exit codes: 0 when every verdict passes, 2 when some invariant fails,
1 on invalid input or a runtime error.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import experiments as ex
from .errors import DescriptorInvalid, VirLabError

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise DescriptorInvalid(f"cannot read descriptor {path}: {e}") from e


def _cmd_run(args) -> int:
    data = _load(args.descriptor)
    if args.seed is not None and isinstance(data, dict):
        data = {**data, "seed": args.seed}
    d = ex.RunDescriptor.from_json(data)
    try:
        report = ex.run(d, args.out)
    except (VirLabError, ValueError, ArithmeticError, RuntimeError) as e:
        print(f"vir-lab: experiment {d.experiment} failed: {type(e).__name__}: {e}",
              file=sys.stderr)
        return EXIT_ERROR
    for k, v in report.summary.items():
        print(f"{k}: {v}")
    for k, ok in report.verdicts.items():
        print(f"[{'PASS' if ok else 'FAIL'}] {k}")
    print(f"csv: {report.csv_path}  ({report.wall_time:.2f} s)")
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_list(args) -> int:
    cat = ex.list_experiments()
    if args.json:
        print(json.dumps(cat, indent=2))
        return EXIT_OK
    for name, entry in cat.items():
        print(f"{name}: {entry['description']}")
        print("  defaults: " + json.dumps(entry["defaults"]))
        print("  schema:   " + json.dumps(entry["schema"]))
    return EXIT_OK


def _cmd_validate(args) -> int:
    d = ex.RunDescriptor.from_json(_load(args.descriptor))
    print(f"ok: {d.experiment}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vir-lab", description="Virasoro numerics lab")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="execute a run descriptor")
    r.add_argument("descriptor")
    r.add_argument("--seed", type=int, default=None, help="override the descriptor seed")
    r.add_argument("--out", default=None, help="output directory (beats $VIR_LAB_OUT)")
    r.set_defaults(func=_cmd_run)
    ls = sub.add_parser("list", help="print experiments, schemas and defaults")
    ls.add_argument("--json", action="store_true", help="machine-readable catalog")
    ls.set_defaults(func=_cmd_list)
    v = sub.add_parser("validate", help="check a descriptor against its schema")
    v.add_argument("descriptor")
    v.set_defaults(func=_cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DescriptorInvalid as e:
        print(f"vir-lab: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
