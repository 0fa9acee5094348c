"""Command line front end: torifan <command> --cone cone.json ..."""

from __future__ import annotations

import argparse
import json
import sys

from .cones import ConeError
from .deltafan import BudgetExceeded, InvariantViolation
from .report import COMMANDS, NEEDS_W, RequestError, dumps, parse_request, run_report

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_INTERNAL = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="torifan", description="Exact analysis of affine toric cones.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--cone", required=True, help="JSON file with rank and rays")
    p.add_argument("--w", help="comma-separated weight vector, e.g. 1,2,2")
    p.add_argument("--fan", help="JSON file with rank, rays and cones (ray indices)")
    p.add_argument("--svg", help="write a cross-section of the computed fan here")
    p.add_argument("--grid-l", type=int, help="cross-check fingerprints on the (1/l) grid")
    p.add_argument("--budget", type=int, help="cell budget for the fan computation")
    p.add_argument("--height-bound", type=int, help="height bound for S_sigma enumeration")
    p.add_argument("--out", help="report path (default: standard output)")
    return p


def _request_text(args) -> str:
    with open(args.cone, encoding="utf-8") as fh:
        doc = json.load(fh, parse_float=lambda s: s)
    if not isinstance(doc, dict):
        raise RequestError("cone file: expected an object")
    cmd: dict = {"name": args.command}
    if args.command in NEEDS_W:
        if not args.w:
            raise RequestError(f"--w is required for {args.command}")
        try:
            cmd["w"] = [int(x) for x in args.w.split(",")]
        except ValueError:
            raise RequestError(f"--w: bad vector {args.w!r}") from None
    doc["commands"] = [cmd]
    if args.fan:
        with open(args.fan, encoding="utf-8") as fh:
            doc["fan"] = json.load(fh, parse_float=lambda s: s)
    opts = dict(doc.get("options", {}))
    if args.svg:
        opts["svg_path"] = args.svg
    if args.grid_l is not None:
        opts["grid_l"] = args.grid_l
    if args.budget is not None:
        opts["cell_budget"] = args.budget
    if args.height_bound is not None:
        opts["height_bound"] = args.height_bound
    doc["options"] = opts
    return json.dumps(doc)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        req = parse_request(_request_text(args))
        if args.svg and args.command not in ("delta", "report"):
            raise RequestError("--svg needs the delta or report command")
        report = run_report(req)
    except (RequestError, ConeError, OSError, json.JSONDecodeError) as exc:
        print(f"torifan: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"torifan: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvariantViolation, AssertionError) as exc:
        print(f"torifan: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    text = dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "delta" and report.get("delta", {}).get("status") == "skipped":
        print(f"torifan: budget exceeded: {report['delta']['reason']}", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
