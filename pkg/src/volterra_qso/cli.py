"""Command-line interface.

Exit codes: 0 ok, 2 input error, 3 a classification contradicts the
transitivity theorem, 4 random sampling budget exhausted, 5 request outside
the supported scope.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile

import numpy as np

from .dynamics import TrialBudget, cesaro_series, classify_operator, iterate, orbit
from .errors import QsoError, SamplingBudgetExceeded, UnsupportedDimension, UnsupportedPeriod
from .fixed_points import enumerate_fixed_points, find_periodic_points
from .operators import (
    MAX_REJECTIONS,
    QsoTensor,
    VolterraMatrix,
    counterexample_operator,
    dumps_operator,
    load_operator,
    random_transversal,
    tensor_to_volterra,
)
from .simplex import format_float, make_point, sample_uniform
from .tournament import extract_tournament, is_transitive

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INCONSISTENT = 3
EXIT_BUDGET = 4
EXIT_SCOPE = 5


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{to_json(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return "null"
        return format_float(obj)
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_atomic(path, text: str):
    """Write via a temporary file and rename; ``None`` or ``-`` means stdout."""
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    if os.path.exists(path) and not os.path.isfile(path):
        # devices and pipes cannot be replaced by a rename
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_volterra(path) -> VolterraMatrix:
    op = load_operator(path)
    if isinstance(op, QsoTensor):
        op = tensor_to_volterra(op)
    return op


def _parse_x0(text: str, m: int, seed: int):
    if text.startswith("face:"):
        face = [int(s) for s in text[5:].split(",") if s.strip()]
        return sample_uniform(m, face, seed)
    try:
        coords = [float(s) for s in text.split(",")]
    except ValueError:
        raise QsoError(f"cannot parse --x0 {text!r}") from None
    if len(coords) != m:
        raise QsoError(f"--x0 has {len(coords)} coordinates, operator has m = {m}")
    return make_point(coords)


def _csv(rows, header) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(r) for r in rows)
    return "\n".join(lines) + "\n"


# -- commands ----------------------------------------------------------------

def cmd_classify(args) -> int:
    v = _load_volterra(args.input)
    budget = TrialBudget(n_starts=args.starts, n_pairs=args.pairs, max_steps=args.iters, eps=args.eps,
                         window=args.window, seed=args.seed)
    report = classify_operator(v, budget)
    write_atomic(args.output, to_json(report.to_dict()) + "\n")
    emp = ", ".join(f"{k}={c.verdict.value}" for k, c in report.empirical.items())
    print(f"transitive={str(report.transitive).lower()} fixed_points={len(report.fixed_points)} {emp} "
          f"consistency_ok={str(report.consistency_ok).lower()}", file=sys.stderr)
    return EXIT_OK if report.consistency_ok else EXIT_INCONSISTENT


def cmd_simulate(args) -> int:
    v = _load_volterra(args.input)
    x0 = _parse_x0(args.x0, v.m, args.seed)
    rep = iterate(v, x0, args.iters, args.eps, args.window, args.stride)
    header = ["n"] + [f"x{k}" for k in range(1, v.m + 1)]
    rows = [[str(n)] + p.csv_fields() for n, p in rep.sampled_states]
    write_atomic(args.output, _csv(rows, header))
    if args.cesaro_order >= 1:
        means = cesaro_series(orbit(v, x0, args.iters), args.cesaro_order)
        total = means.shape[0]
        marks = sorted({1, total, *range(args.stride, total + 1, args.stride)})
        crows = []
        for n in marks:
            for j in range(args.cesaro_order):
                crows.append([str(n), str(j + 1)] + [format_float(c) for c in means[n - 1, j]])
        target = args.cesaro_output
        if target is None:
            target = "-" if args.output in (None, "-") else _sibling(args.output, ".cesaro")
        write_atomic(target, _csv(crows, ["n", "order"] + header[1:]))
    summary = f"verdict={rep.verdict.value} steps_run={rep.steps_run} max_late_step={format_float(rep.max_late_step)}"
    if rep.converged_at is not None:
        summary += f" converged_at={rep.converged_at} limit={','.join(rep.limit_candidate.csv_fields())}"
    if rep.underflow:
        summary += " underflow=true"
    print(summary, file=sys.stderr)
    return EXIT_OK


def _sibling(path: str, tag: str) -> str:
    root, ext = os.path.splitext(path)
    return f"{root}{tag}{ext or '.csv'}"


def cmd_random(args) -> int:
    if not 2 <= args.m <= 20:
        print(f"error: m must lie in [2, 20], got {args.m}", file=sys.stderr)
        return EXIT_INPUT
    rng = np.random.default_rng(args.seed)
    total = 0
    mismatched = 0
    while True:
        try:
            v, rejected = random_transversal(args.m, rng)
        except SamplingBudgetExceeded as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BUDGET
        total += rejected
        if args.require_transitive is None or is_transitive(extract_tournament(v)) == args.require_transitive:
            break
        mismatched += 1
        if mismatched >= MAX_REJECTIONS:
            print(f"error: no operator with transitive={args.require_transitive} after {mismatched} draws",
                  file=sys.stderr)
            return EXIT_BUDGET
    write_atomic(args.output, dumps_operator(v))
    print(f"transversality_rejections={total} transitivity_rejections={mismatched}", file=sys.stderr)
    return EXIT_OK


def cmd_counterexample(args) -> int:
    write_atomic(args.output, dumps_operator(counterexample_operator()))
    return EXIT_OK


def cmd_fixed_points(args) -> int:
    v = _load_volterra(args.input)
    out = {"fixed_points": [r.to_dict() for r in enumerate_fixed_points(v)]}
    if args.period is not None:
        try:
            pts = find_periodic_points(v, args.period, args.grid_step)
        except (UnsupportedDimension, UnsupportedPeriod) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_SCOPE
        out["periodic"] = {"period": args.period, "grid_step": args.grid_step,
                           "points": [p.coords.tolist() for p in pts]}
    write_atomic(args.output, to_json(out) + "\n")
    return EXIT_OK


def _bool(text: str) -> bool:
    if text.lower() in ("true", "1", "yes"):
        return True
    if text.lower() in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="volterra-qso", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="transitivity plus empirical regularity checks")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=100_000)
    p.add_argument("--eps", type=float, default=1e-9)
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--starts", type=int, default=10)
    p.add_argument("--pairs", type=int, default=10)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("simulate", help="iterate one orbit and write CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--x0", required=True, help="coordinates 'x1,...,xm' or 'face:i,j,...'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=100_000)
    p.add_argument("--eps", type=float, default=1e-9)
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--stride", type=int, default=1000)
    p.add_argument("--cesaro-order", type=int, default=0)
    p.add_argument("--cesaro-output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("random", help="write a random transversal operator")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.add_argument("--require-transitive", type=_bool, default=None, metavar="{true,false}")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("counterexample", help="write the cyclic operator on S^2")
    p.add_argument("--output")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("fixed-points", help="enumerate fixed points, optionally search periodic orbits")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--period", type=int)
    p.add_argument("--grid-step", type=float, default=0.02)
    p.set_defaults(func=cmd_fixed_points)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (QsoError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
