"""Batch front end: files in, canonical JSON reports out.

Exit codes: 0 all checks passed, 1 a check failed, 2 invalid input.
Reports are deterministic for identical inputs and seed; floats use 17
significant digits and non-finite values appear as quoted strings.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

import numpy as np
from pydantic import ValidationError

from .gridcheck import write_grid
from .service.handlers import (
    InputError,
    run_analyze,
    run_check,
    run_cones,
    run_decompose,
    run_linear,
    run_regularize,
)
from .service.schemas import (
    AnalyzeRequest,
    CheckRequest,
    ConesRequest,
    DecomposeRequest,
    GridPayload,
    LinearRequest,
    OperatorFile,
    PointsFile,
    RegularizeRequest,
    SetFile,
    SpecFile,
)

__all__ = ["main", "canonical_json"]


def canonical_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if x == math.inf:
            return '"inf"'
        if x == -math.inf:
            return '"-inf"'
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return canonical_json(obj.tolist(), indent)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [
            f"{inner}{json.dumps(str(k))}: {canonical_json(v, indent + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = [f"{inner}{canonical_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc


def _model(cls, payload: dict, path: str):
    try:
        return cls.model_validate(payload)
    except ValidationError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _grid_payload(path: str) -> GridPayload:
    from .gridcheck import read_grid

    try:
        u = read_grid(path)
    except (OSError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc

    def encode(a):
        if a.ndim == 1:
            return ["-inf" if v == -np.inf else float(v) for v in a]
        return [encode(row) for row in a]

    return GridPayload(
        origin=[float(v) for v in u.origin],
        spacing=[float(v) for v in u.spacing],
        values=encode(u.values),
    )


def _radii(text: Optional[str]) -> list:
    if not text:
        raise InputError("--radii is required (comma-separated, decreasing)")
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise InputError(f"bad radii list {text!r}") from exc


def _need_seed(seed: Optional[int]) -> int:
    if seed is None:
        raise InputError("--seed is required for sampling commands")
    return seed


def _emit(report: dict, out: Optional[str]) -> None:
    text = canonical_json(report) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jetcones",
        description="Convex jet-space constraint analysis and subharmonicity checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--eps", type=float, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--radii", type=str, default=None)
        p.add_argument("--out", type=str, default=None)

    p = sub.add_parser("analyze", help="validate a constraint spec and describe it")
    p.add_argument("spec")
    common(p)

    p = sub.add_parser("cones", help="polar/recession/edge report for a flat set")
    p.add_argument("set")
    common(p)

    p = sub.add_parser("check", help="membership check of a grid function")
    p.add_argument("spec")
    p.add_argument("grid")
    p.add_argument("mode", choices=["c2", "visc", "dist"])
    common(p)

    p = sub.add_parser("regularize", help="running-maximum upper envelope of a grid")
    p.add_argument("grid")
    common(p)

    p = sub.add_parser("linear", help="three-route harness for a linear operator")
    p.add_argument("operator")
    p.add_argument("battery", nargs="?", default="all")
    common(p)

    p = sub.add_parser("decompose", help="stable half-space decomposition test")
    p.add_argument("spec")
    p.add_argument("points")
    common(p)
    return parser


def main(argv: Optional[list] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "analyze":
            spec = _model(SpecFile, _load_json(args.spec), args.spec)
            req = AnalyzeRequest(
                spec=spec, seed=_need_seed(args.seed), samples=args.samples or 8
            )
            report, ok = run_analyze(req, paths={"spec": args.spec})
        elif args.command == "cones":
            fset = _model(SetFile, _load_json(args.set), args.set)
            req = ConesRequest.model_validate(
                {
                    "set": fset,
                    "seed": _need_seed(args.seed),
                    "samples": args.samples or 50,
                    "tol": args.tol if args.tol is not None else 1e-9,
                }
            )
            report, ok = run_cones(req, paths={"set": args.set})
        elif args.command == "check":
            spec = _model(SpecFile, _load_json(args.spec), args.spec)
            grid = _grid_payload(args.grid)
            req = CheckRequest(
                spec=spec,
                grid=grid,
                mode=args.mode,
                seed=args.seed,
                tol=args.tol,
                eps=args.eps,
                samples=args.samples or 8,
            )
            report, ok = run_check(req, paths={"spec": args.spec, "grid": args.grid})
        elif args.command == "regularize":
            grid = _grid_payload(args.grid)
            if not args.out:
                raise InputError("--out is required: destination for the envelope grid")
            req = RegularizeRequest(grid=grid, radii=_radii(args.radii))
            report, ok, tight = run_regularize(req, paths={"grid": args.grid})
            write_grid(tight, args.out)
            sys.stdout.write(canonical_json(report) + "\n")
            return 0 if ok else 1
        elif args.command == "linear":
            operator = _model(OperatorFile, _load_json(args.operator), args.operator)
            req = LinearRequest(
                operator=operator,
                battery=args.battery,
                seed=_need_seed(args.seed),
                eps=args.eps,
                samples=args.samples or 4,
            )
            report, ok = run_linear(req, paths={"operator": args.operator})
        else:
            spec = _model(SpecFile, _load_json(args.spec), args.spec)
            points = _model(PointsFile, _load_json(args.points), args.points)
            req = DecomposeRequest(
                spec=spec,
                jets=points.jets,
                seed=_need_seed(args.seed),
                samples=args.samples or 16,
                tol=args.tol if args.tol is not None else 1e-9,
            )
            report, ok = run_decompose(
                req, paths={"spec": args.spec, "points": args.points}
            )
    except (InputError, ValidationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    _emit(report, args.out)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
