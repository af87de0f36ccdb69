"""Command handlers shared by the HTTP app and the CLI front end.

Each handler maps a validated request model to a plain report dict with
the fixed top-level shape {command, inputs, seed, verdicts, witnesses,
timings} plus an overall pass flag.  Bad payloads raise InputError so
both front ends can translate them to the same failure surface.
"""

from __future__ import annotations

import time
from typing import Optional

import numpy as np

from ..cones import (
    EmptySetError,
    GeneratedCone,
    HalfSpaceList,
    OracleSet,
    bipolar_roundtrip,
    dual_span,
    edge,
    parabola_region,
    polar_cone,
    recession_cone,
    stab_membership,
    support_infimum,
)
from ..gridcheck import (
    GridFunction,
    c2_membership,
    distributional_check,
    ess_limsup,
    viscosity_check,
)
from ..jets import (
    Jet2,
    JetHalfSpace,
    JetOperator,
    SymMatrix,
    jacobi_eigensystem,
    jet_to_vec,
    min_eigenvalue,
    sym_dim,
)
from ..linearcase import (
    POLE_CLEARANCE,
    EllipticOperator,
    equivalence_harness,
    linear_battery,
)
from ..subequations import (
    SpecDomainError,
    SubequationSpec,
    decomposition_check,
    laplacian_spec,
    psd_spec,
    sample_stable,
    second_order_complete,
    validate,
)
from .schemas import (
    AnalyzeRequest,
    CheckRequest,
    ConesRequest,
    DecomposeRequest,
    GridPayload,
    LinearRequest,
    OperatorFile,
    RegularizeRequest,
    SetFile,
    SpecFile,
)

__all__ = [
    "InputError",
    "spec_from_model",
    "operator_from_model",
    "set_from_model",
    "grid_from_payload",
    "run_analyze",
    "run_cones",
    "run_check",
    "run_regularize",
    "run_linear",
    "run_decompose",
]


class InputError(ValueError):
    """Invalid input that should surface as exit code 2 / HTTP 400."""


def _floats(x) -> list:
    return [float(v) for v in np.asarray(x, dtype=float).reshape(-1)]


def _columns(basis: np.ndarray) -> list:
    return [_floats(basis[:, j]) for j in range(basis.shape[1])]


def _full_from_upper(n: int, entries) -> np.ndarray:
    entries = [float(v) for v in entries]
    if len(entries) != sym_dim(n):
        raise InputError(
            f"curvature upper triangle needs {sym_dim(n)} entries, got {len(entries)}"
        )
    out = np.zeros((n, n))
    k = 0
    for i in range(n):
        for j in range(i, n):
            out[i, j] = entries[k]
            out[j, i] = entries[k]
            k += 1
    return out


def spec_from_model(m: SpecFile) -> SubequationSpec:
    if m.n < 1:
        raise InputError("spec dimension must be positive")
    try:
        if m.kind == "builtin_laplacian":
            return laplacian_spec(m.n)
        if m.kind == "builtin_psd":
            return psd_spec(m.n)
        if m.kind == "builtin_parabola_a9":
            return SubequationSpec(m.n, "builtin_parabola_a9", name=m.name)
        halves = []
        for entry in m.halfspaces:
            if len(entry.b) != m.n:
                raise InputError("drift coefficient has wrong dimension")
            a = SymMatrix.from_full(_full_from_upper(m.n, entry.a))
            op = JetOperator(entry.c, np.asarray(entry.b, dtype=float), a)
            halves.append(JetHalfSpace(op, entry.level))
        return SubequationSpec(m.n, "halfspace_list", halves, name=m.name)
    except SpecDomainError as exc:
        raise InputError(str(exc)) from exc


def operator_from_model(m: OperatorFile) -> tuple:
    if m.n != 2:
        raise InputError("linear operators are supported in dimension 2 only")
    try:
        op = EllipticOperator(np.asarray(m.a, dtype=float), b=m.b, c=m.c, floor=m.floor)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return op, float(m.level)


def set_from_model(m: SetFile):
    if m.kind == "builtin_parabola_a9":
        if m.d != 2:
            raise InputError("the plane fixture lives in dimension 2")
        return parabola_region()
    if m.kind == "generators":
        if not m.generators:
            raise InputError("a generated cone needs at least one ray")
        try:
            return GeneratedCone(m.d, [np.asarray(g, dtype=float) for g in m.generators])
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    if not m.halfspaces:
        raise InputError("a half-space set needs at least one constraint")
    try:
        f = HalfSpaceList(m.d, [(h.normal, h.offset) for h in m.halfspaces])
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if f.is_empty():
        raise InputError("the constraint set is empty")
    return f


def grid_from_payload(p: GridPayload) -> GridFunction:
    def convert(v):
        if isinstance(v, str):
            if v == "-inf":
                return -np.inf
            raise InputError(f"unrecognized grid value {v!r}")
        if isinstance(v, (int, float)):
            return float(v)
        return [convert(w) for w in v]

    try:
        values = np.asarray(convert(p.values), dtype=float)
    except InputError:
        raise
    except (TypeError, ValueError) as exc:
        raise InputError(f"ragged or non-numeric grid values: {exc}") from exc
    spacing = p.spacing if isinstance(p.spacing, list) else [p.spacing] * values.ndim
    try:
        return GridFunction(p.origin, spacing, values)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _spec_summary(m: SpecFile) -> dict:
    return {"n": m.n, "kind": m.kind, "halfspaces": len(m.halfspaces)}


def _op_report(op: JetOperator, level: float) -> dict:
    return {
        "c": float(op.c),
        "b": _floats(op.b),
        "a": [[float(v) for v in row] for row in op.a.full()],
        "level": float(level),
    }


def _clock(start: float, enabled: bool) -> Optional[dict]:
    if not enabled:
        return None
    return {"total_seconds": time.perf_counter() - start}


# ---------------------------------------------------------------------------
# analyze


def run_analyze(req: AnalyzeRequest, paths: Optional[dict] = None) -> tuple:
    start = time.perf_counter()
    spec = spec_from_model(req.spec)
    rng = np.random.default_rng(req.seed)
    try:
        axioms = validate(spec, rng=rng)
        completeness = second_order_complete(spec, rng=rng)
        rep = spec.rep
        edge_basis = edge(rep, rng=rng)
        span = dual_span(rep, rng=rng)
        stable = sample_stable(spec, req.samples, rng)
    except SpecDomainError as exc:
        raise InputError(str(exc)) from exc
    samples_out = []
    for op, lam in stable:
        eigvals, _ = jacobi_eigensystem(op.a)
        entry = _op_report(op, lam)
        entry["symbol_eigenvalues"] = _floats(eigvals)
        samples_out.append(entry)
    axiom_keys = ("positivity", "negativity", "topological", "proper", "nonempty")
    verdicts = {k: bool(axioms[k]) for k in axiom_keys}
    verdicts["valid"] = all(verdicts.values())
    verdicts["complete"] = bool(completeness.complete)
    witnesses = {
        "axiom_witnesses": {
            "positivity": None
            if axioms["positivity_witness"] is None
            else _floats(axioms["positivity_witness"]),
            "negativity": None
            if axioms["negativity_witness"] is None
            else _floats(axioms["negativity_witness"]),
        },
        "edge_dim": edge_basis.dim,
        "edge_basis": _columns(edge_basis.basis),
        "dual_span_dim": span.dim,
        "dual_span_basis": _columns(span.basis),
        "completeness": {
            "complete": bool(completeness.complete),
            "kernel_dim": completeness.common_kernel.dim,
            "witness_e": None
            if completeness.witness_e is None
            else _floats(completeness.witness_e),
            "reduced_dim": completeness.reduced_subspace.dim,
            "cross_check_mismatches": completeness.kernel_cross_check_mismatches,
            "fibre_verdicts_agree": bool(completeness.fibre_verdicts_agree),
        },
        "stable_samples": samples_out,
    }
    report = {
        "command": "analyze",
        "inputs": {"paths": paths, "spec": _spec_summary(req.spec), "samples": req.samples},
        "seed": req.seed,
        "verdicts": verdicts,
        "witnesses": witnesses,
        "timings": _clock(start, req.include_timings),
    }
    return report, verdicts["valid"]


# ---------------------------------------------------------------------------
# cones


def _oracle_bipolar_containment(f: OracleSet, rng, tol: float) -> dict:
    """One-sided round trip for oracle sets.

    Finitely many support half-spaces give an outer relaxation of the
    bipolar; membership may never escape it.  Points inside the
    relaxation but outside the set are the expected truncation gap and
    are reported separately rather than counted as violations.
    """
    dirs = rng.normal(size=(48, f.d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    items = []
    for w in dirs:
        m = support_infimum(f, w, rng=rng)
        if np.isfinite(m):
            items.append((w, m))
    pts = rng.uniform(f.lo, f.hi, size=(64, f.d))
    in_f = f.member(pts)
    if items:
        outer = HalfSpaceList(f.d, items)
        in_outer = outer.member(pts, tol)
    else:
        in_outer = np.ones(len(pts), dtype=bool)
    return {
        "mode": "support_outer",
        "checked": int(len(pts)),
        "mismatches": int(np.count_nonzero(in_f & ~in_outer)),
        "gap_points": int(np.count_nonzero(~in_f & in_outer)),
        "directions": int(len(items)),
        "tol": tol,
    }


def run_cones(req: ConesRequest, paths: Optional[dict] = None) -> tuple:
    start = time.perf_counter()
    f = set_from_model(req.set_spec)
    rng = np.random.default_rng(req.seed)
    try:
        rec = recession_cone(f, rng=rng)
        edge_basis = edge(f, rng=rng)
        span = dual_span(f, rng=rng)
        if isinstance(f, OracleSet):
            round_trip = _oracle_bipolar_containment(f, rng, req.tol)
        else:
            trip = bipolar_roundtrip(f, rng=rng, tol=req.tol)
            round_trip = {
                "mode": "exact_polar",
                "checked": trip["checked"],
                "mismatches": trip["mismatches"],
                "tol": trip["tol"],
            }
    except EmptySetError as exc:
        raise InputError(str(exc)) from exc
    polar = {"exact": False}
    if isinstance(f, GeneratedCone):
        polar = {
            "exact": True,
            "halfspaces": [_floats(w) for w, _ in polar_cone(f).items],
        }
    elif isinstance(f, HalfSpaceList) and np.all(f.offsets() == 0.0):
        polar = {"exact": True, "generators": [_floats(w) for w, _ in f.items]}
    if isinstance(rec, GeneratedCone):
        recession = {"rays": [_floats(r) for r in rec.rays]}
    else:
        recession = {"halfspaces": [_floats(w) for w, _ in rec.items]}
    dirs = rng.normal(size=(req.samples, f.d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    stab = [{"w": _floats(w), "stable": bool(stab_membership(w, f, rng))} for w in dirs]
    verdicts = {"bipolar_ok": round_trip["mismatches"] == 0}
    witnesses = {
        "recession": recession,
        "edge_dim": edge_basis.dim,
        "edge_basis": _columns(edge_basis.basis),
        "dual_span_dim": span.dim,
        "polar": polar,
        "stab_probes": stab,
        "bipolar": round_trip,
    }
    report = {
        "command": "cones",
        "inputs": {
            "paths": paths,
            "set": {"d": req.set_spec.d, "kind": req.set_spec.kind},
            "samples": req.samples,
            "tol": req.tol,
        },
        "seed": req.seed,
        "verdicts": verdicts,
        "witnesses": witnesses,
        "timings": _clock(start, req.include_timings),
    }
    return report, verdicts["bipolar_ok"]


# ---------------------------------------------------------------------------
# grid checks


def run_check(req: CheckRequest, paths: Optional[dict] = None) -> tuple:
    start = time.perf_counter()
    spec = spec_from_model(req.spec)
    u = grid_from_payload(req.grid)
    if spec.n != u.n:
        raise InputError("spec and grid dimensions differ")
    try:
        if req.mode == "c2":
            result = c2_membership(u, spec, tol=req.tol)
        elif req.mode == "visc":
            result = viscosity_check(u, spec, tol=req.tol)
        else:
            if req.seed is None:
                raise InputError("distributional checks need --seed")
            rng = np.random.default_rng(req.seed)
            result = distributional_check(
                u, spec, samples=req.samples, eps=req.eps, tol=req.tol, rng=rng
            )
    except SpecDomainError as exc:
        raise InputError(str(exc)) from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    witnesses = {k: v for k, v in result.items() if k != "ok"}
    report = {
        "command": "check",
        "inputs": {
            "paths": paths,
            "spec": _spec_summary(req.spec),
            "grid": {"shape": list(u.shape), "spacing": _floats(u.spacing)},
            "mode": req.mode,
            "samples": req.samples,
            "eps": req.eps,
            "tol": req.tol,
        },
        "seed": req.seed,
        "verdicts": {"ok": bool(result["ok"]), "mode": req.mode},
        "witnesses": witnesses,
        "timings": _clock(start, req.include_timings),
    }
    return report, bool(result["ok"])


# ---------------------------------------------------------------------------
# regularize


def run_regularize(req: RegularizeRequest, paths: Optional[dict] = None) -> tuple:
    start = time.perf_counter()
    u = grid_from_payload(req.grid)
    try:
        out = ess_limsup(u, req.radii)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    stack = out["stack"]
    monotone = all(
        bool(np.all(small.values <= large.values))
        for (_, large), (_, small) in zip(stack, stack[1:])
    )
    tight = out["limsup"]
    dominates = bool(np.all(u.values <= tight.values + 1e-12))
    levels = [
        {
            "radius": float(r),
            "max": float(np.max(g.values[np.isfinite(g.values)])),
            "min": float(np.min(g.values[np.isfinite(g.values)])),
        }
        for r, g in stack
    ]
    verdicts = {"monotone": monotone, "dominates": dominates}
    witnesses = {
        "levels": levels,
        "limsup": {
            "origin": _floats(tight.origin),
            "spacing": _floats(tight.spacing),
            "shape": list(tight.shape),
            "values": ["-inf" if v == -np.inf else float(v) for v in tight.values.reshape(-1)],
        },
    }
    report = {
        "command": "regularize",
        "inputs": {
            "paths": paths,
            "grid": {"shape": list(u.shape), "spacing": _floats(u.spacing)},
            "radii": [float(r) for r in req.radii],
        },
        "seed": None,
        "verdicts": verdicts,
        "witnesses": witnesses,
        "timings": _clock(start, req.include_timings),
    }
    return report, monotone and dominates, tight


# ---------------------------------------------------------------------------
# linear harness


def _battery_entries(selector: str) -> list:
    base = linear_battery()
    by_name = {entry["name"]: entry for entry in base}
    chosen = []
    if selector.strip() == "all":
        for entry in base:
            chosen.append((entry["name"], entry, False))
            chosen.append((entry["name"] + "_negated", entry, True))
        return chosen
    for token in selector.split(","):
        token = token.strip()
        negate = token.startswith("neg:")
        name = token[4:] if negate else token
        if name not in by_name:
            raise InputError(f"unknown battery member {name!r}")
        label = name + "_negated" if negate else name
        chosen.append((label, by_name[name], negate))
    if not chosen:
        raise InputError("empty battery selection")
    return chosen


def run_linear(req: LinearRequest, paths: Optional[dict] = None) -> tuple:
    start = time.perf_counter()
    op, level = operator_from_model(req.operator)
    entries = _battery_entries(req.battery)
    members = {}
    all_agree = True
    for label, entry, negate in entries:
        grid = entry["grid"]
        if negate:
            grid = GridFunction(grid.origin, grid.spacing, -grid.values)
        rng = np.random.default_rng(req.seed)
        pole = entry.get("pole")
        result = equivalence_harness(
            grid,
            op,
            level=level,
            eps=req.eps,
            samples=req.samples,
            rng=rng,
            exclude=None if pole is None else (pole, POLE_CLEARANCE),
        )
        members[label] = {
            "verdicts": result["verdicts"],
            "agree": bool(result["agree"]),
            "classical_max_excess": result["reports"]["classical"]["max_excess"],
            "viscosity": {
                "checked": result["reports"]["viscosity"]["checked"],
                "contacts": result["reports"]["viscosity"]["contacts"],
                "failed": result["reports"]["viscosity"]["failed"],
            },
            "distributional_rows": result["reports"]["distributional"]["rows"],
        }
        all_agree = all_agree and result["agree"]
    verdicts = {
        "all_agree": bool(all_agree),
        "members": {label: members[label]["agree"] for label in members},
    }
    report = {
        "command": "linear",
        "inputs": {
            "paths": paths,
            "operator": {
                "a": req.operator.a,
                "b": req.operator.b,
                "c": req.operator.c,
                "level": req.operator.level,
            },
            "battery": req.battery,
            "samples": req.samples,
            "eps": req.eps,
        },
        "seed": req.seed,
        "verdicts": verdicts,
        "witnesses": {"members": members},
        "timings": _clock(start, req.include_timings),
    }
    return report, bool(all_agree)


# ---------------------------------------------------------------------------
# decomposition


def _exclusion_distance(spec: SubequationSpec, vec: np.ndarray, jet: Jet2) -> float:
    if spec.kind == "halfspace_list":
        rep = spec.rep
        slack = rep.normals() @ vec - rep.offsets()
        norms = np.linalg.norm(rep.normals(), axis=1)
        return float(max(0.0, np.max(-slack / norms)))
    if spec.kind == "builtin_psd":
        return float(max(0.0, -min_eigenvalue(jet.a)))
    return 0.0


def run_decompose(req: DecomposeRequest, paths: Optional[dict] = None) -> tuple:
    start = time.perf_counter()
    spec = spec_from_model(req.spec)
    if not req.jets:
        raise InputError("no jets to test")
    rng = np.random.default_rng(req.seed)
    try:
        stable = sample_stable(spec, req.samples, rng)
    except SpecDomainError as exc:
        raise InputError(str(exc)) from exc
    rep = spec.rep
    inside = []
    outside = []
    labels = []
    for entry in req.jets:
        if len(entry.p) != spec.n:
            raise InputError("jet drift has wrong dimension")
        jet = Jet2(
            entry.r,
            np.asarray(entry.p, dtype=float),
            SymMatrix.from_full(_full_from_upper(spec.n, entry.a)),
        )
        vec = jet_to_vec(jet)
        if isinstance(rep, HalfSpaceList):
            member = bool(rep.member(vec, req.tol))
        else:
            member = bool(rep.member(vec))
        if member:
            labels.append(("inside", len(inside)))
            inside.append(jet)
        else:
            labels.append(("outside", len(outside)))
            outside.append((jet, _exclusion_distance(spec, vec, jet)))
    result = decomposition_check(spec, stable, inside, outside, rng=rng, tol=req.tol)
    verdicts = {
        "ok": bool(result["ok"]),
        "inside": len(inside),
        "outside": len(outside),
    }
    witnesses = {
        "classification": [{"side": side, "index": idx} for side, idx in labels],
        "inside_failures": result["inside_failures"],
        "outside": result["outside"],
        "stable_count": len(stable),
    }
    report = {
        "command": "decompose",
        "inputs": {
            "paths": paths,
            "spec": _spec_summary(req.spec),
            "jets": len(req.jets),
            "samples": req.samples,
            "tol": req.tol,
        },
        "seed": req.seed,
        "verdicts": verdicts,
        "witnesses": witnesses,
        "timings": _clock(start, req.include_timings),
    }
    return report, bool(result["ok"])
