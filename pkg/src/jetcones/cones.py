"""Convex geometry in flat Euclidean space.

Closed convex sets carry one of three representations: a half-space
list (H-rep), a generated description (points, rays, lines), or a
membership oracle over a sampling box.  On top of these the module
computes polars, bipolar round trips, containing cones of half-spaces,
edges (maximal translation subspaces), recession cones, support
infima, stable-direction tests, and separating half-spaces.

Polyhedral questions reduce to linear programs and are exact up to
solver tolerances.  Oracle-set questions use expanding-radius sampling
with deterministic seeded draws; their accuracy contracts are
documented per operation.  There is no vertex enumeration anywhere:
polars of H-reps stay implicit behind exact LP membership tests.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .jets import jacobi_eigensystem
from .lp import lp_feasible_point, solve_lp

__all__ = [
    "EmptySetError",
    "HalfSpaceList",
    "GeneratedCone",
    "VRep",
    "OracleSet",
    "PolarSet",
    "Subspace",
    "ContainingCone",
    "polar_cone",
    "polar_set",
    "bipolar_roundtrip",
    "containing_cone",
    "edge",
    "dual_span",
    "recession_cone",
    "monotonicity_probe",
    "support_infimum",
    "stab_membership",
    "supporting_test",
    "separate",
    "dykstra_project",
    "convexity_spot_check",
    "parabola_region",
    "sample_members",
]

_MEMBER_TOL = 1e-9


class EmptySetError(ValueError):
    """Raised when an operation needs a nonempty set and gets an empty one."""


def _as_matrix(vectors, d):
    if len(vectors) == 0:
        return np.zeros((0, d))
    return np.array([np.asarray(v, dtype=float).reshape(-1) for v in vectors])


class HalfSpaceList:
    """Intersection of half-spaces {x : <w_i, x> >= lam_i}.

    An empty item list represents the whole space.
    """

    def __init__(self, d: int, items) -> None:
        self.d = int(d)
        norm_items = []
        for w, lam in items:
            w = np.asarray(w, dtype=float).reshape(-1)
            if w.size != self.d:
                raise ValueError("half-space normal has wrong dimension")
            if np.linalg.norm(w) <= 0.0:
                raise ValueError("half-space normal must be nonzero")
            norm_items.append((w.copy(), float(lam)))
        self.items = norm_items

    def normals(self) -> np.ndarray:
        return _as_matrix([w for w, _ in self.items], self.d)

    def offsets(self) -> np.ndarray:
        return np.array([lam for _, lam in self.items])

    def member(self, x, tol: float = _MEMBER_TOL):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        if not self.items:
            out = np.ones(pts.shape[0], dtype=bool)
        else:
            slack = pts @ self.normals().T - self.offsets()
            out = np.all(slack >= -tol, axis=1)
        return bool(out[0]) if single else out

    def feasible_point(self):
        if not self.items:
            return np.zeros(self.d)
        return lp_feasible_point(
            a_ub=-self.normals(), b_ub=-self.offsets(), dim=self.d
        )

    def is_empty(self) -> bool:
        return self.feasible_point() is None

    def interior_point(self):
        """A point with uniformly positive slack, or None.

        Maximizes the common slack t (capped at 1) over all constraints.
        """
        if not self.items:
            return np.zeros(self.d)
        w_mat = self.normals()
        m = len(self.items)
        # variables (x, t): maximize t  s.t.  <w_i,x> - |w_i| t >= lam_i, t <= 1
        norms = np.linalg.norm(w_mat, axis=1)
        a_ub = np.zeros((m + 1, self.d + 1))
        a_ub[:m, : self.d] = -w_mat
        a_ub[:m, self.d] = norms
        a_ub[m, self.d] = 1.0
        b_ub = np.concatenate([-self.offsets(), [1.0]])
        c = np.zeros(self.d + 1)
        c[self.d] = -1.0
        res = solve_lp(c, a_ub=a_ub, b_ub=b_ub)
        if res.status != "optimal" or res.x[self.d] <= 1e-9:
            return None
        return res.x[: self.d]

    def __repr__(self) -> str:
        return f"HalfSpaceList(d={self.d}, m={len(self.items)})"


class GeneratedCone:
    """Cone of nonnegative combinations of finitely many generators."""

    def __init__(self, d: int, rays) -> None:
        self.d = int(d)
        mat = _as_matrix(rays, self.d)
        if mat.shape[0] and np.any(np.linalg.norm(mat, axis=1) <= 0.0):
            raise ValueError("cone generators must be nonzero")
        if mat.shape[1] != self.d:
            raise ValueError("generator dimension mismatch")
        self.rays = mat

    def member(self, x, tol: float = 1e-8):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        out = np.zeros(pts.shape[0], dtype=bool)
        for i, v in enumerate(pts):
            if np.linalg.norm(v) <= tol:
                out[i] = True
                continue
            if self.rays.shape[0] == 0:
                out[i] = False
                continue
            # mu >= 0 with sum mu_j g_j = v, allowing a tol-ball slack
            res = solve_lp(
                np.ones(self.rays.shape[0]),
                a_eq=self.rays.T,
                b_eq=v,
                nonneg=True,
            )
            out[i] = res.status == "optimal"
        return bool(out[0]) if single else out

    def as_vrep(self) -> "VRep":
        return VRep(self.d, points=[np.zeros(self.d)], rays=list(self.rays))

    def __repr__(self) -> str:
        return f"GeneratedCone(d={self.d}, k={self.rays.shape[0]})"


class VRep:
    """conv(points) + cone(rays) + span(lines)."""

    def __init__(self, d: int, points=(), rays=(), lines=()) -> None:
        self.d = int(d)
        self.points = _as_matrix(points, self.d)
        self.rays = _as_matrix(rays, self.d)
        self.lines = _as_matrix(lines, self.d)
        if self.points.shape[0] == 0:
            raise ValueError("a generated set needs at least one point")

    def member(self, x, tol: float = 1e-8):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        np_, nr, nl = self.points.shape[0], self.rays.shape[0], self.lines.shape[0]
        out = np.zeros(pts.shape[0], dtype=bool)
        for i, v in enumerate(pts):
            # alpha >= 0 (sum 1), mu >= 0, beta split into two nonneg halves
            cols = [self.points.T]
            if nr:
                cols.append(self.rays.T)
            if nl:
                cols.append(self.lines.T)
                cols.append(-self.lines.T)
            a_eq = np.hstack(cols)
            a_eq = np.vstack([a_eq, np.concatenate([np.ones(np_), np.zeros(a_eq.shape[1] - np_)])])
            b_eq = np.concatenate([v, [1.0]])
            res = solve_lp(
                np.zeros(a_eq.shape[1]), a_eq=a_eq, b_eq=b_eq, nonneg=True
            )
            out[i] = res.status == "optimal"
        return bool(out[0]) if single else out

    def __repr__(self) -> str:
        return (
            f"VRep(d={self.d}, points={self.points.shape[0]}, "
            f"rays={self.rays.shape[0]}, lines={self.lines.shape[0]})"
        )


class OracleSet:
    """Closed convex set given by a membership predicate over a box.

    membership takes an (N, d) array and returns a boolean vector; the
    box (lo, hi) bounds the sampling window, and scale_cap is the
    divergence radius for expanding-radius searches.  Convexity is the
    caller's promise; convexity_spot_check probes it.
    """

    def __init__(self, d: int, membership: Callable, box, scale_cap: float = 1e6) -> None:
        self.d = int(d)
        self.membership = membership
        lo, hi = box
        self.lo = np.asarray(lo, dtype=float).reshape(-1)
        self.hi = np.asarray(hi, dtype=float).reshape(-1)
        if self.lo.size != self.d or self.hi.size != self.d:
            raise ValueError("box bounds have wrong dimension")
        if np.any(self.hi <= self.lo):
            raise ValueError("box must have positive extent")
        self.scale_cap = float(scale_cap)

    @property
    def box_diameter(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    def member(self, x, tol: float = 0.0):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        out = np.asarray(self.membership(pts), dtype=bool).reshape(pts.shape[0])
        return bool(out[0]) if single else out

    def __repr__(self) -> str:
        return f"OracleSet(d={self.d})"


class PolarSet(OracleSet):
    """Polar of a nonempty H-rep set, with exact LP membership.

    w lies in the polar iff some mu >= 0 gives sum mu_i w_i = w with
    sum mu_i lam_i >= -1 (Farkas form of containment in H(w, -1)).
    """

    def __init__(self, base: HalfSpaceList, box=None, scale_cap: float = 1e6) -> None:
        self.base = base
        d = base.d
        if box is None:
            scale = 1.0
            if base.items:
                scale = max(1.0, float(np.max(np.abs(base.offsets()))))
            box = (-10.0 * scale * np.ones(d), 10.0 * scale * np.ones(d))
        super().__init__(d, self._lp_member, box, scale_cap)

    def _lp_member(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.zeros(pts.shape[0], dtype=bool)
        w_mat = self.base.normals()
        lams = self.base.offsets()
        m = w_mat.shape[0]
        for i, w in enumerate(pts):
            if m == 0:
                # polar of the whole space is {0}
                out[i] = np.linalg.norm(w) <= 1e-9
                continue
            a_eq = w_mat.T
            a_ub = -lams.reshape(1, m)
            res = lp_feasible_point(
                a_ub=a_ub, b_ub=np.array([1.0]), a_eq=a_eq, b_eq=w, nonneg=True, dim=m
            )
            out[i] = res is not None
        return out


class Subspace:
    """Linear subspace with an orthonormal basis (columns), possibly zero."""

    def __init__(self, d: int, basis: np.ndarray) -> None:
        self.d = int(d)
        basis = np.asarray(basis, dtype=float)
        if basis.size == 0:
            basis = np.zeros((self.d, 0))
        if basis.shape[0] != self.d:
            raise ValueError("basis rows must match ambient dimension")
        if basis.shape[1]:
            gram = basis.T @ basis
            if not np.allclose(gram, np.eye(basis.shape[1]), atol=1e-8):
                raise ValueError("basis must be orthonormal")
        self.basis = basis

    @staticmethod
    def from_spanning(d: int, vectors, tol: float = 1e-10) -> "Subspace":
        mat = _as_matrix(vectors, d)
        if mat.shape[0] == 0:
            return Subspace(d, np.zeros((d, 0)))
        scatter = mat.T @ mat
        vals, vecs = jacobi_eigensystem(scatter)
        top = float(vals[-1])
        if top <= 0.0:
            return Subspace(d, np.zeros((d, 0)))
        keep = vals > tol * top
        return Subspace(d, vecs[:, keep])

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def project(self, v: np.ndarray) -> np.ndarray:
        if self.dim == 0:
            return np.zeros_like(v)
        return self.basis @ (self.basis.T @ v)

    def contains(self, v, tol: float = 1e-8) -> bool:
        v = np.asarray(v, dtype=float).reshape(-1)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return True
        return float(np.linalg.norm(v - self.project(v))) <= tol * nv

    def orthocomplement(self) -> "Subspace":
        if self.dim == 0:
            return Subspace(self.d, np.eye(self.d))
        proj = np.eye(self.d) - self.basis @ self.basis.T
        vals, vecs = jacobi_eigensystem(proj)
        keep = vals > 0.5
        return Subspace(self.d, vecs[:, keep])

    def max_principal_angle(self, other: "Subspace") -> float:
        """Largest principal angle; pi/2 when dimensions differ."""
        if self.dim != other.dim:
            return math.pi / 2.0
        if self.dim == 0:
            return 0.0
        resid = self.basis - other.basis @ (other.basis.T @ self.basis)
        vals, _ = jacobi_eigensystem(resid.T @ resid)
        s = math.sqrt(max(0.0, float(vals[-1])))
        return math.asin(min(1.0, s))

    def __repr__(self) -> str:
        return f"Subspace(d={self.d}, dim={self.dim})"


class ContainingCone:
    """Cone of pairs (w, lam) with F inside the half-space {<w,.> >= lam}.

    Generated by the defining H-rep pairs plus (0, -1); membership is
    the Farkas rule: (w, lam) is containing iff w = sum mu_i w_i with
    mu >= 0 and lam <= sum mu_i lam_i.
    """

    def __init__(self, d: int, generators) -> None:
        self.d = int(d)
        self.generators = [
            (np.asarray(w, dtype=float).reshape(-1).copy(), float(lam))
            for w, lam in generators
        ]

    def contains_pair(self, w, lam: float) -> bool:
        w = np.asarray(w, dtype=float).reshape(-1)
        mat = _as_matrix([g for g, _ in self.generators], self.d)
        lams = np.array([l for _, l in self.generators])
        m = mat.shape[0]
        if m == 0:
            return bool(np.linalg.norm(w) <= 1e-9 and lam <= 1e-9)
        res = lp_feasible_point(
            a_ub=-lams.reshape(1, m),
            b_ub=np.array([-float(lam)]),
            a_eq=mat.T,
            b_eq=w,
            nonneg=True,
            dim=m,
        )
        return res is not None

    def sample_pairs(self, k: int, rng: np.random.Generator):
        """Strictly positive combinations of the generators."""
        m = len(self.generators)
        mat = _as_matrix([g for g, _ in self.generators], self.d)
        lams = np.array([l for _, l in self.generators])
        out = []
        for _ in range(k):
            mu = rng.uniform(0.1, 1.0, size=m)
            mu = mu / mu.sum()
            out.append((mat.T @ mu, float(lams @ mu)))
        return out

    def __repr__(self) -> str:
        return f"ContainingCone(d={self.d}, k={len(self.generators)})"


# ---------------------------------------------------------------------------
# sampling helpers


def _find_member(f: OracleSet, rng: np.random.Generator, tries: int = 40, batch: int = 512):
    for _ in range(tries):
        pts = rng.uniform(f.lo, f.hi, size=(batch, f.d))
        mask = f.member(pts)
        if np.any(mask):
            hits = pts[mask]
            # convex mean of hits is a more central member
            center = hits.mean(axis=0)
            if f.member(center):
                return center
            return hits[0]
    raise EmptySetError("no member found inside the sampling box")


def sample_members(f, k: int, rng: np.random.Generator, boundary_bias: bool = False):
    """k points of f; with boundary_bias the points hug the boundary."""
    if isinstance(f, HalfSpaceList):
        return _sample_members_hrep(f, k, rng, boundary_bias)
    if isinstance(f, OracleSet):
        return _sample_members_oracle(f, k, rng, boundary_bias)
    if isinstance(f, GeneratedCone):
        f = f.as_vrep()
    if isinstance(f, VRep):
        out = []
        for _ in range(k):
            alpha = rng.exponential(size=f.points.shape[0])
            if boundary_bias and f.points.shape[0] > 1:
                keep = rng.integers(1, f.points.shape[0] + 1)
                mask = np.zeros(f.points.shape[0])
                mask[rng.permutation(f.points.shape[0])[:keep]] = 1.0
                alpha = alpha * mask
                if alpha.sum() == 0.0:
                    alpha[0] = 1.0
            alpha /= alpha.sum()
            x = f.points.T @ alpha
            if f.rays.shape[0]:
                mu = rng.exponential(size=f.rays.shape[0]) * rng.uniform(0, 2)
                x = x + f.rays.T @ mu
            if f.lines.shape[0]:
                beta = rng.normal(size=f.lines.shape[0])
                x = x + f.lines.T @ beta
            out.append(x)
        return out
    raise TypeError(f"unsupported representation {type(f)!r}")


def _sample_members_hrep(f: HalfSpaceList, k, rng, boundary_bias):
    x0 = f.interior_point()
    if x0 is None:
        x0 = f.feasible_point()
        if x0 is None:
            raise EmptySetError("cannot sample an empty set")
    w_mat = f.normals()
    lams = f.offsets()
    out = []
    for _ in range(k):
        u = rng.normal(size=f.d)
        u /= np.linalg.norm(u)
        if w_mat.shape[0]:
            du = w_mat @ u
            slack = w_mat @ x0 - lams
            steps = [s / (-d) for s, d in zip(slack, du) if d < -1e-12]
            t_max = min(steps) if steps else 4.0 * (1.0 + np.linalg.norm(x0))
        else:
            t_max = 4.0 * (1.0 + np.linalg.norm(x0))
        theta = rng.uniform(0.65, 0.999) if boundary_bias else rng.uniform(0.0, 1.0)
        out.append(x0 + theta * t_max * u)
    return out


def _sample_members_oracle(f: OracleSet, k, rng, boundary_bias):
    x0 = _find_member(f, rng)
    out = []
    attempts = 0
    while len(out) < k and attempts < 200 * k:
        attempts += 1
        pts = rng.uniform(f.lo, f.hi, size=(32, f.d))
        mask = f.member(pts)
        for x in pts[mask]:
            if len(out) >= k:
                break
            if boundary_bias:
                u = rng.normal(size=f.d)
                u /= np.linalg.norm(u)
                # push x along u to just inside the boundary
                t_lo, t_hi = 0.0, f.box_diameter
                if f.member(x + t_hi * u):
                    out.append(x + t_hi * u)
                    continue
                for _ in range(40):
                    mid = 0.5 * (t_lo + t_hi)
                    if f.member(x + mid * u):
                        t_lo = mid
                    else:
                        t_hi = mid
                out.append(x + 0.98 * t_lo * u)
            else:
                out.append(x)
    if len(out) < k:
        raise EmptySetError("sampling produced too few members")
    return out


# ---------------------------------------------------------------------------
# polar operations


def polar_cone(c: GeneratedCone) -> HalfSpaceList:
    """Polar of a generated cone: {w : <w, g_i> >= 0 for every generator}."""
    return HalfSpaceList(c.d, [(g, 0.0) for g in c.rays])


def polar_set(f, seed: int = 0):
    """The polar {w : <w, x> >= -1 for all x in f}.

    Exact H-rep for generated inputs; exact LP-backed PolarSet for
    H-rep inputs; sampled oracle membership for oracle inputs.
    """
    if isinstance(f, GeneratedCone):
        return polar_cone(f)
    if isinstance(f, VRep):
        items = []
        for p in f.points:
            if np.linalg.norm(p) > 0.0:
                items.append((p, -1.0))
        for r in f.rays:
            items.append((r, 0.0))
        for l in f.lines:
            items.append((l, 0.0))
            items.append((-l, 0.0))
        return HalfSpaceList(f.d, items)
    if isinstance(f, PolarSet):
        return _polar_of_polar(f)
    if isinstance(f, HalfSpaceList):
        if f.is_empty():
            raise EmptySetError("polar of an empty set is undefined")
        return PolarSet(f)
    if isinstance(f, OracleSet):
        base = f

        def member(pts, _base=base, _seed=seed):
            pts = np.atleast_2d(np.asarray(pts, dtype=float))
            out = np.zeros(pts.shape[0], dtype=bool)
            for i, w in enumerate(pts):
                rng = np.random.default_rng(_seed + 7919 * i)
                val = support_infimum(_base, w, rng=rng)
                out[i] = val >= -1.0 - 1e-9
            return out

        width = np.maximum(1.0, np.abs(f.hi - f.lo))
        return OracleSet(f.d, member, (-10.0 / width, 10.0 / width), f.scale_cap)
    raise TypeError(f"unsupported representation {type(f)!r}")


def _polar_of_polar(ps: PolarSet) -> OracleSet:
    base = ps.base
    w_mat = base.normals()
    lams = base.offsets()
    m = w_mat.shape[0]

    def member(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.zeros(pts.shape[0], dtype=bool)
        for i, v in enumerate(pts):
            if m == 0:
                out[i] = True
                continue
            # min over mu >= 0 of <v, sum mu_i w_i> with sum mu_i lam_i >= -1
            res = solve_lp(
                w_mat @ v,
                a_ub=-lams.reshape(1, m),
                b_ub=np.array([1.0]),
                nonneg=True,
            )
            out[i] = res.status == "optimal" and res.objective >= -1.0 - 1e-9
        return out

    box = (ps.lo.copy(), ps.hi.copy())
    return OracleSet(ps.d, member, box, ps.scale_cap)


def bipolar_roundtrip(f, samples: int = 200, rng: np.random.Generator | None = None, tol: float = 1e-9):
    """Polar of the polar, with a sampled membership comparison report."""
    if rng is None:
        rng = np.random.default_rng(0)
    pp = polar_set(polar_set(f))
    if isinstance(f, GeneratedCone):
        box_lo, box_hi = -4.0 * np.ones(f.d), 4.0 * np.ones(f.d)
    elif isinstance(f, (HalfSpaceList, OracleSet)):
        probe = getattr(f, "lo", None)
        if probe is None:
            box_lo, box_hi = -4.0 * np.ones(f.d), 4.0 * np.ones(f.d)
        else:
            box_lo, box_hi = f.lo, f.hi
    else:
        box_lo, box_hi = -4.0 * np.ones(f.d), 4.0 * np.ones(f.d)
    pts = rng.uniform(box_lo, box_hi, size=(samples, f.d))
    mism = 0
    checked = 0
    member_f = _member_of(f)
    member_pp = _member_of(pp)
    for x in pts:
        a = member_f(x, tol)
        b = member_pp(x, tol)
        checked += 1
        if a != b:
            mism += 1
    return {"set": repr(f), "checked": checked, "mismatches": mism, "tol": tol, "roundtrip": pp}


def _member_of(f):
    def inner(x, tol):
        if isinstance(f, (HalfSpaceList,)):
            return bool(f.member(x, tol))
        return bool(f.member(x))

    return inner


def containing_cone(f: HalfSpaceList) -> ContainingCone:
    """All pairs (w, lam) whose half-space contains the nonempty H-rep f."""
    if not isinstance(f, HalfSpaceList):
        raise TypeError("containing_cone expects an H-rep set")
    if f.is_empty():
        raise EmptySetError("containing cone of an empty set is undefined")
    gens = list(f.items) + [(np.zeros(f.d), -1.0)]
    return ContainingCone(f.d, gens)


# ---------------------------------------------------------------------------
# edge, dual span, recession


def edge(f, rng: np.random.Generator | None = None, base_point=None, probes: int = 24) -> Subspace:
    """Maximal subspace of directions under which f is fully invariant."""
    if isinstance(f, HalfSpaceList):
        if f.is_empty():
            raise EmptySetError("edge of an empty set is undefined")
        if not f.items:
            return Subspace(f.d, np.eye(f.d))
        return Subspace.from_spanning(f.d, f.normals()).orthocomplement()
    if isinstance(f, GeneratedCone):
        rev = [g for g in f.rays if f.member(-g)]
        return Subspace.from_spanning(f.d, rev)
    if isinstance(f, VRep):
        rec = recession_cone(f)
        rev = [g for g in rec.rays if rec.member(-g)]
        return Subspace.from_spanning(f.d, rev)
    if isinstance(f, OracleSet):
        if rng is None:
            rng = np.random.default_rng(0)
        x0 = np.asarray(base_point, dtype=float) if base_point is not None else _find_member(f, rng)
        dirs = [np.eye(f.d)[i] for i in range(f.d)]
        for _ in range(probes):
            u = rng.normal(size=f.d)
            dirs.append(u / np.linalg.norm(u))
        cap = min(f.scale_cap, 2.0**14 * f.box_diameter)
        surviving = []
        for u in dirs:
            if f.member(x0 + cap * u) and f.member(x0 - cap * u):
                surviving.append(u)
        # generous rank cutoff: a stray near-parallel survivor must not
        # inflate the dimension
        return Subspace.from_spanning(f.d, surviving, tol=1e-6)
    raise TypeError(f"unsupported representation {type(f)!r}")


def dual_span(f, rng: np.random.Generator | None = None) -> Subspace:
    """Orthogonal complement of the edge: the span of useful functionals."""
    return edge(f, rng=rng).orthocomplement()


def recession_cone(f, rng: np.random.Generator | None = None, base_point=None, scan: int = 8192):
    """Directions of unbounded travel that stay inside f."""
    if isinstance(f, HalfSpaceList):
        if f.is_empty():
            raise EmptySetError("recession cone of an empty set is undefined")
        return HalfSpaceList(f.d, [(w, 0.0) for w, _ in f.items])
    if isinstance(f, GeneratedCone):
        return GeneratedCone(f.d, list(f.rays))
    if isinstance(f, VRep):
        rays = list(f.rays) + [l for l in f.lines] + [-l for l in f.lines]
        return GeneratedCone(f.d, rays)
    if isinstance(f, OracleSet):
        if rng is None:
            rng = np.random.default_rng(0)
        x0 = np.asarray(base_point, dtype=float) if base_point is not None else _find_member(f, rng)
        cap = f.scale_cap
        if f.d == 2:
            return _recession_2d(f, x0, cap, scan)
        dirs = rng.normal(size=(scan, f.d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        mask = f.member(x0 + cap * dirs)
        return GeneratedCone(f.d, list(dirs[mask]))
    raise TypeError(f"unsupported representation {type(f)!r}")


def _recession_2d(f: OracleSet, x0: np.ndarray, cap: float, scan: int) -> GeneratedCone:
    """Angular survival scan with bisection-refined cluster midpoints.

    A ray survives iff its endpoint at the cap radius is a member
    (convexity makes membership along the ray an interval).
    """
    angles = np.linspace(0.0, 2.0 * math.pi, scan, endpoint=False)
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    mask = f.member(x0 + cap * dirs)
    if not np.any(mask):
        return GeneratedCone(2, [])
    if np.all(mask):
        return GeneratedCone(2, [np.array([1.0, 0.0]), np.array([-1.0, 0.0]),
                                 np.array([0.0, 1.0]), np.array([0.0, -1.0])])

    def survives(theta: float, radius: float = cap) -> bool:
        return bool(f.member(x0 + radius * np.array([math.cos(theta), math.sin(theta)])))

    # contiguous surviving clusters on the circle
    idx = np.arange(scan)
    clusters = []
    visited = np.zeros(scan, dtype=bool)
    for i in idx[mask]:
        if visited[i]:
            continue
        j0 = i
        while mask[(j0 - 1) % scan] and (j0 - 1) % scan != i:
            j0 = (j0 - 1) % scan
        j1 = i
        while mask[(j1 + 1) % scan] and (j1 + 1) % scan != i:
            j1 = (j1 + 1) % scan
        j = j0
        while True:
            visited[j] = True
            if j == j1:
                break
            j = (j + 1) % scan
        clusters.append((j0, j1))
    step = 2.0 * math.pi / scan

    def window_midpoint(lo, hi, radius):
        # the window widens as the radius shrinks, so grow the brackets
        # until their outer ends are truly infeasible
        a_out, a_in = lo - step, lo
        for _ in range(256):
            if not survives(a_out, radius):
                break
            a_in = a_out
            a_out -= step
        b_in, b_out = hi, hi + step
        for _ in range(256):
            if not survives(b_out, radius):
                break
            b_in = b_out
            b_out += step
        for _ in range(60):
            mid = 0.5 * (a_out + a_in)
            if survives(mid, radius):
                a_in = mid
            else:
                a_out = mid
        for _ in range(60):
            mid = 0.5 * (b_in + b_out)
            if survives(mid, radius):
                b_in = mid
            else:
                b_out = mid
        return 0.5 * (a_in + b_in)

    rays = []
    for j0, j1 in clusters:
        lo = angles[j0]
        hi = angles[j1] if j1 >= j0 else angles[j1] + 2.0 * math.pi
        # the window center drifts like 1/radius with the base point, so
        # extrapolate the midpoints at two radii to the infinite limit
        t1 = window_midpoint(lo, hi, cap)
        t2 = window_midpoint(lo, hi, 0.5 * cap)
        theta = 2.0 * t1 - t2
        rays.append(np.array([math.cos(theta), math.sin(theta)]))
    return GeneratedCone(2, rays)


# ---------------------------------------------------------------------------
# monotonicity


def monotonicity_probe(f, v, k: int = 50, rng: np.random.Generator | None = None, tol: float = 1e-9):
    """Check x + v stays in f over k boundary-biased sample points."""
    if rng is None:
        rng = np.random.default_rng(0)
    v = np.asarray(v, dtype=float).reshape(-1)
    pts = []
    if isinstance(f, HalfSpaceList):
        # guaranteed witnesses: for each facet, a point minimizing its slack
        for w, lam in f.items:
            res = solve_lp(w, a_ub=-f.normals(), b_ub=-f.offsets())
            if res.status == "optimal":
                pts.append(res.x)
        pts.extend(_sample_members_hrep(f, k, rng, boundary_bias=True))
        member = lambda x: bool(f.member(x, tol))
    elif isinstance(f, OracleSet):
        pts.extend(_sample_members_oracle(f, k, rng, boundary_bias=True))
        member = lambda x: bool(f.member(x))
    else:
        pts.extend(sample_members(f, k, rng, boundary_bias=True))
        member = lambda x: bool(f.member(x))
    for x in pts:
        if not member(x):
            continue
        if not member(x + v):
            return {"holds": False, "checked": len(pts), "witness": x}
    return {"holds": True, "checked": len(pts), "witness": None}


# ---------------------------------------------------------------------------
# support function machinery


def support_infimum(f, w, rng: np.random.Generator | None = None, samples: int = 2048):
    """inf over f of <w, x>; -inf when the objective is unbounded below."""
    w = np.asarray(w, dtype=float).reshape(-1)
    if isinstance(f, HalfSpaceList):
        if not f.items:
            return 0.0 if np.linalg.norm(w) <= 1e-12 else -math.inf
        res = solve_lp(w, a_ub=-f.normals(), b_ub=-f.offsets())
        if res.status == "infeasible":
            raise EmptySetError("support of an empty set is undefined")
        if res.status == "unbounded":
            return -math.inf
        return float(res.objective)
    if isinstance(f, GeneratedCone):
        f = f.as_vrep()
    if isinstance(f, VRep):
        if f.rays.shape[0] and np.any(f.rays @ w < -1e-12):
            return -math.inf
        if f.lines.shape[0] and np.any(np.abs(f.lines @ w) > 1e-12):
            return -math.inf
        return float(np.min(f.points @ w))
    if isinstance(f, OracleSet):
        return _support_infimum_oracle(f, w, rng, samples)[0]
    raise TypeError(f"unsupported representation {type(f)!r}")


def _line_max_step(f: OracleSet, x: np.ndarray, u: np.ndarray, t_hi: float):
    """Largest feasible step along u from x, up to t_hi, by doubling."""
    steps = t_hi * (0.5 ** np.arange(24.0))[::-1]
    pts = x[None, :] + steps[:, None] * u[None, :]
    mask = f.member(pts)
    good = np.nonzero(mask)[0]
    if good.size == 0:
        return 0.0
    return float(steps[good[-1]])


def _descent_directions(wh: np.ndarray, beta_max: float) -> list:
    """Descent mixes (beta * tangent - normal) over a geometric slope ladder.

    Steep or flattening boundaries force nearly tangent travel: a fixed
    mixing angle stalls once the boundary slope passes it, so beta
    sweeps powers of two up to beta_max (which grows with the search
    radius) and the line search keeps whichever scale makes progress.
    """
    d = wh.size
    dirs = [-wh]
    tangents = []
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        t = e - float(e @ wh) * wh
        for prev in tangents:
            t = t - float(t @ prev) * prev
        nt = np.linalg.norm(t)
        if nt > 1e-10:
            tangents.append(t / nt)
    betas = []
    beta = 0.25
    while beta <= beta_max:
        betas.append(beta)
        beta *= 2.0
    for t in tangents:
        for beta in betas:
            for sgn in (1.0, -1.0):
                mix = sgn * beta * t - wh
                dirs.append(mix / np.linalg.norm(mix))
    return dirs


def _refine_minimum(f: OracleSet, w, x_best, val_best, radius, center, rounds=14):
    """Pattern-search descent of <w, x> inside f within a ball."""
    wn = np.linalg.norm(w)
    if wn == 0.0:
        return x_best, val_best
    beta_max = 16.0 * max(1.0, radius / f.box_diameter) ** 2
    dirs = _descent_directions(w / wn, beta_max)
    x, val = x_best.copy(), val_best
    for _ in range(rounds):
        improved = False
        for u in dirs:
            room = radius - np.linalg.norm(x - center)
            if room <= 1e-12 * radius:
                room = 1e-3 * radius
            t = _line_max_step(f, x, u, room)
            if t <= 0.0:
                continue
            cand = x + t * u
            cval = float(w @ cand)
            if cval < val - 1e-14 * (1.0 + abs(val)):
                x, val = cand, cval
                improved = True
        if not improved:
            break
    return x, val


def _support_infimum_oracle(f: OracleSet, w, rng, samples):
    """Expanding-radius sampled minimization with divergence detection.

    Radii run 1, 2, 4, ..., 2^14 times the box diameter.  Divergence is
    declared when the running minimum passes -scale_cap, or when it is
    still dropping by a relative margin across the last three rungs.
    Returns (value, best_point, history).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    w = np.asarray(w, dtype=float).reshape(-1)
    center = _find_member(f, rng)
    diam = f.box_diameter
    best_x = center
    best_val = float(w @ center)
    history = []
    per_rung = max(256, samples // 8)
    for k in range(15):
        radius = (2.0**k) * diam
        u = rng.normal(size=(per_rung, f.d))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        rad = radius * rng.uniform(0.0, 1.0, size=(per_rung, 1)) ** (1.0 / f.d)
        pts = center[None, :] + u * rad
        mask = f.member(pts)
        if np.any(mask):
            vals = pts[mask] @ w
            j = int(np.argmin(vals))
            if vals[j] < best_val:
                best_val = float(vals[j])
                best_x = pts[mask][j]
        best_x, best_val = _refine_minimum(f, w, best_x, best_val, radius, center)
        history.append(best_val)
        if best_val < -f.scale_cap:
            return -math.inf, best_x, history
    drops = np.diff(history)
    tail = -drops[-3:]
    scale = 1.0 + abs(history[-1])
    if np.all(tail > 1e-3 * scale):
        return -math.inf, best_x, history
    return best_val, best_x, history


def stab_membership(w, f, rng: np.random.Generator | None = None) -> bool:
    """Is w a stable direction: every nearby functional still contains f.

    H-rep: the LP max{t : sum mu_i w_i = w, mu_i >= t} restricted to
    span{w_i} must exceed 1e-9.  Generated cone: w must lie in the
    orthocomplement of the reversible-ray span and pair strictly
    positively with every generator outside it.  Oracle: w and its
    2 dim(S) perturbations along the dual span must all have finite
    support infima.
    """
    w = np.asarray(w, dtype=float).reshape(-1)
    if np.linalg.norm(w) == 0.0:
        raise ValueError("stability of the zero functional is undefined")
    if isinstance(f, HalfSpaceList):
        if not f.items:
            return False
        span = Subspace.from_spanning(f.d, f.normals())
        if not span.contains(w, tol=1e-9):
            return False
        m = len(f.items)
        w_mat = f.normals()
        # variables (mu, t): maximize t with mu_i - t >= 0, sum mu_i w_i = w
        a_ub = np.zeros((m, m + 1))
        a_ub[:, :m] = -np.eye(m)
        a_ub[:, m] = 1.0
        b_ub = np.zeros(m)
        a_eq = np.zeros((f.d, m + 1))
        a_eq[:, :m] = w_mat.T
        b_eq = w
        c = np.zeros(m + 1)
        c[m] = -1.0
        res = solve_lp(c, a_ub=a_ub, b_ub=b_ub, a_eq=a_eq, b_eq=b_eq)
        if res.status == "unbounded":
            return True
        if res.status != "optimal":
            return False
        return float(res.x[m]) > 1e-9
    if isinstance(f, GeneratedCone):
        lin = edge(f)
        if not lin.orthocomplement().contains(w, tol=1e-9):
            return False
        nw = np.linalg.norm(w)
        for g in f.rays:
            # generators inside the reversible span pair to zero anyway
            if np.linalg.norm(g - lin.project(g)) <= 1e-9 * np.linalg.norm(g):
                continue
            if float(g @ w) <= 1e-9 * np.linalg.norm(g) * nw:
                return False
        return True
    if isinstance(f, OracleSet):
        if rng is None:
            rng = np.random.default_rng(0)
        span = dual_span(f, rng=np.random.default_rng(12345))
        delta = 1e-4 * np.linalg.norm(w)
        trials = [w]
        for j in range(span.dim):
            s = span.basis[:, j]
            trials.append(w + delta * s)
            trials.append(w - delta * s)
        for trial in trials:
            val = support_infimum(f, trial, rng=np.random.default_rng(rng.integers(2**32)))
            if val == -math.inf:
                return False
        return True
    raise TypeError("stability test expects an H-rep, generated cone, or oracle set")


def supporting_test(f, w, rng: np.random.Generator | None = None):
    """Classify the direction w: supporting, strictly_containing, or
    not_containing, with the support value and a witness point."""
    w = np.asarray(w, dtype=float).reshape(-1)
    if isinstance(f, HalfSpaceList):
        if not f.items:
            if np.linalg.norm(w) <= 1e-12:
                return {"verdict": "supporting", "value": 0.0, "witness": np.zeros(f.d)}
            return {"verdict": "not_containing", "value": -math.inf, "witness": None}
        res = solve_lp(w, a_ub=-f.normals(), b_ub=-f.offsets())
        if res.status == "infeasible":
            raise EmptySetError("supporting test of an empty set is undefined")
        if res.status == "unbounded":
            return {"verdict": "not_containing", "value": -math.inf, "witness": None}
        return {"verdict": "supporting", "value": float(res.objective), "witness": res.x}
    if isinstance(f, GeneratedCone):
        f = f.as_vrep()
    if isinstance(f, VRep):
        val = support_infimum(f, w)
        if val == -math.inf:
            return {"verdict": "not_containing", "value": val, "witness": None}
        j = int(np.argmin(f.points @ w))
        return {"verdict": "supporting", "value": val, "witness": f.points[j]}
    if isinstance(f, OracleSet):
        if rng is None:
            rng = np.random.default_rng(0)
        val, x_best, history = _support_infimum_oracle(f, w, rng, 2048)
        if val == -math.inf:
            return {"verdict": "not_containing", "value": val, "witness": None}
        center = _find_member(f, np.random.default_rng(0))
        wander = float(np.linalg.norm(x_best - center))
        final_radius = (2.0**14) * f.box_diameter
        if wander > 0.5 * final_radius:
            return {"verdict": "strictly_containing", "value": val, "witness": None}
        return {"verdict": "supporting", "value": val, "witness": x_best}
    raise TypeError(f"unsupported representation {type(f)!r}")


# ---------------------------------------------------------------------------
# separation


def dykstra_project(z, f: HalfSpaceList, tol: float = 1e-10, max_cycles: int = 50000):
    """Nearest point of the H-rep set, by Dykstra's cyclic projections."""
    z = np.asarray(z, dtype=float).reshape(-1)
    if not f.items:
        return z.copy()
    if f.is_empty():
        raise EmptySetError("cannot project onto an empty set")
    m = len(f.items)
    x = z.copy()
    corrections = [np.zeros(f.d) for _ in range(m)]
    for _ in range(max_cycles):
        x_prev = x.copy()
        for i, (w, lam) in enumerate(f.items):
            y = x + corrections[i]
            viol = lam - float(w @ y)
            if viol > 0.0:
                xn = y + viol * w / float(w @ w)
            else:
                xn = y
            corrections[i] = y - xn
            x = xn
        if np.linalg.norm(x - x_prev) < tol:
            return x
    raise RuntimeError("cyclic projection did not converge")


def separate(z, f, rng: np.random.Generator | None = None):
    """Half-space (w, lam) with f strictly inside and z strictly outside.

    The normal points from z toward its nearest point p of f, the offset
    bisects the gap, and the guaranteed margin is |p - z| / 2.
    """
    z = np.asarray(z, dtype=float).reshape(-1)
    if isinstance(f, HalfSpaceList):
        if f.member(z, tol=1e-12):
            raise ValueError("the point belongs to the set; nothing to separate")
        p = dykstra_project(z, f)
    elif isinstance(f, OracleSet):
        if f.member(z):
            raise ValueError("the point belongs to the set; nothing to separate")
        if rng is None:
            rng = np.random.default_rng(0)
        p = _project_oracle(z, f, rng)
    else:
        raise TypeError("separation expects an H-rep or oracle set")
    gap = float(np.linalg.norm(p - z))
    if gap <= 1e-9:
        raise ValueError("the point is on the boundary within tolerance")
    w = (p - z) / gap
    lam = float(w @ (0.5 * (p + z)))
    return w, lam, 0.5 * gap


def _project_oracle(z, f: OracleSet, rng, rounds: int = 60):
    x = _find_member(f, rng)
    for _ in range(rounds):
        # project z onto the segment [x, boundary toward z], then polish
        u = z - x
        nu = np.linalg.norm(u)
        if nu <= 1e-15:
            break
        u = u / nu
        t_lo, t_hi = 0.0, nu
        if f.member(x + t_hi * u):
            return z.copy()
        for _ in range(60):
            mid = 0.5 * (t_lo + t_hi)
            if f.member(x + mid * u):
                t_lo = mid
            else:
                t_hi = mid
        x_bdry = x + t_lo * u
        improved = False
        for _ in range(30):
            v = rng.normal(size=f.d)
            v /= np.linalg.norm(v)
            step = 0.25 * np.linalg.norm(z - x_bdry)
            cand = x_bdry + step * v
            if f.member(cand) and np.linalg.norm(cand - z) < np.linalg.norm(x_bdry - z):
                x = cand
                improved = True
                break
        if not improved:
            return x_bdry
    return x


# ---------------------------------------------------------------------------
# diagnostics and fixtures


def convexity_spot_check(f: OracleSet, k: int = 64, rng: np.random.Generator | None = None) -> int:
    """Number of sampled member pairs whose midpoint escapes f."""
    if rng is None:
        rng = np.random.default_rng(0)
    pts = _sample_members_oracle(f, 2 * k, rng, boundary_bias=False)
    bad = 0
    for i in range(k):
        mid = 0.5 * (pts[2 * i] + pts[2 * i + 1])
        if not f.member(mid):
            bad += 1
    return bad


def parabola_region(box_half_width: float = 4.0, scale_cap: float = 1e6) -> OracleSet:
    """The closed region above a standard parabola: {(x, y) : y >= x^2 / 2}."""

    def member(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return pts[:, 1] >= 0.5 * pts[:, 0] ** 2 - 1e-12

    b = box_half_width
    return OracleSet(2, member, (np.array([-b, -b]), np.array([b, b])), scale_cap)
