"""Subsolution tests for functions sampled on rectangular grids.

Three routes to the same question, kept deliberately independent: a
classical route through centered second differences, a contact route
that hunts for touching quadratics, and a distributional route that
convolves the raw values against analytically differentiated mollifier
kernels.  Upper regularizations over shrinking balls tie the routes
together for semicontinuous data.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable, Optional

import numpy as np
from scipy import ndimage

from .jets import matrices_to_iso_vectors, min_eig_batch
from .subequations import SubequationSpec, sample_stable

__all__ = [
    "GridFunction",
    "read_grid",
    "write_grid",
    "grid_scale",
    "MollifierKernel",
    "c2_membership",
    "viscosity_check",
    "distributional_check",
    "ess_limsup",
    "regularization_properties",
]

_VALUE_CAP = 1e12
_NEG_CAP = -1e9


class GridFunction:
    """Values on a uniform rectangular grid; -inf marks removed points."""

    def __init__(self, origin, spacing, values) -> None:
        self.values = np.asarray(values, dtype=float)
        n = self.values.ndim
        self.origin = np.asarray(origin, dtype=float).reshape(-1)
        spacing = np.asarray(spacing, dtype=float)
        if spacing.ndim == 0:
            spacing = np.full(n, float(spacing))
        self.spacing = spacing.reshape(-1)
        if self.origin.size != n or self.spacing.size != n:
            raise ValueError("origin and spacing must match the value rank")
        if np.any(self.spacing <= 0):
            raise ValueError("grid spacing must be positive")
        if any(s < 5 for s in self.values.shape):
            raise ValueError("grids need at least 5 samples per axis")
        bad = np.isnan(self.values) | (self.values == np.inf)
        if np.any(bad):
            raise ValueError("grid values must be finite or -inf")
        finite = np.isfinite(self.values)
        if np.any(np.abs(self.values[finite]) >= _VALUE_CAP):
            raise ValueError("finite grid values must stay below 1e12")

    @property
    def n(self) -> int:
        return self.values.ndim

    @property
    def shape(self):
        return self.values.shape

    @property
    def h(self) -> float:
        return float(np.max(self.spacing))

    def axes(self):
        return [
            self.origin[i] + self.spacing[i] * np.arange(s)
            for i, s in enumerate(self.shape)
        ]

    def point(self, index) -> np.ndarray:
        return self.origin + self.spacing * np.asarray(index, dtype=float)

    def neginf_fraction(self) -> float:
        return float(np.mean(self.values == -np.inf))

    @classmethod
    def from_callable(cls, f: Callable, origin, spacing, shape) -> "GridFunction":
        grid = cls(origin, spacing, np.zeros(shape))
        mesh = np.meshgrid(*grid.axes(), indexing="ij")
        vals = f(*mesh)
        return cls(origin, spacing, np.asarray(vals, dtype=float))


def grid_scale(u: GridFunction) -> float:
    finite = np.isfinite(u.values)
    if not np.any(finite):
        return 1.0
    return max(1.0, float(np.max(np.abs(u.values[finite]))))


# ---------------------------------------------------------------------------
# text format


def _fmt(x: float) -> str:
    if x == -np.inf:
        return "-inf"
    return format(float(x), ".17g")


def write_grid(u: GridFunction, path: str) -> None:
    lines = [
        f"dim {u.n}",
        "shape " + " ".join(str(s) for s in u.shape),
        "origin " + " ".join(_fmt(v) for v in u.origin),
        "spacing " + " ".join(_fmt(v) for v in u.spacing),
    ]
    flat = u.values.reshape(u.shape[0], -1)
    for row in flat:
        lines.append(" ".join(_fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_token(tok: str) -> float:
    if tok == "-inf":
        return -np.inf
    return float(tok)


def read_grid(path: str) -> GridFunction:
    with open(path) as fh:
        tokens = fh.read().split()
    pos = 0

    def take(label: str, count: int):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != label:
            raise ValueError(f"expected {label!r} in grid header")
        out = tokens[pos + 1 : pos + 1 + count]
        if len(out) != count:
            raise ValueError("truncated grid header")
        pos += 1 + count
        return out

    n = int(take("dim", 1)[0])
    shape = tuple(int(t) for t in take("shape", n))
    origin = [_parse_token(t) for t in take("origin", n)]
    spacing = [_parse_token(t) for t in take("spacing", n)]
    body = tokens[pos:]
    expect = int(np.prod(shape))
    if len(body) != expect:
        raise ValueError(f"grid body has {len(body)} values, expected {expect}")
    values = np.array([_parse_token(t) for t in body]).reshape(shape)
    return GridFunction(origin, spacing, values)


# ---------------------------------------------------------------------------
# mollifier tables


def _bump_tables(n: int, eps: float, grids):
    """Sample the bump density and its exact derivatives on an offset mesh."""
    mesh = np.meshgrid(*grids, indexing="ij")
    x = np.stack(mesh, axis=-1)
    s = np.linalg.norm(x, axis=-1) / eps
    inside = s < 1.0
    t2 = np.where(inside, s**2, 0.0)
    phi = np.where(inside, np.exp(-1.0 / (1.0 - t2)), 0.0)
    gp = -2.0 * s / (1.0 - t2) ** 2
    gpp = -2.0 / (1.0 - t2) ** 2 - 8.0 * t2 / (1.0 - t2) ** 3
    phi_p = np.where(inside, gp * phi, 0.0)
    phi_pp = np.where(inside, (gpp + gp**2) * phi, 0.0)
    # radial-to-cartesian: the ratio phi'(s)/s has the finite limit phi''(0)
    ratio = np.where(
        s > 1e-12, phi_p / np.where(s > 1e-12, s, 1.0), -2.0 * np.exp(-1.0)
    )
    xhat = np.where(s[..., None] > 1e-12, x / (eps * np.maximum(s, 1e-300))[..., None], 0.0)
    grad = [phi_p / eps * xhat[..., i] for i in range(n)]
    hess = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            radial = phi_pp * xhat[..., i] * xhat[..., j]
            tangent = ratio * ((1.0 if i == j else 0.0) - xhat[..., i] * xhat[..., j])
            hess[i][j] = (radial + tangent) / eps**2
    return phi, grad, hess


def _apply_moments(table: np.ndarray, rows, targets, vol: float) -> np.ndarray:
    """Minimal-norm additive correction pinning the listed moments.

    Rows of a single parity only touch same-parity components of the
    table, so the even or odd symmetry of each kernel survives.
    """
    v = np.stack([r.reshape(-1) for r in rows])
    current = v @ table.reshape(-1) * vol
    resid = np.asarray(targets, dtype=float) - current
    delta, *_ = np.linalg.lstsq(v * vol, resid, rcond=None)
    return table + delta.reshape(table.shape)


class MollifierKernel:
    """Bump kernel tables that integrate the grid interpolant exactly.

    The density and its analytic derivatives are sampled on a refined
    mesh, convolved with the multilinear hat so a grid convolution
    reproduces the integral of the piecewise-multilinear interpolant,
    then moment-corrected so jets of polynomials up to degree three come
    out exact.
    """

    def __init__(self, n: int, eps: float, spacing, refine: int = 8) -> None:
        spacing = np.asarray(spacing, dtype=float)
        if spacing.ndim == 0:
            spacing = np.full(n, float(spacing))
        if eps < 3.0 * float(np.max(spacing)):
            raise ValueError("mollifier radius must be at least 3 cells")
        self.n = int(n)
        self.eps = float(eps)
        self.spacing = spacing
        self.cell_volume = float(np.prod(spacing))
        q = int(refine)
        # table reach is eps plus one cell: the hat spreads each sample
        half = [int(math.floor(eps / spacing[i])) + 1 for i in range(n)]
        fine = [
            spacing[i] / q * np.arange(-half[i] * q, half[i] * q + 1) for i in range(n)
        ]
        phi, grad, hess = _bump_tables(n, eps, fine)
        kappa = 1.0 / (float(np.sum(phi)) * self.cell_volume / q**n)
        hat1 = 1.0 - np.abs(np.arange(-q + 1, q)) / q
        hat = hat1
        for _ in range(n - 1):
            hat = np.multiply.outer(hat, hat1)
        hat = hat / q**n

        def coarsen(fine_table):
            mixed = ndimage.convolve(fine_table, hat, mode="constant", cval=0.0)
            sl = tuple(slice(None, None, q) for _ in range(n))
            return kappa * mixed[sl]

        rho = coarsen(phi)
        grad = [coarsen(g) for g in grad]
        hess = [[coarsen(hess[i][j]) for j in range(n)] for i in range(n)]

        # moment targets: exact mass, isotropic spread m2, exact first
        # derivatives of linears, exact second derivatives of quadratics,
        # and third moments of the gradient tables consistent with m2
        coarse = [spacing[i] * np.arange(-half[i], half[i] + 1) for i in range(n)]
        mesh = np.meshgrid(*coarse, indexing="ij")
        vol = self.cell_volume
        fine_vol = vol / q**n
        m2 = kappa * fine_vol * float(np.sum(phi * np.meshgrid(*fine, indexing="ij")[0] ** 2))
        self.m2 = m2

        one = np.ones_like(rho)
        sq = [mesh[i] ** 2 for i in range(n)]
        rows = [one] + [sq[i] for i in range(n)] + [
            mesh[i] * mesh[j] for i in range(n) for j in range(i + 1, n)
        ]
        targets = [1.0] + [m2] * n + [0.0] * (n * (n - 1) // 2)
        self.rho = _apply_moments(rho, rows, targets, vol)

        self.grad = []
        for i in range(n):
            rows = [mesh[k] for k in range(n)]
            targets = [-(1.0 if k == i else 0.0) for k in range(n)]
            for a in range(n):
                for b in range(a, n):
                    for c in range(b, n):
                        rows.append(mesh[a] * mesh[b] * mesh[c])
                        want = 0.0
                        for perm in ((a, b, c), (b, a, c), (c, a, b)):
                            if perm[0] == i and perm[1] == perm[2]:
                                want -= m2
                        targets.append(want)
            self.grad.append(_apply_moments(grad[i], rows, targets, vol))

        self.hess = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                rows = [one] + [sq[k] for k in range(n)] + [
                    mesh[a] * mesh[b] for a in range(n) for b in range(a + 1, n)
                ]
                targets = [0.0]
                for k in range(n):
                    targets.append(2.0 if (i == j == k) else 0.0)
                for a in range(n):
                    for b in range(a + 1, n):
                        targets.append(1.0 if (a, b) == (i, j) else 0.0)
                fixed = _apply_moments(hess[i][j], rows, targets, vol)
                self.hess[i][j] = fixed
                self.hess[j][i] = fixed

    def mass(self) -> float:
        return float(np.sum(self.rho)) * self.cell_volume

    def lop_kernel(self, op) -> np.ndarray:
        """Table of the operator applied to the kernel, L rho."""
        out = op.c * self.rho
        b = np.asarray(op.b, dtype=float)
        for i in range(self.n):
            if b[i] != 0.0:
                out = out + b[i] * self.grad[i]
        a = op.a.full()
        for i in range(self.n):
            for j in range(self.n):
                if a[i, j] != 0.0:
                    out = out + a[i, j] * self.hess[i][j]
        return out


# ---------------------------------------------------------------------------
# membership of sampled jets


def _jets_in_spec(spec: SubequationSpec, r, p, amats, tol: float):
    """Vectorized jet membership with a curvature pad of tol * identity."""
    r = np.asarray(r, dtype=float).reshape(-1)
    p = np.atleast_2d(np.asarray(p, dtype=float))
    amats = np.asarray(amats, dtype=float)
    n = spec.n
    padded = amats + tol * np.eye(n)
    if spec.kind == "builtin_psd":
        return min_eig_batch(padded) >= -1e-9
    vecs = np.hstack([r[:, None], p, matrices_to_iso_vectors(padded)])
    if spec.kind == "halfspace_list":
        rep = spec.rep
        w = rep.normals()
        lam = rep.offsets()
        slack = vecs @ w.T - lam
        row_tol = tol * (1.0 + np.linalg.norm(w, axis=1))
        return np.all(slack >= -row_tol, axis=1)
    return spec.rep.member(vecs)


def _central_jets(u: GridFunction):
    """Centered-difference jets on the interior, with a validity mask."""
    v = u.values
    n = u.n
    core = tuple(slice(1, -1) for _ in range(n))
    finite = np.isfinite(v)
    ok = np.ones(v[core].shape, dtype=bool)
    for offset in np.ndindex(*(3,) * n):
        sl = tuple(slice(o, s - 2 + o) for o, s in zip(offset, v.shape))
        ok &= finite[sl]

    def shifted(delta):
        sl = tuple(slice(1 + d, s - 1 + d) for d, s in zip(delta, v.shape))
        return v[sl]

    r = v[core]
    grad = np.empty(r.shape + (n,))
    hess = np.empty(r.shape + (n, n))
    eye = np.eye(n, dtype=int)
    for i in range(n):
        hi, lo = shifted(eye[i]), shifted(-eye[i])
        grad[..., i] = (hi - lo) / (2.0 * u.spacing[i])
        hess[..., i, i] = (hi - 2.0 * r + lo) / u.spacing[i] ** 2
        for j in range(i + 1, n):
            mix = (
                shifted(eye[i] + eye[j])
                - shifted(eye[i] - eye[j])
                - shifted(-eye[i] + eye[j])
                + shifted(-eye[i] - eye[j])
            ) / (4.0 * u.spacing[i] * u.spacing[j])
            hess[..., i, j] = mix
            hess[..., j, i] = mix
    return r, grad, hess, ok


def c2_membership(u: GridFunction, spec: SubequationSpec, tol: Optional[float] = None) -> dict:
    """Treat u as twice differentiable and test its difference jets."""
    if spec.n != u.n:
        raise ValueError("spec and grid dimensions differ")
    if tol is None:
        tol = 10.0 * u.h**2 * grid_scale(u)
    r, grad, hess, ok = _central_jets(u)
    idx = np.argwhere(ok)
    if idx.shape[0] == 0:
        return {"ok": True, "checked": 0, "skipped": int(ok.size), "failures": [], "tol": tol}
    flat_r = r[ok]
    flat_p = grad[ok]
    flat_a = hess[ok]
    inside = _jets_in_spec(spec, flat_r, flat_p, flat_a, tol)
    failures = []
    for k in np.nonzero(~inside)[0][:32]:
        failures.append(
            {
                "index": tuple(int(t) + 1 for t in idx[k]),
                "jet": (float(flat_r[k]), flat_p[k].tolist(), flat_a[k].tolist()),
            }
        )
    return {
        "ok": bool(np.all(inside)),
        "checked": int(inside.size),
        "skipped": int(ok.size - inside.size),
        "failed": int(np.count_nonzero(~inside)),
        "failures": failures,
        "tol": tol,
    }


# ---------------------------------------------------------------------------
# contact route


_PROBE_MAGNITUDES = [0.0] + [2.0**k for k in range(-4, 5)]
_TOUCH_TOL = 1e-6


def _ball_offsets(n: int, spacing, radius: float):
    half = [int(math.floor(radius / spacing[i])) for i in range(n)]
    out = []
    for off in np.ndindex(*(2 * h + 1 for h in half)):
        delta = np.array(off) - half
        if float(np.linalg.norm(delta * spacing)) <= radius + 1e-12:
            out.append(delta)
    return np.array(out)


def viscosity_check(
    u: GridFunction,
    spec: SubequationSpec,
    radius_cells: int = 2,
    tol: Optional[float] = None,
    stride: int = 1,
) -> dict:
    """Hunt for touching quadratics and test their jets.

    A point with no verifiable contact imposes no condition; only a
    verified contact whose jet lands outside the constraint set counts
    as a failure.  Points at -inf never admit a contact.
    """
    if spec.n != u.n:
        raise ValueError("spec and grid dimensions differ")
    if radius_cells < 2:
        raise ValueError("contact radius must span at least 2 cells")
    if tol is None:
        tol = 10.0 * u.h**2 * grid_scale(u)
    n = u.n
    radius = radius_cells * u.h
    offsets = _ball_offsets(n, u.spacing, radius)
    deltas = offsets * u.spacing
    nz = np.linalg.norm(deltas, axis=1) > 0
    # least-squares design for one gradient and one symmetric curvature block
    cols = [deltas[:, i] for i in range(n)]
    pairs = [(i, i) for i in range(n)] + [
        (i, j) for i in range(n) for j in range(i + 1, n)
    ]
    for i, j in pairs:
        if i == j:
            cols.append(0.5 * deltas[:, i] ** 2)
        else:
            cols.append(deltas[:, i] * deltas[:, j])
    design = np.stack(cols, axis=1)
    touch_pad = _TOUCH_TOL * np.sum(deltas**2, axis=1)
    sq = 0.5 * np.sum(deltas**2, axis=1)

    margin = [int(math.floor(radius / u.spacing[i])) for i in range(n)]
    scale = grid_scale(u)
    checked = contacts = no_contact = 0
    failures = []
    candidates = sorted(m * s for m in _PROBE_MAGNITUDES for s in ((1.0, -1.0) if m else (1.0,)))
    jets = []
    positions = []
    for index in np.ndindex(*(s - 2 * m for s, m in zip(u.shape, margin))):
        center = tuple(i + m for i, m in zip(index, margin))
        if any(c % stride for c in center):
            continue
        u0 = u.values[center]
        if u0 == -np.inf:
            continue
        checked += 1
        nb = u.values[tuple((offsets + np.array(center)).T)]
        known = np.isfinite(nb)
        diffs = nb - u0
        fit_mask = known & nz
        if np.count_nonzero(fit_mask) < design.shape[1]:
            no_contact += 1
            continue
        coef, *_ = np.linalg.lstsq(design[fit_mask], diffs[fit_mask], rcond=None)
        base = design @ coef
        best = None
        for mu in candidates:
            resid = base + mu * sq - diffs + touch_pad
            if np.min(resid[known]) >= -1e-12 * scale:
                best = mu
                break
        if best is None:
            no_contact += 1
            continue
        contacts += 1
        grad = coef[:n]
        a = np.zeros((n, n))
        for c, (i, j) in zip(coef[n:], pairs):
            a[i, j] = c
            a[j, i] = c
        a += best * np.eye(n)
        jets.append((float(u0), grad.copy(), a))
        positions.append(center)
    if jets:
        rr = np.array([j[0] for j in jets])
        pp = np.array([j[1] for j in jets])
        aa = np.array([j[2] for j in jets])
        inside = _jets_in_spec(spec, rr, pp, aa, tol)
        for k in np.nonzero(~inside)[0][:32]:
            failures.append(
                {
                    "index": tuple(int(t) for t in positions[k]),
                    "jet": (float(rr[k]), pp[k].tolist(), aa[k].tolist()),
                }
            )
        bad = int(np.count_nonzero(~inside))
    else:
        bad = 0
    return {
        "ok": bad == 0,
        "checked": checked,
        "contacts": contacts,
        "no_contact": no_contact,
        "failed": bad,
        "failures": failures,
        "tol": tol,
    }


# ---------------------------------------------------------------------------
# distributional route


def distributional_check(
    u: GridFunction,
    spec: SubequationSpec,
    samples: int = 8,
    eps: Optional[float] = None,
    tol: Optional[float] = None,
    rng: Optional[np.random.Generator] = None,
    stable: Optional[list] = None,
) -> dict:
    """Convolve u against operator-applied mollifiers and compare levels.

    One convolution per stable sample; the test region keeps a full
    kernel radius away from the boundary so truncation never enters.
    """
    if spec.n != u.n:
        raise ValueError("spec and grid dimensions differ")
    if rng is None:
        rng = np.random.default_rng(0)
    if eps is None:
        eps = 6.0 * u.h
    if eps < 3.0 * u.h:
        raise ValueError("mollifier radius must be at least 3 cells")
    if tol is None:
        tol = 2.0 * grid_scale(u) * (u.h / eps) ** 2
    frac = u.neginf_fraction()
    if frac >= 0.1:
        raise ValueError("too many removed points for a meaningful convolution")
    warned = False
    if frac > 1e-3:
        warnings.warn("capping a noticeable fraction of removed points", stacklevel=2)
        warned = True
    capped = np.where(u.values == -np.inf, _NEG_CAP, u.values)
    if stable is None:
        stable = sample_stable(spec, samples, rng)
    kern = MollifierKernel(u.n, eps, u.spacing)
    # the interpolation hat widens the kernel reach by one cell, so the
    # trusted region stays a full table radius away from the boundary
    mask = np.ones(u.shape, dtype=bool)
    for i, s in enumerate(u.shape):
        dist = np.minimum(np.arange(s), s - 1 - np.arange(s)) * u.spacing[i]
        sl = [None] * u.n
        sl[i] = slice(None)
        mask &= dist[tuple(sl)] > eps + u.spacing[i]
    if not np.any(mask):
        raise ValueError("grid too small for the requested mollifier radius")
    rows = []
    ok = True
    for op, lam in stable:
        kernel = kern.lop_kernel(op) * kern.cell_volume
        conv = ndimage.convolve(capped, kernel, mode="constant", cval=0.0)
        worst = float(np.min(conv[mask]))
        passed = worst >= lam - tol
        ok &= passed
        rows.append({"level": float(lam), "min_value": worst, "ok": passed})
    return {
        "ok": bool(ok),
        "samples": len(stable),
        "eps": float(eps),
        "tol": float(tol),
        "capped_fraction": frac,
        "warned": warned,
        "rows": rows,
    }


# ---------------------------------------------------------------------------
# upper regularization


def ess_limsup(u: GridFunction, radii) -> dict:
    """Running maxima over shrinking balls, largest radius first."""
    radii = [float(r) for r in radii]
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly decreasing")
    if any(r < 2.0 * u.h for r in radii):
        raise ValueError("radii must stay at least two cells wide")
    stack = []
    for r in radii:
        offs = _ball_offsets(u.n, u.spacing, r)
        half = offs.max(axis=0)
        fp = np.zeros(2 * half + 1, dtype=bool)
        for o in offs:
            fp[tuple(o + half)] = True
        filtered = ndimage.maximum_filter(
            u.values, footprint=fp, mode="constant", cval=-np.inf
        )
        stack.append((r, GridFunction(u.origin, u.spacing, filtered)))
    return {"limsup": stack[-1][1], "stack": stack}


def regularization_properties(
    u: GridFunction, radii, modulus: Callable[[float], float]
) -> dict:
    """Exact monotonicity, pointwise domination, and a modulus bound."""
    out = ess_limsup(u, radii)
    stack = out["stack"]
    monotone = all(
        np.all(small.values <= large.values)
        for (_, large), (_, small) in zip(stack, stack[1:])
    )
    tight = out["limsup"]
    dominates = bool(np.all(u.values <= tight.values + 1e-12))
    r_min = stack[-1][0]
    bound = u.values + modulus(r_min)
    excess = tight.values - bound
    finite = np.isfinite(excess)
    max_excess = float(np.max(excess[finite])) if np.any(finite) else 0.0
    modulus_ok = bool(np.all(tight.values <= bound + 1e-12))
    return {
        "monotone": bool(monotone),
        "dominates": dominates,
        "modulus_ok": modulus_ok,
        "max_excess": max_excess,
        "limsup": tight,
        "stack": stack,
    }
