"""Second-order jet space as a flat Euclidean vector space.

A 2-jet on R^n is a triple (r, p, A): value, gradient, symmetric Hessian.
The space is identified with R^d, d = 1 + n + n(n+1)/2, through the
coordinate order (r, p, packed A).  The packed A block uses the trace
inner product <a, A> = tr(aA); off-diagonal entries are scaled by sqrt(2)
in the flat vector so the Euclidean dot product on R^d reproduces it.
Linear constraints on jets, their symbols, and the small symmetric
eigenproblems they need all live here.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "SymMatrix",
    "Jet2",
    "JetOperator",
    "JetHalfSpace",
    "sym_dim",
    "jet_dim",
    "pair",
    "symbol",
    "jacobi_eigensystem",
    "min_eigenvalue",
    "min_eig_batch",
    "iso_vectors_to_matrices",
    "matrices_to_iso_vectors",
    "rank_one_projector",
    "jet_to_vec",
    "vec_to_jet",
    "op_to_vec",
    "vec_to_op",
]

_SQRT2 = math.sqrt(2.0)


def sym_dim(n: int) -> int:
    """Number of packed entries of a symmetric n x n matrix."""
    return n * (n + 1) // 2


def jet_dim(n: int) -> int:
    """Flat dimension of the 2-jet space over R^n."""
    return 1 + n + sym_dim(n)


def _upper_indices(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i, n)]


class SymMatrix:
    """Symmetric matrix stored as its upper triangle, row-major.

    Entries are the raw matrix entries (no scaling).  The reconstructed
    full matrix is symmetric by construction.  Instances are read-only.
    """

    __slots__ = ("n", "packed")

    def __init__(self, n: int, packed) -> None:
        packed = np.asarray(packed, dtype=float).reshape(-1)
        if n < 1:
            raise ValueError("matrix dimension must be positive")
        if packed.size != sym_dim(n):
            raise ValueError(
                f"expected {sym_dim(n)} packed entries for n={n}, got {packed.size}"
            )
        packed = packed.copy()
        packed.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "packed", packed)

    def __setattr__(self, name, value):
        raise AttributeError("SymMatrix is immutable")

    @staticmethod
    def from_full(m) -> "SymMatrix":
        m = np.asarray(m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("expected a square matrix")
        if not np.allclose(m, m.T, atol=1e-10):
            raise ValueError("matrix is not symmetric")
        n = m.shape[0]
        sym = 0.5 * (m + m.T)
        packed = np.array([sym[i, j] for i, j in _upper_indices(n)])
        return SymMatrix(n, packed)

    @staticmethod
    def zeros(n: int) -> "SymMatrix":
        return SymMatrix(n, np.zeros(sym_dim(n)))

    @staticmethod
    def eye(n: int) -> "SymMatrix":
        return SymMatrix.from_full(np.eye(n))

    def full(self) -> np.ndarray:
        m = np.zeros((self.n, self.n))
        for k, (i, j) in enumerate(_upper_indices(self.n)):
            m[i, j] = self.packed[k]
            m[j, i] = self.packed[k]
        return m

    def iso_vector(self) -> np.ndarray:
        """Flat coordinates with off-diagonal entries scaled by sqrt(2).

        With this scaling np.dot on flat vectors equals the trace inner
        product tr(aA) on the matrices.
        """
        v = self.packed.copy()
        for k, (i, j) in enumerate(_upper_indices(self.n)):
            if i != j:
                v[k] *= _SQRT2
        return v

    @staticmethod
    def from_iso_vector(n: int, v) -> "SymMatrix":
        v = np.asarray(v, dtype=float).reshape(-1).copy()
        if v.size != sym_dim(n):
            raise ValueError("wrong flat vector length")
        for k, (i, j) in enumerate(_upper_indices(n)):
            if i != j:
                v[k] /= _SQRT2
        return SymMatrix(n, v)

    def trace_pair(self, other: "SymMatrix") -> float:
        """Trace inner product tr(self @ other)."""
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        total = 0.0
        for k, (i, j) in enumerate(_upper_indices(self.n)):
            w = 1.0 if i == j else 2.0
            total += w * self.packed[k] * other.packed[k]
        return total

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return SymMatrix(self.n, self.packed + other.packed)

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return SymMatrix(self.n, self.packed - other.packed)

    def __mul__(self, t: float) -> "SymMatrix":
        return SymMatrix(self.n, self.packed * float(t))

    __rmul__ = __mul__

    def __neg__(self) -> "SymMatrix":
        return SymMatrix(self.n, -self.packed)

    def __repr__(self) -> str:
        return f"SymMatrix(n={self.n}, packed={self.packed.tolist()})"


class Jet2:
    """A 2-jet (r, p, a): value, gradient, symmetric Hessian part."""

    __slots__ = ("r", "p", "a")

    def __init__(self, r: float, p, a: SymMatrix) -> None:
        p = np.asarray(p, dtype=float).reshape(-1)
        if p.size != a.n:
            raise ValueError("gradient length must match matrix dimension")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "r", float(r))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "a", a)

    def __setattr__(self, name, value):
        raise AttributeError("Jet2 is immutable")

    @property
    def n(self) -> int:
        return self.a.n

    def __repr__(self) -> str:
        return f"Jet2(r={self.r}, p={self.p.tolist()}, a={self.a!r})"


class JetOperator:
    """Constant-coefficient linear jet functional (c, b, a).

    Acts on a jet (r, p, A) as tr(aA) + <b, p> + c r.
    """

    __slots__ = ("c", "b", "a")

    def __init__(self, c: float, b, a: SymMatrix) -> None:
        b = np.asarray(b, dtype=float).reshape(-1)
        if b.size != a.n:
            raise ValueError("first-order coefficient length must match dimension")
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "c", float(c))
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a", a)

    def __setattr__(self, name, value):
        raise AttributeError("JetOperator is immutable")

    @property
    def n(self) -> int:
        return self.a.n

    def is_zero(self, tol: float = 0.0) -> bool:
        return (
            abs(self.c) <= tol
            and bool(np.all(np.abs(self.b) <= tol))
            and bool(np.all(np.abs(self.a.packed) <= tol))
        )

    def __repr__(self) -> str:
        return f"JetOperator(c={self.c}, b={self.b.tolist()}, a={self.a!r})"


class JetHalfSpace:
    """Closed jet half-space {J : pair(op, J) >= lam} with op nonzero."""

    __slots__ = ("op", "lam")

    def __init__(self, op: JetOperator, lam: float) -> None:
        if op.is_zero():
            raise ValueError("half-space functional must be nonzero")
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "lam", float(lam))

    def __setattr__(self, name, value):
        raise AttributeError("JetHalfSpace is immutable")

    @property
    def n(self) -> int:
        return self.op.n

    def contains(self, jet: Jet2, tol: float = 0.0) -> bool:
        return pair(self.op, jet) >= self.lam - tol

    def __repr__(self) -> str:
        return f"JetHalfSpace(op={self.op!r}, lam={self.lam})"


def pair(op: JetOperator, jet: Jet2) -> float:
    """Evaluate the functional: tr(aA) + <b, p> + c r."""
    if op.n != jet.n:
        raise ValueError("dimension mismatch")
    return op.a.trace_pair(jet.a) + float(np.dot(op.b, jet.p)) + op.c * jet.r


def symbol(op: JetOperator) -> SymMatrix:
    """Principal symbol: the second-order coefficient block."""
    return op.a


def jacobi_eigensystem(
    m, tol: float = 1e-12, max_sweeps: int = 100
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of a symmetric matrix by Jacobi rotations.

    Cyclic-by-row sweeps annihilate off-diagonal entries until the
    off-diagonal Frobenius norm drops below tol.  Returns eigenvalues in
    ascending order and the matching eigenvectors as columns.
    """
    if isinstance(m, SymMatrix):
        a = m.full()
    else:
        a = np.array(m, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("expected a square matrix")
        if not np.allclose(a, a.T, atol=1e-10):
            raise ValueError("matrix is not symmetric")
        a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    scale = max(1.0, float(np.max(np.abs(a))))
    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a[off_mask]))
        if off < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * scale:
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e10:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = math.copysign(1.0, theta) / (
                        abs(theta) + math.sqrt(theta * theta + 1.0)
                    )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                rot_p = c * v[:, p] - s * v[:, q]
                rot_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    eigvals = np.diag(a).copy()
    order = np.argsort(eigvals, kind="stable")
    return eigvals[order], v[:, order]


def min_eigenvalue(m, tol: float = 1e-12) -> float:
    """Smallest eigenvalue of a symmetric matrix via Jacobi rotations."""
    eigvals, _ = jacobi_eigensystem(m, tol=tol)
    return float(eigvals[0])


def iso_vectors_to_matrices(n: int, packed: np.ndarray) -> np.ndarray:
    """Batch inverse of iso_vector: (N, sym_dim) -> (N, n, n)."""
    packed = np.atleast_2d(np.asarray(packed, dtype=float))
    out = np.zeros((packed.shape[0], n, n))
    for k, (i, j) in enumerate(_upper_indices(n)):
        if i == j:
            out[:, i, i] = packed[:, k]
        else:
            out[:, i, j] = packed[:, k] / _SQRT2
            out[:, j, i] = packed[:, k] / _SQRT2
    return out


def matrices_to_iso_vectors(mats: np.ndarray) -> np.ndarray:
    """Batch iso_vector packing: (N, n, n) -> (N, sym_dim)."""
    mats = np.asarray(mats, dtype=float)
    if mats.ndim == 2:
        mats = mats[None, :, :]
    n = mats.shape[1]
    out = np.zeros((mats.shape[0], sym_dim(n)))
    for k, (i, j) in enumerate(_upper_indices(n)):
        if i == j:
            out[:, k] = mats[:, i, i]
        else:
            out[:, k] = _SQRT2 * 0.5 * (mats[:, i, j] + mats[:, j, i])
    return out


def min_eig_batch(mats: np.ndarray) -> np.ndarray:
    """Smallest eigenvalues of a batch of symmetric matrices.

    Closed forms for n <= 2 keep the hot membership paths vectorized;
    larger sizes fall back to per-matrix Jacobi sweeps.
    """
    mats = np.asarray(mats, dtype=float)
    if mats.ndim == 2:
        mats = mats[None, :, :]
    n = mats.shape[1]
    if n == 1:
        return mats[:, 0, 0].copy()
    if n == 2:
        half_tr = 0.5 * (mats[:, 0, 0] + mats[:, 1, 1])
        half_gap = 0.5 * (mats[:, 0, 0] - mats[:, 1, 1])
        disc = np.sqrt(half_gap**2 + mats[:, 0, 1] ** 2)
        return half_tr - disc
    return np.array([min_eigenvalue(m) for m in mats])


def rank_one_projector(e) -> SymMatrix:
    """Projector e e^T onto the line through a unit vector e."""
    e = np.asarray(e, dtype=float).reshape(-1)
    norm = float(np.linalg.norm(e))
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"direction must be a unit vector, got |e| = {norm}")
    return SymMatrix.from_full(np.outer(e, e))


def jet_to_vec(jet: Jet2) -> np.ndarray:
    """Flat coordinates (r, p, packed A) with the isometric A block."""
    return np.concatenate(([jet.r], jet.p, jet.a.iso_vector()))


def vec_to_jet(n: int, v) -> Jet2:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size != jet_dim(n):
        raise ValueError("wrong flat vector length")
    return Jet2(v[0], v[1 : 1 + n], SymMatrix.from_iso_vector(n, v[1 + n :]))


def op_to_vec(op: JetOperator) -> np.ndarray:
    """Flat coordinates (c, b, packed a); dual to jet_to_vec under np.dot."""
    return np.concatenate(([op.c], op.b, op.a.iso_vector()))


def vec_to_op(n: int, v) -> JetOperator:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size != jet_dim(n):
        raise ValueError("wrong flat vector length")
    return JetOperator(v[0], v[1 : 1 + n], SymMatrix.from_iso_vector(n, v[1 + n :]))
