"""Dense two-phase simplex solver with Bland's rule.

Solves  minimize c.x  subject to  a_ub x <= b_ub,  a_eq x = b_eq,
with variables either free (split into differences of nonnegatives)
or all nonnegative.  Problem sizes here stay small (a few dozen
variables), so a full-tableau method with an anti-cycling pivot rule
is the right tool: deterministic, exact termination, no tuning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LPResult", "solve_lp", "lp_feasible_point"]

_PIVOT_TOL = 1e-10
_COST_TOL = 1e-9


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    objective: float | None = None


class _SimplexTableau:
    def __init__(self, a: np.ndarray, b: np.ndarray, basis: list[int]):
        self.a = a
        self.b = b
        self.basis = basis

    def pivot(self, row: int, col: int) -> None:
        piv = self.a[row, col]
        self.a[row, :] /= piv
        self.b[row] /= piv
        for i in range(self.a.shape[0]):
            if i == row:
                continue
            f = self.a[i, col]
            if f != 0.0:
                self.a[i, :] -= f * self.a[row, :]
                self.b[i] -= f * self.b[row]
        self.basis[row] = col

    def reduced_costs(self, c: np.ndarray) -> np.ndarray:
        cb = c[self.basis]
        return c - cb @ self.a

    def run(self, c: np.ndarray, max_iter: int) -> str:
        """Minimize c over the current tableau with Bland's rule."""
        for _ in range(max_iter):
            r = self.reduced_costs(c)
            entering = -1
            for j in range(self.a.shape[1]):
                if r[j] < -_COST_TOL:
                    entering = j
                    break
            if entering < 0:
                return "optimal"
            leaving = -1
            best_ratio = np.inf
            for i in range(self.a.shape[0]):
                aij = self.a[i, entering]
                if aij > _PIVOT_TOL:
                    ratio = self.b[i] / aij
                    if ratio < best_ratio - 1e-12 or (
                        abs(ratio - best_ratio) <= 1e-12
                        and (leaving < 0 or self.basis[i] < self.basis[leaving])
                    ):
                        best_ratio = ratio
                        leaving = i
            if leaving < 0:
                return "unbounded"
            self.pivot(leaving, entering)
        raise RuntimeError("simplex iteration limit exceeded")


def _standard_form(c, a_ub, b_ub, a_eq, b_eq, nonneg):
    c = np.asarray(c, dtype=float).reshape(-1)
    n = c.size
    rows_a = []
    rows_b = []
    n_slack = 0
    if a_ub is not None:
        a_ub = np.atleast_2d(np.asarray(a_ub, dtype=float))
        b_ub = np.asarray(b_ub, dtype=float).reshape(-1)
        n_slack = a_ub.shape[0]
    if a_eq is not None:
        a_eq = np.atleast_2d(np.asarray(a_eq, dtype=float))
        b_eq = np.asarray(b_eq, dtype=float).reshape(-1)

    # columns: x (or x+, x-), then slacks
    width = n if nonneg else 2 * n
    if a_ub is not None:
        for i in range(a_ub.shape[0]):
            row = np.zeros(width + n_slack)
            row[:n] = a_ub[i]
            if not nonneg:
                row[n : 2 * n] = -a_ub[i]
            row[width + i] = 1.0
            rows_a.append(row)
            rows_b.append(b_ub[i])
    if a_eq is not None:
        for i in range(a_eq.shape[0]):
            row = np.zeros(width + n_slack)
            row[:n] = a_eq[i]
            if not nonneg:
                row[n : 2 * n] = -a_eq[i]
            rows_a.append(row)
            rows_b.append(b_eq[i])

    a = np.array(rows_a) if rows_a else np.zeros((0, width + n_slack))
    b = np.array(rows_b)
    cost = np.zeros(width + n_slack)
    cost[:n] = c
    if not nonneg:
        cost[n : 2 * n] = -c
    return a, b, cost, n, width


def solve_lp(c, a_ub=None, b_ub=None, a_eq=None, b_eq=None, nonneg=False) -> LPResult:
    """Two-phase simplex.  Variables are free unless nonneg=True."""
    a, b, cost, n, width = _standard_form(c, a_ub, b_ub, a_eq, b_eq, nonneg)
    m = a.shape[0]
    if m == 0:
        c_arr = np.asarray(c, dtype=float).reshape(-1)
        if nonneg:
            bounded = np.all(c_arr >= -_COST_TOL)
        else:
            bounded = np.all(np.abs(c_arr) <= _COST_TOL)
        if bounded:
            return LPResult("optimal", np.zeros(n), 0.0)
        return LPResult("unbounded", None, -np.inf)

    neg = b < 0
    a[neg, :] *= -1.0
    b = np.abs(b)

    n_cols = a.shape[1]
    # phase 1: artificial basis
    a1 = np.hstack([a, np.eye(m)])
    basis = list(range(n_cols, n_cols + m))
    tab = _SimplexTableau(a1, b.copy(), basis)
    phase1_cost = np.zeros(n_cols + m)
    phase1_cost[n_cols:] = 1.0
    max_iter = 2000 + 200 * (m + n_cols)
    status = tab.run(phase1_cost, max_iter)
    if status != "optimal":
        raise RuntimeError("phase 1 cannot be unbounded")
    phase1_obj = float(phase1_cost[tab.basis] @ tab.b)
    if phase1_obj > 1e-7:
        return LPResult("infeasible")

    # drive remaining artificials out of the basis, drop redundant rows
    keep_rows = []
    for i in range(m):
        if tab.basis[i] >= n_cols:
            pivot_col = -1
            for j in range(n_cols):
                if abs(tab.a[i, j]) > 1e-8:
                    pivot_col = j
                    break
            if pivot_col >= 0:
                tab.pivot(i, pivot_col)
                keep_rows.append(i)
            # else: redundant row, dropped below
        else:
            keep_rows.append(i)
    tab.a = tab.a[keep_rows, :n_cols]
    tab.b = tab.b[keep_rows]
    tab.basis = [tab.basis[i] for i in keep_rows]

    status = tab.run(cost, max_iter)
    if status == "unbounded":
        return LPResult("unbounded", None, -np.inf)
    z = np.zeros(n_cols)
    for i, bi in enumerate(tab.basis):
        z[bi] = tab.b[i]
    if nonneg:
        x = z[:n]
    else:
        x = z[:n] - z[n : 2 * n]
    return LPResult("optimal", x, float(cost @ z))


def lp_feasible_point(a_ub=None, b_ub=None, a_eq=None, b_eq=None, nonneg=False, dim=None):
    """A feasible point of the system, or None if infeasible."""
    if dim is None:
        if a_ub is not None:
            dim = np.atleast_2d(np.asarray(a_ub)).shape[1]
        elif a_eq is not None:
            dim = np.atleast_2d(np.asarray(a_eq)).shape[1]
        else:
            raise ValueError("cannot infer dimension")
    res = solve_lp(np.zeros(dim), a_ub, b_ub, a_eq, b_eq, nonneg=nonneg)
    if res.status == "optimal":
        return res.x
    return None
