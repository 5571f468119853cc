"""Two-phase primal simplex with Bland's rule.

Solves ``min c.x  s.t.  A x = b, x >= 0`` on a dense tableau.  The same
code runs on float64 arrays (with small pivot tolerances) or on object
arrays of ``Fraction`` (tolerances zero, results exact).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

log = logging.getLogger(__name__)

PIVOT_EPS = 1e-11
MAX_PIVOTS = 200_000


@dataclass
class LPResult:
    status: str                 # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    objective: object | None
    infeasibility: object       # phase-1 optimum: sum of artificial values
    pivots: int


class _Tableau:
    def __init__(self, T, basis, exact):
        self.T = T
        self.basis = basis
        self.exact = exact
        self.eps = 0 if exact else PIVOT_EPS
        self.pivots = 0

    def pivot(self, r, c):
        T = self.T
        T[r] = T[r] / T[r, c]
        for i in range(T.shape[0]):
            if i != r and T[i, c] != 0:
                T[i] = T[i] - T[i, c] * T[r]
        if not self.exact:
            T[:, c] = 0.0
            T[r, c] = 1.0
        self.basis[r] = c
        self.pivots += 1
        if self.pivots > MAX_PIVOTS:
            raise RuntimeError("simplex pivot limit exceeded")

    def entering(self, allowed):
        cost = self.T[-1]
        for j in range(allowed):
            if cost[j] < -self.eps:
                return j
        return None

    def leaving(self, c):
        T = self.T
        best = None
        best_ratio = None
        for i in range(T.shape[0] - 1):
            a = T[i, c]
            if a <= self.eps:
                continue
            ratio = T[i, -1] / a
            if best is None:
                best, best_ratio = i, ratio
                continue
            tie = ratio == best_ratio if self.exact else abs(ratio - best_ratio) <= 1e-12
            if (not tie and ratio < best_ratio) or (tie and self.basis[i] < self.basis[best]):
                best, best_ratio = i, ratio
        return best

    def run(self, allowed):
        while True:
            c = self.entering(allowed)
            if c is None:
                return "optimal"
            r = self.leaving(c)
            if r is None:
                return "unbounded"
            self.pivot(r, c)


def linprog_bland(c, A, b, exact: bool | None = None, feas_tol: float = 1e-9) -> LPResult:
    """Minimize ``c.x`` over ``{x >= 0 : A x = b}``.

    ``exact`` defaults to True when every entry of ``b`` and ``c`` is a
    ``Fraction`` or int; ``A`` is assumed integer or rational.  In float
    mode a phase-1 residual above ``feas_tol`` means infeasible.
    """
    A = np.asarray(A)
    m, n = A.shape
    if exact is None:
        exact = all(isinstance(v, (Fraction, int, np.integer)) for v in list(b) + list(c))
    if exact:
        conv = np.vectorize(Fraction, otypes=[object])
        A = conv(A)
        b = conv(np.asarray(list(b), dtype=object))
        c = conv(np.asarray(list(c), dtype=object))
        zero, one = Fraction(0), Fraction(1)
        dtype = object
    else:
        A = A.astype(float)
        b = np.asarray(b, dtype=float)
        c = np.asarray(c, dtype=float)
        zero, one = 0.0, 1.0
        dtype = float

    T = np.full((m + 1, n + m + 1), zero, dtype=dtype)
    for i in range(m):
        sgn = -1 if b[i] < 0 else 1
        T[i, :n] = A[i] * sgn
        T[i, n + i] = one
        T[i, -1] = b[i] * sgn
    # phase-1 reduced costs: artificials cost 1
    T[-1] = -T[:m].sum(axis=0)
    T[-1, n:n + m] = zero
    tab = _Tableau(T, list(range(n, n + m)), exact)
    tab.run(n + m)
    infeas = -tab.T[-1, -1]
    if not exact and infeas < 0:
        infeas = 0.0
    if exact:
        feas_tol = 0
    if infeas > feas_tol:
        return LPResult("infeasible", None, None, infeas, tab.pivots)

    # drive zero-level artificials out of the basis, drop redundant rows
    keep = []
    for i in range(m):
        if tab.basis[i] < n:
            keep.append(i)
            continue
        row = tab.T[i, :n]
        j = next((j for j in range(n) if abs(row[j]) > tab.eps), None)
        if j is None:
            continue
        tab.pivot(i, j)
        keep.append(i)
    T = np.vstack([tab.T[keep][:, list(range(n)) + [-1]], np.full((1, n + 1), zero, dtype=dtype)])
    basis = [tab.basis[i] for i in keep]
    T[-1, :n] = c
    for i, j in enumerate(basis):
        if c[j] != 0:
            T[-1] = T[-1] - c[j] * T[i]
    tab2 = _Tableau(T, basis, exact)
    tab2.pivots = tab.pivots
    status = tab2.run(n)
    if status == "unbounded":
        return LPResult("unbounded", None, None, infeas, tab2.pivots)
    x = np.full(n, zero, dtype=dtype)
    for i, j in enumerate(tab2.basis):
        x[j] = tab2.T[i, -1]
    if not exact:
        x[np.abs(x) < 1e-15] = 0.0
    objective = sum((ci * xi for ci, xi in zip(c, x)), zero)
    log.debug("simplex finished after %d pivots", tab2.pivots)
    return LPResult("optimal", x, objective, infeas, tab2.pivots)
