"""Exact Gauss-Jordan elimination over the rationals."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class RREF:
    """Reduced row echelon form ``R = T @ A`` with the row transform ``T``."""

    R: tuple[tuple[Fraction, ...], ...]
    T: tuple[tuple[Fraction, ...], ...]
    pivots: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def rref(A: Sequence[Sequence]) -> RREF:
    rows = [[Fraction(x) for x in r] for r in A]
    m = len(rows)
    n = len(rows[0]) if m else 0
    T = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        T[r], T[p] = T[p], T[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        T[r] = [x / piv for x in T[r]]
        for i in range(m):
            f = rows[i][c]
            if i != r and f != 0:
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
                T[i] = [a - f * b for a, b in zip(T[i], T[r])]
        pivots.append(c)
        r += 1
    return RREF(tuple(map(tuple, rows)), tuple(map(tuple, T)), tuple(pivots))


def rank(A: Sequence[Sequence]) -> int:
    if not A:
        return 0
    return rref(A).rank


def nullspace(red: RREF, ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}``, one vector per free column."""
    free = [c for c in range(ncols) if c not in red.pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in enumerate(red.pivots):
            v[pc] = -red.R[row][f]
        basis.append(v)
    return basis
