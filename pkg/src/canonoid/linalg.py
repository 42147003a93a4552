"""Exact Gauss-Jordan elimination over the rationals."""

from fractions import Fraction
from typing import List, Optional, Sequence


def rref(matrix: Sequence[Sequence], rhs: Sequence = None):
    """Reduced row echelon form of ``[matrix | rhs]``.

    Returns ``(rows, rhs, pivots)`` on fresh copies; the inputs are not
    modified.
    """
    m = [[Fraction(x) for x in row] for row in matrix]
    t = [Fraction(x) for x in rhs] if rhs is not None else None
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        pr = next((i for i in range(r, n_rows) if m[i][c]), None)
        if pr is None:
            continue
        if pr != r:
            m[r], m[pr] = m[pr], m[r]
            if t is not None:
                t[r], t[pr] = t[pr], t[r]
        piv = m[r][c]
        if piv != 1:
            m[r] = [x / piv for x in m[r]]
            if t is not None:
                t[r] /= piv
        row = m[r]
        nz = [j for j in range(c, n_cols) if row[j]]
        for i in range(n_rows):
            if i != r and m[i][c]:
                f = m[i][c]
                mi = m[i]
                for j in nz:
                    mi[j] -= f * row[j]
                if t is not None:
                    t[i] -= f * t[r]
        pivots.append(c)
        r += 1
    return m, t, pivots


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> Optional[List[Fraction]]:
    """One exact solution of ``matrix @ x = rhs`` or ``None`` if inconsistent.

    Free variables are set to zero, so the result is deterministic.
    """
    n_cols = len(matrix[0]) if matrix else 0
    m, t, pivots = rref(matrix, rhs)
    for i in range(len(pivots), len(m)):
        if t[i]:
            return None
    x = [Fraction(0)] * n_cols
    for i, c in enumerate(pivots):
        x[c] = t[i]
    return x


def inverse(matrix: Sequence[Sequence]) -> Optional[List[List[Fraction]]]:
    """Exact inverse of a square matrix, ``None`` if singular."""
    n = len(matrix)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(matrix)]
    m, _, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        return None
    return [row[n:] for row in m]
