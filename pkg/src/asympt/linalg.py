"""Exact row reduction over Q(i)."""

from __future__ import annotations

from .poly import ZERO, GaussianRational


def rref(rows: list[list]) -> tuple[list[list[GaussianRational]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[GaussianRational.coerce(v) for v in row] for row in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][col].inverse()
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: list[list]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: list[list], ncols: int | None = None) -> list[list[GaussianRational]]:
    """Basis of the right nullspace, one vector per free column, in column order."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    red, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        vec = [ZERO] * ncols
        vec[fcol] = GaussianRational(1)
        for row, pcol in zip(red, pivots):
            vec[pcol] = -row[fcol]
        basis.append(vec)
    return basis
