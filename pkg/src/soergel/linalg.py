"""Exact linear algebra over the rationals (lists of lists of Fraction)."""

from __future__ import annotations

from fractions import Fraction


def rref(rows, ncols=None):
    """Reduced row echelon form; returns ``(matrix, pivot_columns)``."""
    m = [[Fraction(v) for v in r] for r in rows]
    ncols = ncols if ncols is not None else (len(m[0]) if m else 0)
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows):
    return len(rref(rows)[1])


def nullspace(rows, ncols=None):
    """Basis of ``{v : A v = 0}``."""
    ncols = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    m, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(piv):
            v[c] = -m[i][f]
        basis.append(v)
    return basis


def solve(rows, rhs):
    """One solution of ``A v = rhs`` or ``None``."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, piv = rref(aug, ncols + 1)
    if ncols in piv:
        return None
    v = [Fraction(0)] * ncols
    for i, c in enumerate(piv):
        v[c] = m[i][ncols]
    return v


def inverse(rows):
    """Inverse of a square matrix, or ``None`` when singular."""
    n = len(rows)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    m, piv = rref(aug, n)
    if piv[:n] != list(range(n)) or len(piv) < n:
        return None
    return [row[n:] for row in m]


def matmul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a]
