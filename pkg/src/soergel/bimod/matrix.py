"""Matrices of series, morphism inversion and degreewise rank certificates."""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from soergel import linalg
from soergel.bimod.core import Morphism, prune
from soergel.errors import NotInvertible

PRIME = (1 << 61) - 1


def basis_keys(S, X):
    return [(j, lab) for j, s in enumerate(X.summands) for lab in S.labels(s.gen)]


def to_matrix(phi):
    """``(rows, cols, M)`` with ``M[r][c]`` the coefficient of target key
    ``rows[r]`` in the image of source key ``cols[c]``."""
    S = phi.setting
    rows = basis_keys(S, phi.target)
    cols = basis_keys(S, phi.source)
    zero = S.ctx.zero()
    M = [[phi.images[c].get(r, zero) for c in cols] for r in rows]
    return rows, cols, M


def from_matrix(S, source, target, M, name=None):
    rows = basis_keys(S, target)
    cols = basis_keys(S, source)
    images = {c: prune({r: M[a][b] for a, r in enumerate(rows)}) for b, c in enumerate(cols)}
    return Morphism(S, source, target, images, name)


def _matmul(ctx, A, B):
    n, m, k = len(A), len(B), len(B[0]) if B else 0
    zero = ctx.zero()
    out = [[zero] * k for _ in range(n)]
    for i in range(n):
        row = A[i]
        for t in range(m):
            a = row[t]
            if not a:
                continue
            Bt = B[t]
            oi = out[i]
            for j in range(k):
                if Bt[j]:
                    oi[j] = oi[j] + a * Bt[j]
    return out


def _scalar(s):
    return Fraction(s.terms.get(0, 0), s.den)


def invert_matrix(ctx, M):
    """Two-sided inverse of a square matrix of series.

    The scalar part ``C`` must be invertible (over the integers when the
    base is ``Z``); the rest is inverted by the product
    ``C^-1 (1 + T)(1 + T^2)(1 + T^4)..`` with ``T = 1 - M C^-1``.
    """
    n = len(M)
    C = [[_scalar(M[i][j]) for j in range(n)] for i in range(n)]
    Ci = linalg.inverse(C) if n else []
    if Ci is None:
        raise NotInvertible("scalar part of the matrix is singular")
    if ctx.ring.integral and any(v.denominator != 1 for r in Ci for v in r):
        raise NotInvertible("scalar part is not invertible over the integers")
    Cs = [[ctx.const(v) for v in r] for r in Ci]
    one = ctx.one()
    MC = _matmul(ctx, M, Cs)
    T = [[(one if i == j else ctx.zero()) - MC[i][j] for j in range(n)] for i in range(n)]
    acc = Cs
    Q = T
    # T has no scalar part, so its powers gain x-degree (pure parameter
    # terms lower the label degree and are nilpotent)
    for _ in range(4 * (ctx.trunc + 2) + n):
        if all(not v for r in Q for v in r):
            break
        IQ = [[(one if i == j else ctx.zero()) + Q[i][j] for j in range(n)] for i in range(n)]
        acc = _matmul(ctx, acc, IQ)
        Q = _matmul(ctx, Q, Q)
    else:
        raise NotInvertible("inverse series did not converge")
    return acc


def invert_morphism(phi, name=None):
    """Left-linear inverse of ``phi``; both composites are checked."""
    S = phi.setting
    rows, cols, M = to_matrix(phi)
    if len(rows) != len(cols):
        raise NotInvertible("source and target ranks differ")
    inv = from_matrix(S, phi.target, phi.source, invert_matrix(S.ctx, M), name)
    for comp in (inv @ phi, phi @ inv):
        d = comp.agrees(S.identity(comp.source))
        if d is not None:
            raise NotInvertible(f"inverse fails at x-degree {d}")
    return inv


# -- degreewise pieces -------------------------------------------------------
def _param_monomials(params, weight):
    """Exponent vectors of parameter monomials of total weight ``weight``
    (each parameter of degree ``-2w`` has weight ``w``)."""
    ws = [-d // 2 for _, d in params]
    out = []

    def rec(k, left, acc):
        if k == len(ws):
            if left == 0:
                out.append(tuple(acc))
            return
        for e in range(left // ws[k] + 1):
            rec(k + 1, left - e * ws[k], acc + [e])

    if weight >= 0:
        rec(0, weight, [])
    return out


def _xmonomials(n, d):
    if n == 0:
        return [()] if d == 0 else []
    return [m for m in product(range(d + 1), repeat=n) if sum(m) == d]


class GradedPiece:
    """Basis ``(key, xexp, pexp)`` of the internal-degree-``d`` part of an
    object, modulo total x-degree (coefficient plus label) above ``cutoff``.

    Morphisms never lower the total x-degree, so this quotient is stable.
    """

    def __init__(self, S, X, d, cutoff):
        params = S.ctx.ring.params
        self.index = {}
        self.basis = []
        self.ldeg = {}
        for key in basis_keys(S, X):
            j, lab = key
            s = X.summands[j]
            ld = S.label_xdeg(s.gen, lab)
            self.ldeg[key] = ld
            base = 2 * ld + s.shift
            for k in range(cutoff - ld + 1):
                rest = 2 * k + base - d
                if rest < 0 or rest % 2:
                    continue
                pms = _param_monomials(params, rest // 2)
                if not pms:
                    continue
                for m in _xmonomials(S.n, k):
                    for p in pms:
                        self.index[(key, m, p)] = len(self.basis)
                        self.basis.append((key, m, p))

    def __len__(self):
        return len(self.basis)


def piece_matrix(phi, P, Q, cutoff):
    """Sparse rows (one per source basis vector of ``P``) of ``phi`` restricted
    to degree pieces ``P -> Q``, as ``{col: Fraction}``."""
    cache = {}
    rows = []
    for key, m, p in P.basis:
        terms = cache.get(key)
        if terms is None:
            terms = [(tk, x, q, c) for tk, ser in phi.images[key].items() for x, q, c in ser.items()]
            cache[key] = terms
        row = {}
        lim = cutoff - sum(m)
        for tk, x, q, c in terms:
            if sum(x) + Q.ldeg[tk] > lim:
                continue
            y = tuple(a + b for a, b in zip(m, x))
            r = tuple(a + b for a, b in zip(p, q))
            col = Q.index.get((tk, y, r))
            if col is None:
                raise ValueError(f"image leaves the degree piece at {tk}")
            row[col] = row.get(col, 0) + c
        rows.append({k: v for k, v in row.items() if v})
    return rows


def rank_mod_p(rows, p=PRIME):
    """Rank of sparse rational rows modulo ``p``; never exceeds the rank
    over the rationals."""
    pivots = {}
    rank = 0
    for row in rows:
        r = {}
        for k, v in row.items():
            den = v.denominator % p
            if den == 0:
                raise ZeroDivisionError("denominator vanishes modulo p")
            w = v.numerator * pow(den, -1, p) % p
            if w:
                r[k] = w
        while r:
            lead = min(r)
            piv = pivots.get(lead)
            if piv is None:
                inv = pow(r[lead], -1, p)
                pivots[lead] = {k: v * inv % p for k, v in r.items()}
                rank += 1
                break
            f = r[lead]
            for k, v in piv.items():
                w = (r.get(k, 0) - f * v) % p
                if w:
                    r[k] = w
                else:
                    r.pop(k, None)
    return rank


def rank_exact(rows, ncols):
    dense = [[row.get(c, Fraction(0)) for c in range(ncols)] for row in rows]
    return linalg.rank(dense) if dense else 0


def certified_rank(rows, ncols, want):
    """Rank, computed modulo a prime first and exactly only if the modular
    rank falls short of ``want``."""
    try:
        r = rank_mod_p(rows)
    except ZeroDivisionError:
        r = -1
    if r >= want:
        return r
    return rank_exact(rows, ncols)


def specialized_rows(phi, P, cutoff, values, p=PRIME):
    """Rows of the parameter-free generators of ``P`` under ``phi``, with
    parameters replaced by ``values`` modulo ``p``; columns are
    ``(target key, xexp)``.  The rank is a lower bound for the rank over
    the fraction field of the parameter ring."""
    rows = []
    for key, m, pe in P.basis:
        if any(pe):
            continue
        row = {}
        for tk, ser in phi.images[key].items():
            for x, q, c in ser.items():
                if sum(x) + sum(m) > cutoff:
                    continue
                w = c.numerator * pow(c.denominator % p, -1, p)
                for v, e in zip(values, q):
                    w = w * pow(v, e, p)
                col = (tk, tuple(a + b for a, b in zip(m, x)))
                row[col] = (row.get(col, 0) + w) % p
        rows.append({k: Fraction(v) for k, v in row.items() if v})
    return rows
