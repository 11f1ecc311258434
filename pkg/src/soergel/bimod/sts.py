"""The rank-two parabolic: splitting of ``EB_iji``, the commuting squares,
degreewise exactness and the injectivity of ``(m_i, ms_i)``."""

from __future__ import annotations

import random

from soergel.bimod.core import block_matrix, check_equivariance
from soergel.bimod.maps import (
    Biproduct,
    delta_map,
    m_map,
    ms_map,
    mu_iji,
    mu_map,
    nabla_left,
    nabla_right,
    parabolic_sep,
    restrict_map,
    verify_biproduct,
    whisker,
)
from soergel.bimod.matrix import (
    PRIME,
    GradedPiece,
    certified_rank,
    invert_morphism,
    piece_matrix,
    rank_mod_p,
    specialized_rows,
)
from soergel.errors import IndexOutOfRange, VerificationFailed


def _check_pair(S, i, j):
    parabolic_sep(i, j)
    if S.n < 3 or max(i, j) > S.n - 1 or min(i, j) < 1:
        raise IndexOutOfRange(f"s{i}, s{j} need rank n >= 3 covering both")


def unit_closed_form(S, i, j):
    """``-g(x_i,x_{i+1})^-1 g(x_{i+1},x_i) g(a, b)`` with ``(a, b)`` equal to
    ``(x_i -F x_{i+2}, x_{i+1} -F x_{i+2})`` for ``j = i+1`` and to
    ``(x_{i-1} -F x_{i+1}, x_{i-1} -F x_i)`` for ``j = i-1``."""
    L, ctx = S.law, S.ctx
    x = ctx.variables()
    if j == i + 1:
        a, b = L.diff(x[i - 1], x[i + 1]), L.diff(x[i], x[i + 1])
    else:
        a, b = L.diff(x[i - 2], x[i]), L.diff(x[i - 2], x[i - 1])
    return -(L.unit(ctx, i).invert() * L.unit(ctx, i, mirrored=True) * L.g_at(a, b))


def section_f(S, i, j):
    """``EB_i(2) -> EB_iji``: ``r1 (x) r2 -> r1 (x) (x_j(x)1 -F 1(x)x_{j+1}) (x) r2``."""
    mu = mu_map(S, i).reindexed(S.EB(i, shift=2), S.EB(i, i, shift=2))
    f = whisker(S, (i,), delta_map(S, j), (i,)) @ mu
    f.name = f"f{i}{j}{i}"
    return f


def projection_p(S, i, j, side="L"):
    """``nabla_i o (EB_i (x) m_j (x) EB_i): EB_iji -> EB_i(2)``."""
    nab = nabla_left(S, i) if side == "L" else nabla_right(S, i)
    p = nab @ whisker(S, (i,), m_map(S, j), (i,))
    p.name = f"p{side}{i}{j}{i}"
    return p


class Split121:
    """``EB_iji == EB_{i,j} (+) EB_i(2)`` with idempotent ``e`` onto the
    ``EB_i(2)`` summand; ``mu_iji`` identifies ``EB_{i,j}`` with ``Im(1 - e)``."""

    def __init__(self, i, j, side, f, p, u, u_inv, e, q, biproduct, unit=None):
        self.i, self.j, self.side = i, j, side
        self.f, self.p, self.u, self.u_inv = f, p, u, u_inv
        self.e, self.q = e, q
        self.biproduct = biproduct
        self.unit = unit

    @property
    def relations(self):
        return self.biproduct.relations

    @property
    def certified(self):
        return self.biproduct.certified


def split_121(S, i, j, side="L"):
    _check_pair(S, i, j)
    if side not in ("L", "R"):
        raise ValueError("side is 'L' or 'R'")
    f = section_f(S, i, j)
    p = projection_p(S, i, j, side)
    u = p @ f
    unit = None
    if side == "L":
        unit = S.R.demazure_prime(i, S.law.root(S.ctx, j))
        bad = u.agrees(S.identity(u.source).left_mul(unit))
        if bad is not None:
            raise VerificationFailed("unit", bad)
    u_inv = invert_morphism(u, "u^-1")
    sec = f @ u_inv
    mu = mu_iji(S, i, j)
    M = block_matrix(S, mu.source + sec.source, mu.target, {(0, 0): mu, (0, 1): sec})
    Minv = invert_morphism(M)
    q = Minv.block(0, 0)
    q.name = "q"
    check_equivariance(q)
    bad = Minv.block(1, 0).agrees(p)
    if bad is not None:
        raise VerificationFailed("projection", bad)
    bip = verify_biproduct(S, mu, q, sec, p)
    e = sec @ p
    bad = (e @ e).agrees(e)
    if bad is not None:
        raise VerificationFailed("idempotent", bad)
    bip.relations["idempotent"] = (e @ e).certified()
    return Split121(i, j, side, f, p, u, u_inv, e, q, bip, unit)


# -- commuting squares and exactness -------------------------------------
def sts_squares(S, i, j):
    """The two squares through ``mu_iji`` and ``mu_jij``; returns
    ``{name: (lhs, rhs)}`` of morphisms out of ``EB_{i,j}``."""
    a = mu_iji(S, i, j)
    b = mu_iji(S, j, i)
    sq1 = (whisker(S, (i, j), m_map(S, i), ()) @ a, whisker(S, (), m_map(S, j), (i, j)) @ b)
    sq2 = (whisker(S, (), m_map(S, i), (j, i)) @ a, whisker(S, (j, i), m_map(S, j), ()) @ b)
    return {"st-square": sq1, "ts-square": sq2}


def pushout_sequence(S, i, j):
    """``EB_{i,j} -a-> EB_iji (+) EB_i -b-> EB_ii`` with ``a = (mu_iji, res)``
    and ``b = (EB_i (x) m_j (x) EB_i, -mu_i)``."""
    A = S.EB(parabolic_sep(i, j))
    B = S.EB(i, j, i) + S.EB(i)
    C = S.EB(i, i)
    a = block_matrix(S, A, B, {(0, 0): mu_iji(S, i, j), (1, 0): restrict_map(S, i, j)})
    b = block_matrix(S, B, C, {(0, 0): whisker(S, (i,), m_map(S, j), (i,)), (0, 1): -mu_map(S, i)})
    return A, B, C, a, b


def degreewise_exactness(S, A, B, C, a, b, max_degree, cutoff=None):
    """Ranks of ``0 -> A -> B -> C -> 0`` in internal degrees ``0..max_degree``;
    returns ``{degree: (dim A, rank a, dim B, rank b, dim C)}`` or raises."""
    comp = b @ a
    bad = comp.agrees(S.zero_map(A, C))
    if bad is not None:
        raise VerificationFailed("exactness", bad, {"stage": "b o a"})
    if cutoff is None:
        cutoff = min(a.certified(), b.certified())
    out = {}
    lo = min(s.shift for X in (A, B, C) for s in X.summands)
    for d in range(lo, max_degree + 1):
        PA, PB, PC = (GradedPiece(S, X, d, cutoff) for X in (A, B, C))
        if not (len(PA) or len(PB) or len(PC)):
            continue
        ra = certified_rank(piece_matrix(a, PA, PB, cutoff), len(PB), len(PA))
        rb = certified_rank(piece_matrix(b, PB, PC, cutoff), len(PC), len(PC))
        out[d] = (len(PA), ra, len(PB), rb, len(PC))
        if ra != len(PA) or rb != len(PC) or ra + rb != len(PB):
            raise VerificationFailed("exactness", d, {"dims": out[d]})
    return out


class StsReport:
    def __init__(self, squares, exactness, certified):
        self.squares = squares
        self.exactness = exactness
        self.certified = certified


def check_sts_square(S, i, j, max_degree=None):
    _check_pair(S, i, j)
    results = {}
    for name, (lhs, rhs) in sts_squares(S, i, j).items():
        bad = lhs.agrees(rhs)
        if bad is not None:
            raise VerificationFailed(name, bad)
        results[name] = min(lhs.certified(), rhs.certified())
    if max_degree is None:
        max_degree = 2 * S.ctx.trunc
    ex = degreewise_exactness(S, *pushout_sequence(S, i, j), max_degree)
    return StsReport(results, ex, min(results.values()))


def gkm_injectivity(S, i, D=None):
    """``(m_i, ms_i): EB_i -> R (+) Rs_i`` is injective in internal degrees
    ``<= D``.

    Returns ``{degree: (generators, rank)}`` counting free generators over
    the parameter ring (their rank is taken with parameters specialized
    modulo a prime).  Injectivity on the full degree piece, parameter
    multiples included, is checked as well.
    """
    if not 1 <= i <= S.n - 1:
        raise IndexOutOfRange(f"index {i} outside 1..{S.n - 1}")
    N = S.ctx.trunc
    D = 2 * N if D is None else D
    if D > 2 * N:
        raise ValueError(f"degree bound {D} exceeds 2N = {2 * N}")
    X = S.EB(i)
    T = S.Rreg() + S.Rs(i)
    phi = block_matrix(S, X, T, {(0, 0): m_map(S, i), (1, 0): ms_map(S, i)})
    cutoff = phi.certified()
    rng = random.Random(0x5EED)
    values = [rng.randrange(2, PRIME - 1) for _ in S.ctx.ring.params]
    out = {}
    for d in range(0, D + 1, 2):
        P, Q = GradedPiece(S, X, d, cutoff), GradedPiece(S, T, d, cutoff)
        r = certified_rank(piece_matrix(phi, P, Q, cutoff), len(Q), len(P))
        if r != len(P):
            raise VerificationFailed("gkm-injectivity", d, {"dim": len(P), "rank": r})
        gens = specialized_rows(phi, P, cutoff, values)
        rs = rank_mod_p(gens)
        if rs != len(gens):
            raise VerificationFailed("gkm-injectivity", d, {"generators": len(gens), "rank": rs})
        out[d] = (len(gens), rs)
    return out


__all__ = [
    "Biproduct",
    "Split121",
    "check_sts_square",
    "gkm_injectivity",
    "projection_p",
    "pushout_sequence",
    "section_f",
    "split_121",
    "sts_squares",
    "unit_closed_form",
]
