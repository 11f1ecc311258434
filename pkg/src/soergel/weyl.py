"""The polynomial representation: permutation action, Demazure operators,
parabolic invariants and free-module coordinates."""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from math import inf

from soergel import linalg
from soergel.errors import (
    ContextMismatch,
    IndexOutOfRange,
    NonIntegral,
    NotFree,
    TruncationTooLow,
)


class ParabolicSubgroup:
    """``<s_i>`` or ``<s_i, s_j>`` with ``|i - j| == 1`` inside ``S_n``."""

    def __init__(self, gens, n):
        gens = tuple(sorted(set(int(g) for g in gens)))
        if not gens or len(gens) > 2:
            raise ValueError("supported parabolics: one or two adjacent generators")
        for g in gens:
            if not 1 <= g <= n - 1:
                raise IndexOutOfRange(f"generator s{g} outside 1..{n - 1}")
        if len(gens) == 2 and gens[1] - gens[0] != 1:
            raise ValueError("two generators must be adjacent")
        self.gens = gens
        self.n = n

    @property
    def rank(self):
        return len(self.gens)

    @property
    def base(self):
        return self.gens[0]

    @property
    def orbit_vars(self):
        a = self.gens[0]
        return tuple(range(a, a + len(self.gens) + 1))

    def staircase(self):
        """Exponent patterns ``(e_a, e_{a+1})`` of the basis monomials."""
        if self.rank == 1:
            return [(0, 0), (1, 0)]
        return [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)]

    def __eq__(self, other):
        return isinstance(other, ParabolicSubgroup) and (self.gens, self.n) == (other.gens, other.n)

    def __hash__(self):
        return hash((self.gens, self.n))

    def __repr__(self):
        return "<" + ",".join(f"s{g}" for g in self.gens) + ">"


def word_to_perm(word, n):
    """Index map of a word of simple transpositions, letters applied left
    to right, so ``(1, 2)`` sends ``1 -> 2 -> 3``."""
    img = list(range(1, n + 1))
    for i in word:
        if not 1 <= i <= n - 1:
            raise IndexOutOfRange(f"s{i} outside 1..{n - 1}")
        img = [i + 1 if v == i else i if v == i + 1 else v for v in img]
    return tuple(img)


def _monomials(n, d):
    if n == 1:
        yield (d,)
        return
    for e in range(d, -1, -1):
        for rest in _monomials(n - 1, d - e):
            yield (e,) + rest


class PolyRing:
    """``S[[x_1..x_n]]`` with the Demazure operators of a formal group law."""

    def __init__(self, ctx, law):
        if ctx.ring != law.ring or ctx.trunc != law.trunc:
            raise ContextMismatch("law and context disagree on ring or truncation")
        self.ctx = ctx
        self.law = law
        self.n = ctx.nvars
        self._solve_cache = {}

    def _idx(self, i):
        if not 1 <= i <= self.n - 1:
            raise IndexOutOfRange(f"index {i} outside 1..{self.n - 1}")

    def parabolic(self, gens):
        return ParabolicSubgroup(gens, self.n)

    # -- action ---------------------------------------------------------
    def s(self, i, f):
        self._idx(i)
        return f.swap(i)

    def act(self, w, f):
        """Permutation tuple of images, or a word (applied left to right)."""
        w = tuple(w)
        if len(w) == self.n and sorted(w) == list(range(1, self.n + 1)) and w != ():
            perm = w
        else:
            perm = word_to_perm(w, self.n)
        return f.permute_vars(perm)

    # -- Demazure operators ---------------------------------------------
    def demazure(self, i, f):
        self._idx(i)
        return f.divided_difference(i) * self.law.unit(self.ctx, i)

    def demazure_prime(self, i, f):
        self._idx(i)
        return f.divided_difference(i) * self.law.unit(self.ctx, i, mirrored=True)

    # -- invariants -----------------------------------------------------
    def orbit_sums(self, W, k):
        """Distinct ``W``-orbit sums of x-monomials of x-degree ``k``."""
        ov = [v - 1 for v in W.orbit_vars]
        seen = set()
        out = []
        for m in _monomials(self.n, k):
            if m in seen:
                continue
            orbit = set()
            for p in permutations(ov):
                y = list(m)
                for src, dst in zip(ov, p):
                    y[dst] = m[src]
                orbit.add(tuple(y))
            seen |= orbit
            out.append(sorted(orbit, reverse=True))
        return out

    def invariants_basis(self, W, d):
        """Basis of the ``W``-fixed x-polynomials of internal degree ``d``
        (scalar coefficients; parameters act as scalars on top of this)."""
        if d % 2:
            raise ValueError("invariant degrees are even")
        k = d // 2
        if k < 0:
            return []
        if k > self.ctx.trunc:
            raise TruncationTooLow(f"degree {d} needs x-degree {k} > {self.ctx.trunc}")
        ctx = self.ctx
        return [ctx.from_terms({(m, ()): 1 for m in orb}) for orb in self.orbit_sums(W, k)]

    # -- coordinates ----------------------------------------------------
    def basis(self, W):
        ctx = self.ctx
        a = W.base
        out = []
        for ea, eb in W.staircase():
            e = [0] * self.n
            e[a - 1] = ea
            if W.rank == 2:
                e[a] = eb
            out.append(ctx.monomial(e))
        return out

    def coords(self, W, r):
        """Coordinates ``p_b`` of ``r`` over the ``W``-invariants against the
        staircase basis, so that ``r == sum p_b * b``."""
        if r.ctx != self.ctx:
            raise ContextMismatch("series from another context")
        if W.rank == 1:
            i = W.base
            q = r.divided_difference(i)
            return [r - q * self.ctx.var(i), q]
        return self._coords_s3(W, r)

    def _system(self, W, D):
        key = (W, D)
        hit = self._solve_cache.get(key)
        if hit is not None:
            return hit
        rows = {m: i for i, m in enumerate(_monomials(self.n, D))}
        cols = []
        a = W.base - 1
        for ea, eb in W.staircase():
            k = D - ea - eb
            if k < 0:
                continue
            for orb in self.orbit_sums(W, k):
                cols.append(((ea, eb), orb))
        if len(cols) != len(rows):
            raise NotFree(f"staircase system at x-degree {D} is not square")
        mat = [[Fraction(0)] * len(cols) for _ in rows]
        for j, ((ea, eb), orb) in enumerate(cols):
            for m in orb:
                y = list(m)
                y[a] += ea
                y[a + 1] += eb
                mat[rows[tuple(y)]][j] = Fraction(1)
        inv = linalg.inverse(mat)
        if inv is None:
            raise NotFree(f"staircase monomials are not a basis at x-degree {D}")
        hit = (rows, cols, inv)
        self._solve_cache[key] = hit
        return hit

    def _coords_s3(self, W, r):
        ctx = self.ctx
        pats = W.staircase()
        acc = {pt: {} for pt in pats}
        by = {}
        for x, p, c in r.items():
            by.setdefault((sum(x), p), {})[x] = c
        for (D, p), vec in by.items():
            rows, cols, inv = self._system(W, D)
            rhs = [Fraction(0)] * len(rows)
            for x, c in vec.items():
                rhs[rows[x]] = c
            for j, (pt, orb) in enumerate(cols):
                sol = sum(inv[j][i] * rhs[i] for i in range(len(rhs)) if rhs[i])
                if sol:
                    for m in orb:
                        acc[pt][(m, p)] = acc[pt].get((m, p), 0) + sol
        out = []
        for pt in pats:
            prec = r.prec - sum(pt) if r.prec != inf else inf
            try:
                out.append(ctx.from_terms(acc[pt], prec=prec))
            except NonIntegral as exc:
                raise NotFree(f"coordinates are not integral: {exc}") from exc
        return out

    def combine(self, W, coords):
        return sum((p * b for p, b in zip(coords, self.basis(W))), self.ctx.zero())
