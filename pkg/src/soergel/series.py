"""Truncated multivariate power series over graded coefficient rings.

A series lives in a :class:`TruncationContext` fixing the number of
variables ``x1..xn``, the truncation degree ``N`` and the coefficient ring.
Terms are stored as packed integer monomials (parameters in the low fields,
then the x-exponents, then the total x-degree in the top field) mapping to
integer numerators over one shared positive denominator.

Every series also carries ``prec``: the largest x-degree up to which its
terms are certified.  Exact results (polynomials that never lost a term) have
``prec == inf``; truncation, division and divided differences lower it.
Equality compares two series up to the smaller ``prec``.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, inf

from soergel import kernels
from soergel.errors import (
    ContextMismatch,
    MissingParameter,
    NonIntegral,
    NonzeroConstantTerm,
    NotAUnit,
    NotDivisible,
    TruncationTooLow,
)

BASES = ("Z", "Q")


class CoefficientRing:
    """Integers or rationals adjoined graded polynomial parameters.

    Parameters
    ----------
    base : {"Z", "Q"}
    params : sequence of (name, degree)
        Degrees must be even and non-positive.
    """

    __slots__ = ("base", "params", "_index")

    def __init__(self, base="Z", params=()):
        base = {"integers": "Z", "rationals": "Q"}.get(base, base)
        if base not in BASES:
            raise ValueError(f"unknown base ring {base!r}")
        params = tuple((str(n), int(d)) for n, d in params)
        names = [n for n, _ in params]
        if len(set(names)) != len(names):
            raise ValueError("parameter names must be distinct")
        for n, d in params:
            if d > 0 or d % 2:
                raise ValueError(f"parameter {n} has degree {d}; need even and <= 0")
            if not n.isidentifier() or n.startswith("x") and n[1:].isdigit():
                raise ValueError(f"invalid parameter name {n!r}")
        self.base = base
        self.params = params
        self._index = {n: k for k, (n, _) in enumerate(params)}

    @property
    def integral(self):
        return self.base == "Z"

    @property
    def names(self):
        return tuple(n for n, _ in self.params)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise MissingParameter(f"ring has no parameter {name!r}") from None

    def _key(self):
        return (self.base, self.params)

    def __eq__(self, other):
        return isinstance(other, CoefficientRing) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        ps = ", ".join(f"{n}:{d}" for n, d in self.params)
        return f"CoefficientRing({self.base}[{ps}])"


class TruncationContext:
    """Variables ``x1..xn`` modulo total x-degree ``> trunc``."""

    def __init__(self, nvars, trunc, ring=None):
        if nvars < 1:
            raise ValueError("need at least one variable")
        if trunc < 2:
            raise TruncationTooLow(f"truncation degree {trunc} < 2")
        ring = ring if ring is not None else CoefficientRing()
        self.nvars = int(nvars)
        self.trunc = int(trunc)
        self.ring = ring
        k = len(ring.params)
        fields = 1 + self.nvars + k
        w = min(16, 63 // fields)
        if w < 3 or self.trunc >= 1 << (w - 1):
            raise ValueError("too many variables/parameters for the packed layout")
        self.width = w
        self.mask = (1 << w) - 1
        self.pshift = tuple(j * w for j in range(k))
        self.xshift = tuple((k + i) * w for i in range(self.nvars))
        self.dshift = (k + self.nvars) * w
        self.guard = sum(1 << (s + w - 1) for s in self.pshift)
        self.pdeg = tuple(d for _, d in ring.params)
        self._unpack = {}
        self._idegree = {}

    # -- layout ---------------------------------------------------------
    def pack(self, xexp, pexp=()):
        key = sum(xexp) << self.dshift
        for e, s in zip(xexp, self.xshift):
            key += e << s
        lim = 1 << (self.width - 1)
        for e, s in zip(pexp, self.pshift):
            if e >= lim:
                raise OverflowError("parameter exponent exceeds packed field width")
            key += e << s
        return key

    def unpack(self, key):
        r = self._unpack.get(key)
        if r is None:
            m = self.mask
            r = (
                tuple((key >> s) & m for s in self.xshift),
                tuple((key >> s) & m for s in self.pshift),
            )
            self._unpack[key] = r
        return r

    def xdeg(self, key):
        return key >> self.dshift

    def internal_degree(self, key):
        d = self._idegree.get(key)
        if d is None:
            _, p = self.unpack(key)
            d = 2 * (key >> self.dshift) + sum(a * b for a, b in zip(p, self.pdeg))
            self._idegree[key] = d
        return d

    def limit(self, d):
        """Smallest key of x-degree ``d + 1``."""
        return (d + 1) << self.dshift

    # -- comparison -----------------------------------------------------
    def _key(self):
        return (self.nvars, self.trunc, self.ring)

    def __eq__(self, other):
        return isinstance(other, TruncationContext) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"TruncationContext(n={self.nvars}, N={self.trunc}, {self.ring!r})"

    def with_nvars(self, n):
        return TruncationContext(n, self.trunc, self.ring)

    def with_ring(self, ring):
        return TruncationContext(self.nvars, self.trunc, ring)

    # -- constructors ---------------------------------------------------
    def zero(self):
        return TruncatedSeries(self, {}, 1, inf)

    def one(self):
        return self.const(1)

    def const(self, c):
        c = Fraction(c)
        if not c:
            return self.zero()
        return _make(self, {0: c.numerator}, c.denominator, inf)

    def var(self, i):
        """The variable ``x_i`` (1-based)."""
        if not 1 <= i <= self.nvars:
            raise IndexError(f"variable x{i} outside 1..{self.nvars}")
        e = [0] * self.nvars
        e[i - 1] = 1
        return TruncatedSeries(self, {self.pack(e): 1}, 1, inf)

    def variables(self):
        return [self.var(i) for i in range(1, self.nvars + 1)]

    def param(self, name):
        k = self.ring.index(name)
        p = [0] * len(self.pdeg)
        p[k] = 1
        return TruncatedSeries(self, {self.pack([0] * self.nvars, p): 1}, 1, inf)

    def monomial(self, xexp, pexp=(), coeff=1):
        return self.from_terms({(tuple(xexp), tuple(pexp)): coeff})

    def from_terms(self, terms, prec=inf):
        """Build a series from ``{(xexp, pexp): scalar}``.

        Terms above the truncation degree are dropped (and ``prec`` capped).
        """
        fr = {}
        np_ = len(self.pdeg)
        for (xe, pe), c in terms.items():
            c = Fraction(c)
            if not c:
                continue
            xe = tuple(xe)
            pe = tuple(pe) + (0,) * (np_ - len(pe))
            if len(xe) != self.nvars or len(pe) != np_:
                raise ValueError("exponent vector has the wrong length")
            if sum(xe) > min(prec, self.trunc):
                prec = min(prec, self.trunc)
                continue
            k = self.pack(xe, pe)
            fr[k] = fr.get(k, 0) + c
        return _from_fractions(self, fr, prec)

    def parse(self, text):
        from soergel.textfmt import parse_series

        return parse_series(self, text)


def _from_fractions(ctx, fr, prec):
    fr = {k: v for k, v in fr.items() if v}
    den = 1
    for v in fr.values():
        den = den * v.denominator // gcd(den, v.denominator)
    terms = {k: int(v * den) for k, v in fr.items()}
    return _make(ctx, terms, den, prec)


def _make(ctx, terms, den, prec):
    """Normalise: drop terms above ``prec``, reduce the denominator."""
    if prec != inf:
        top = min(prec, ctx.trunc)
        lim = ctx.limit(top)
        if any(k >= lim for k in terms):
            terms = {k: v for k, v in terms.items() if k < lim}
    if not terms:
        return TruncatedSeries(ctx, {}, 1, prec)
    if den != 1:
        g = den
        for v in terms.values():
            g = gcd(g, v)
            if g == 1:
                break
        if g != 1:
            terms = {k: v // g for k, v in terms.items()}
            den //= g
        if den != 1 and ctx.ring.integral:
            raise NonIntegral(f"non-integral coefficient with denominator {den}")
    return TruncatedSeries(ctx, terms, den, prec)


def _lcm(a, b):
    return a * b // gcd(a, b)


class TruncatedSeries:
    """Immutable truncated power series; see the module docstring."""

    __slots__ = ("ctx", "terms", "den", "prec")

    def __init__(self, ctx, terms, den=1, prec=inf):
        self.ctx = ctx
        self.terms = terms
        self.den = den
        self.prec = prec

    # -- inspection -----------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    @property
    def exact(self):
        return self.prec == inf

    @property
    def certified(self):
        return min(self.prec, self.ctx.trunc)

    def valuation(self):
        """Lowest x-degree present (``prec + 1`` for a truncated zero)."""
        if not self.terms:
            return self.prec + 1
        return min(self.terms) >> self.ctx.dshift

    def max_xdeg(self):
        if not self.terms:
            return -1
        return max(self.terms) >> self.ctx.dshift

    def items(self):
        """Yield ``(xexp, pexp, Fraction)`` in canonical order."""
        ctx = self.ctx
        for k in sorted(self.terms, key=_canon_key(ctx)):
            x, p = ctx.unpack(k)
            yield x, p, Fraction(self.terms[k], self.den)

    def coefficient(self, xexp, pexp=None):
        """Scalar at ``(xexp, pexp)``, or the constant series of all
        parameter monomials at ``xexp`` when ``pexp`` is omitted."""
        ctx = self.ctx
        if pexp is not None:
            return Fraction(self.terms.get(ctx.pack(xexp, pexp), 0), self.den)
        out = {}
        for k, v in self.terms.items():
            x, p = ctx.unpack(k)
            if x == tuple(xexp):
                out[ctx.pack((0,) * ctx.nvars, p)] = v
        return _make(ctx, out, self.den, inf)

    def constant_term(self):
        return self.x_component(0)

    def x_component(self, d):
        """Terms of x-degree exactly ``d`` (an exact polynomial)."""
        s = self.ctx.dshift
        return _make(self.ctx, {k: v for k, v in self.terms.items() if k >> s == d}, self.den, inf)

    def graded_component(self, d):
        """Terms of internal degree exactly ``d``."""
        ctx = self.ctx
        t = {k: v for k, v in self.terms.items() if ctx.internal_degree(k) == d}
        return _make(ctx, t, self.den, self.prec)

    def degrees(self):
        ctx = self.ctx
        return sorted({ctx.internal_degree(k) for k in self.terms})

    def is_homogeneous(self, d=None):
        ds = self.degrees()
        if not ds:
            return True
        return len(ds) == 1 and (d is None or ds[0] == d)

    def truncate(self, p):
        return _make(self.ctx, self.terms, self.den, min(self.prec, p))

    def as_exact(self):
        """Forget the precision bound (caller vouches for exactness)."""
        return TruncatedSeries(self.ctx, self.terms, self.den, inf)

    # -- comparison -----------------------------------------------------
    def certified_with(self, other):
        return min(self.prec, other.prec, self.ctx.trunc)

    def agrees(self, other, degree=None):
        """Equality up to x-degree ``degree`` (default: the common certified
        degree).  Returns the first differing x-degree or ``None``."""
        other = self._coerce(other)
        d = self.certified_with(other) if degree is None else degree
        lim = self.ctx.limit(d)
        bad = None
        da, db = self.den, other.den
        for k in set(self.terms) | set(other.terms):
            if k < lim and self.terms.get(k, 0) * db != other.terms.get(k, 0) * da:
                x = k >> self.ctx.dshift
                bad = x if bad is None else min(bad, x)
        return bad

    def __eq__(self, other):
        if not isinstance(other, (TruncatedSeries, int, Fraction)):
            return NotImplemented
        return self.agrees(other) is None

    __hash__ = None

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx!r} vs {other.ctx!r}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.const(other)
        raise TypeError(f"cannot combine series with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        da, db = self.den, other.den
        den = _lcm(da, db)
        fa, fb = den // da, den // db
        t = {k: v * fa for k, v in self.terms.items()}
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v * fb
        return _make(self.ctx, {k: v for k, v in t.items() if v}, den, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.ctx, {k: -v for k, v in self.terms.items()}, self.den, self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return TruncatedSeries(self.ctx, {}, 1, self.prec)
        t = {k: v * c.numerator for k, v in self.terms.items()}
        return _make(self.ctx, t, self.den * c.denominator, self.prec)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        ctx = self.ctx
        N = ctx.trunc
        p = min(self.prec + other.valuation(), other.prec + self.valuation())
        if p != inf:
            p = min(p, N)
        elif self.terms and other.terms and self.max_xdeg() + other.max_xdeg() > N:
            p = N
        if not self.terms or not other.terms:
            return TruncatedSeries(ctx, {}, 1, p)
        top = N if p == inf else p
        t = kernels.mul_terms(self.terms, other.terms, ctx.limit(top), ctx.guard)
        return _make(ctx, t, self.den * other.den, p)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.invert() ** (-e)
        out = self.ctx.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / Fraction(other))
        return self.exact_div(other)

    # -- division -------------------------------------------------------
    def exact_div(self, b):
        """The unique ``q`` with ``q * b == self`` in the truncated ring."""
        b = self._coerce(b)
        if not b.terms:
            raise ZeroDivisionError("division by a zero series")
        ctx = self.ctx
        N = ctx.trunc
        v = b.valuation()
        va = self.valuation()
        for d in range(int(min(va, v)), v):
            if self.x_component(d):
                raise NotDivisible(d)
        prec_q = min(self.prec - v, b.prec + va - 2 * v)
        top = N - v if prec_q == inf else min(prec_q, N - v)
        bv = b.x_component(v)
        r = self
        q = ctx.zero()
        for d in range(0, top + 1):
            rd = r.x_component(d + v)
            if not rd:
                continue
            qd = _poly_div(rd, bv, d)
            q = q + qd
            r = r - qd * b
        if prec_q == inf:
            # exact only when nothing was lost to truncation
            if r.terms or (q.terms and q.max_xdeg() + b.max_xdeg() > N):
                prec_q = N - v
        else:
            prec_q = min(prec_q, N - v)
        return _make(ctx, q.terms, q.den, prec_q)

    def invert(self):
        c = self.constant_term()
        ctx = self.ctx
        if not c or list(c.terms) != [0]:
            raise NotAUnit("constant term is not a nonzero scalar")
        if ctx.ring.integral and abs(c.terms[0]) != 1:
            raise NotAUnit(f"{c.terms[0]} is not a unit of the integers")
        return ctx.one().exact_div(self)

    # -- variable operations --------------------------------------------
    def permute_vars(self, w):
        """Relabel ``x_i -> x_{w[i-1]}`` (``w`` lists images of 1..n)."""
        ctx = self.ctx
        w = tuple(w)
        if sorted(w) != list(range(1, ctx.nvars + 1)):
            raise ValueError(f"{w} is not a permutation of 1..{ctx.nvars}")
        t = {}
        for k, c in self.terms.items():
            x, p = ctx.unpack(k)
            y = [0] * ctx.nvars
            for i, e in enumerate(x):
                y[w[i] - 1] = e
            t[ctx.pack(y, p)] = c
        return TruncatedSeries(ctx, t, self.den, self.prec)

    def swap(self, i, j=None):
        """Exchange ``x_i`` and ``x_j`` (default ``j = i + 1``)."""
        ctx = self.ctx
        j = i + 1 if j is None else j
        si, sj = ctx.xshift[i - 1], ctx.xshift[j - 1]
        m = ctx.mask
        t = {}
        for k, c in self.terms.items():
            a = (k >> si) & m
            b = (k >> sj) & m
            t[k + (b - a << si) + (a - b << sj)] = c
        return TruncatedSeries(ctx, t, self.den, self.prec)

    def divided_difference(self, i):
        """Classical ``(f - s_i f) / (x_i - x_{i+1})``."""
        ctx = self.ctx
        si, sj = ctx.xshift[i - 1], ctx.xshift[i]
        ds = ctx.dshift
        m = ctx.mask
        t = {}
        for k, c in self.terms.items():
            a = (k >> si) & m
            b = (k >> sj) & m
            if a == b:
                continue
            base = k - (a << si) - (b << sj) - (a + b << ds) + (a + b - 1 << ds)
            if a > b:
                lo, hi, sg = b, a, c
            else:
                lo, hi, sg = a, b, -c
            for e in range(hi - lo):
                kk = base + (lo + e << si) + (hi - 1 - e << sj)
                t[kk] = t.get(kk, 0) + sg
        p = self.prec - 1 if self.prec != inf else inf
        return _make(ctx, {k: v for k, v in t.items() if v}, self.den, p)

    def substitute(self, args):
        """``f(args[0], ..., args[n-1])``; arguments share a context."""
        ctx = self.ctx
        if len(args) != ctx.nvars:
            raise ValueError(f"need {ctx.nvars} arguments, got {len(args)}")
        tctx = args[0].ctx
        for a in args:
            if a.ctx != tctx:
                raise ContextMismatch("substitution arguments live in different contexts")
            if a.constant_term():
                raise NonzeroConstantTerm("substituted series must have zero constant term")
        if tctx.ring != ctx.ring:
            raise ContextMismatch("substitution must preserve the coefficient ring")
        zero_x = (0,) * tctx.nvars
        memo = {(0,) * ctx.nvars: tctx.one()}

        def power(x):
            r = memo.get(x)
            if r is None:
                j = max(i for i, e in enumerate(x) if e)
                y = x[:j] + (x[j] - 1,) + x[j + 1:]
                r = power(y) * args[j]
                memo[x] = r
            return r

        groups = {}
        for k, c in self.terms.items():
            x, p = ctx.unpack(k)
            groups.setdefault(x, {})[tctx.pack(zero_x, p)] = c
        out = tctx.zero()
        for x in sorted(groups, key=sum):
            coeff = _make(tctx, groups[x], self.den, inf)
            out = out + coeff * power(x)
        if self.prec != inf:
            vmin = min(a.valuation() for a in args)
            out = out.truncate((self.prec + 1) * vmin - 1)
        return out

    def embed(self, tctx, var_map=None):
        """Re-express in ``tctx`` sending ``x_i`` to ``x_{var_map[i-1]}``."""
        ctx = self.ctx
        if tctx.ring != ctx.ring or tctx.trunc != ctx.trunc:
            raise ContextMismatch("embedding needs the same ring and truncation")
        var_map = tuple(range(1, ctx.nvars + 1)) if var_map is None else tuple(var_map)
        t = {}
        for k, c in self.terms.items():
            x, p = ctx.unpack(k)
            y = [0] * tctx.nvars
            for i, e in enumerate(x):
                y[var_map[i] - 1] += e
            kk = tctx.pack(y, p)
            t[kk] = t.get(kk, 0) + c
        return _make(tctx, {k: v for k, v in t.items() if v}, self.den, self.prec)

    def specialize(self, values, tctx):
        """Substitute scalars for parameters named in ``values``; the rest
        must exist in ``tctx``'s ring."""
        ctx = self.ctx
        names = ctx.ring.names
        keep = []
        for j, nm in enumerate(names):
            if nm not in values:
                keep.append((j, tctx.ring.index(nm)))
        if tctx.nvars != ctx.nvars or tctx.trunc != ctx.trunc:
            raise ContextMismatch("specialization keeps the variables and truncation")
        vals = [Fraction(values.get(nm, 0)) for nm in names]
        fr = {}
        npt = len(tctx.pdeg)
        for k, c in self.terms.items():
            x, p = ctx.unpack(k)
            s = Fraction(c, self.den)
            for j, e in enumerate(p):
                if e and names[j] in values:
                    s *= vals[j] ** e
            if not s:
                continue
            q = [0] * npt
            for j, jt in keep:
                q[jt] = p[j]
            kk = tctx.pack(x, q)
            fr[kk] = fr.get(kk, 0) + s
        return _from_fractions(tctx, fr, self.prec)

    def to_fraction_dict(self):
        return {(x, p): c for x, p, c in self.items()}

    # -- text -----------------------------------------------------------
    def to_text(self):
        from soergel.textfmt import format_lines

        return format_lines(self)

    def __str__(self):
        from soergel.textfmt import format_inline

        return format_inline(self)

    def __repr__(self):
        return f"TruncatedSeries({self})"


def _canon_key(ctx):
    def key(k):
        x, p = ctx.unpack(k)
        return (k >> ctx.dshift, tuple(-e for e in x), ctx.internal_degree(k), p)

    return key


def _poly_div(r, b, d):
    """Exact division of polynomials (x and parameters jointly) by leading
    terms in the packed monomial order; failure reports x-degree ``d``."""
    ctx = r.ctx
    m = ctx.mask
    fields = ctx.pshift + ctx.xshift + (ctx.dshift,)
    lb = max(b.terms)
    cb = Fraction(b.terms[lb], b.den)
    bt = {k: Fraction(v, b.den) for k, v in b.terms.items()}
    rem = {k: Fraction(v, r.den) for k, v in r.terms.items()}
    q = {}
    while rem:
        lt = max(rem)
        diff = lt - lb
        if diff < 0 or any(((lt >> s) & m) < ((lb >> s) & m) for s in fields):
            raise NotDivisible(d)
        c = rem[lt] / cb
        q[diff] = c
        for k, v in bt.items():
            kk = k + diff
            nv = rem.get(kk, 0) - c * v
            if nv:
                rem[kk] = nv
            else:
                rem.pop(kk, None)
    return _from_fractions(ctx, q, inf)
