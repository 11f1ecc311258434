"""Formal group laws: builders, axiom checks and derived series."""

from __future__ import annotations

import json
from fractions import Fraction

from soergel.errors import (
    AxiomViolation,
    ConfigError,
    ContextMismatch,
    IndexOutOfRange,
    IntegralBase,
    MissingParameter,
    NonzeroConstantTerm,
)
from soergel.series import CoefficientRing, TruncationContext

KINDS = ("additive", "multiplicative", "from_log", "custom")


class FormalGroupLaw:
    """A formal group law ``F(x, y)`` with inverse ``iota`` and unit ``g``.

    ``ctx`` has two variables; ``iota`` lives in a one-variable context.
    ``g`` satisfies ``x - y == F(x, iota(y)) * g`` up to truncation.
    """

    def __init__(self, kind, F, iota, g, name=None):
        self.kind = kind
        self.ctx = F.ctx
        self.F = F
        self.iota = iota
        self.g = g
        self.name = name or kind
        self._cache = {}

    @property
    def ring(self):
        return self.ctx.ring

    @property
    def trunc(self):
        return self.ctx.trunc

    def context(self, n):
        """An ``n``-variable context sharing ring and truncation."""
        return TruncationContext(n, self.trunc, self.ring)

    def _check_args(self, *args):
        for a in args:
            if a.ctx.ring != self.ring or a.ctx.trunc != self.trunc:
                raise ContextMismatch("argument does not match the formal group law's ring")
            if a.constant_term():
                raise NonzeroConstantTerm("formal group operations need zero constant term")

    def inv(self, a):
        self._check_args(a)
        return self.iota.substitute([a])

    def sum(self, a, b):
        self._check_args(a, b)
        return self.F.substitute([a, b])

    def diff(self, a, b):
        return self.sum(a, self.inv(b))

    def g_at(self, a, b):
        self._check_args(a, b)
        return self.g.substitute([a, b])

    def root(self, ctx, i, sign=+1):
        """``x_i -_F x_{i+1}`` (sign +1) or ``x_{i+1} -_F x_i`` (sign -1)."""
        if not 1 <= i <= ctx.nvars - 1:
            raise IndexOutOfRange(f"simple root index {i} outside 1..{ctx.nvars - 1}")
        key = ("root", ctx, i, sign)
        r = self._cache.get(key)
        if r is None:
            a, b = ctx.var(i), ctx.var(i + 1)
            r = self.diff(a, b) if sign > 0 else self.diff(b, a)
            self._cache[key] = r
        return r

    def unit(self, ctx, i, mirrored=False):
        """``g(x_i, x_{i+1})`` or, mirrored, ``g(x_{i+1}, x_i)``."""
        key = ("g", ctx, i, mirrored)
        r = self._cache.get(key)
        if r is None:
            a, b = ctx.var(i), ctx.var(i + 1)
            r = self.g_at(b, a) if mirrored else self.g_at(a, b)
            self._cache[key] = r
        return r

    def __repr__(self):
        return f"FormalGroupLaw({self.name}, N={self.trunc}, F={self.F})"


def check_axioms(L):
    """Verify every axiom; return ``{axiom: certified degree}``.

    Raises ``AxiomViolation`` naming the first failing axiom and degree.
    """
    F = L.F
    c2 = L.ctx
    x, y = c2.variables()
    out = {}
    zero = c2.zero()

    def need(name, lhs, rhs):
        bad = lhs.agrees(rhs)
        if bad is not None:
            raise AxiomViolation(name, bad)
        out[name] = lhs.certified_with(rhs)

    need("unitality", F.substitute([x, zero]), x)
    need("unitality", F.substitute([zero, y]), y)
    need("commutativity", F.swap(1), F)
    c3 = L.context(3)
    a, b, c = c3.variables()
    need(
        "associativity",
        F.substitute([a, F.substitute([b, c])]),
        F.substitute([F.substitute([a, b]), c]),
    )
    c1 = L.iota.ctx
    t = c1.var(1)
    need("inverse", F.substitute([t, L.iota]), c1.zero())
    gc = L.g.constant_term()
    if list(gc.terms) != [0] or (c2.ring.integral and abs(gc.terms[0]) != gc.den):
        raise AxiomViolation("unit", 0)
    need("unit", F.substitute([x, L.iota.substitute([y])]) * L.g, x - y)
    return out


def _verified(L):
    check_axioms(L)
    return L


def _finish(kind, F, iota, name=None, g=None):
    c2 = F.ctx
    x, y = c2.variables()
    diff = F.substitute([x, iota.substitute([y])])
    g_div = (x - y).exact_div(diff)
    if g is not None:
        if g.agrees(g_div) is not None:
            raise AxiomViolation("unit", g.agrees(g_div))
    else:
        g = g_div
    return _verified(FormalGroupLaw(kind, F, iota, g, name))


def fgl_additive(ctx):
    c2 = TruncationContext(2, ctx.trunc, ctx.ring)
    x, y = c2.variables()
    c1 = TruncationContext(1, ctx.trunc, ctx.ring)
    return _finish("additive", x + y, -c1.var(1), g=c2.one())


def fgl_multiplicative(ctx, param="b"):
    names = ctx.ring.names
    if param not in names:
        cands = [n for n, d in ctx.ring.params if d == -2]
        if len(cands) != 1:
            raise MissingParameter(f"multiplicative law needs a degree -2 parameter {param!r}")
        param = cands[0]
    if dict(ctx.ring.params)[param] != -2:
        raise MissingParameter(f"parameter {param!r} must have degree -2")
    c2 = TruncationContext(2, ctx.trunc, ctx.ring)
    x, y = c2.variables()
    beta = c2.param(param)
    F = x + y - beta * x * y
    c1 = TruncationContext(1, ctx.trunc, ctx.ring)
    t, b1 = c1.var(1), c1.param(param)
    iota = c1.zero()
    for i in range(ctx.trunc):
        iota = iota - b1 ** i * t ** (i + 1)
    iota = iota.truncate(ctx.trunc)
    return _finish("multiplicative", F, iota, g=c2.one() - beta * y)


def log_ring(K, base="Q"):
    return CoefficientRing(base, [(f"m{k}", -2 * k) for k in range(1, K + 1)])


def fgl_from_log(ctx, log_coeffs=None):
    """Law with logarithm ``x + sum c_k x^(k+1)``.

    ``log_coeffs`` defaults to the ring parameters ``m1..mK``; entries may be
    scalars or constant series.
    """
    if ctx.ring.integral:
        raise IntegralBase("the logarithmic construction needs a rational base")
    c1 = TruncationContext(1, ctx.trunc, ctx.ring)
    if log_coeffs is None:
        log_coeffs = []
        for k in range(1, len(ctx.ring.params) + 1):
            nm = f"m{k}"
            if nm not in ctx.ring.names or dict(ctx.ring.params)[nm] != -2 * k:
                raise MissingParameter(f"expected parameter m{k} of degree {-2 * k}")
            log_coeffs.append(c1.param(nm))
    coeffs = []
    for c in log_coeffs:
        if isinstance(c, (int, Fraction)):
            c = c1.const(c)
        elif c.ctx != c1:
            c = _constant_to(c, c1)
        coeffs.append(c)
    t = c1.var(1)
    log = t
    for k, c in enumerate(coeffs, 1):
        log = log + c * t ** (k + 1)
    # exp = t - sum c_k exp^(k+1), one new degree per round
    exp = t
    for _ in range(ctx.trunc):
        nxt = t
        for k, c in enumerate(coeffs, 1):
            if c:
                nxt = nxt - c * exp ** (k + 1)
        if nxt.agrees(exp, ctx.trunc) is None:
            exp = nxt
            break
        exp = nxt
    c2 = TruncationContext(2, ctx.trunc, ctx.ring)
    x, y = c2.variables()
    F = exp.substitute([log.substitute([x]) + log.substitute([y])])
    iota = exp.substitute([-log])
    L = _finish("from_log", F, iota, name=f"log:{len(coeffs)}")
    L.log, L.exp = log, exp
    return L


def _constant_to(c, ctx):
    if c.max_xdeg() > 0:
        raise ValueError("logarithm coefficients must be constants")
    out = ctx.zero()
    for _, p, v in c.items():
        out = out + ctx.monomial((0,) * ctx.nvars, p, v)
    return out


def _iota_by_iteration(F):
    c1 = TruncationContext(1, F.ctx.trunc, F.ctx.ring)
    t = c1.var(1)
    iota = -t
    for _ in range(F.ctx.trunc + 1):
        nxt = iota - F.substitute([t, iota])
        if nxt.agrees(iota, F.ctx.trunc) is None:
            return nxt.truncate(F.ctx.trunc) if not nxt.exact else nxt
        iota = nxt
    return iota


def fgl_custom(ctx, F):
    """Validate a user-supplied law ``F`` (a series in two variables)."""
    if F.ctx.nvars != 2:
        raise ValueError("F must be a series in two variables")
    if F.constant_term():
        raise NonzeroConstantTerm("F must have zero constant term")
    c2 = F.ctx
    x, y = c2.variables()
    zero = c2.zero()
    for name, lhs, rhs in (
        ("unitality", F.substitute([x, zero]), x),
        ("unitality", F.substitute([zero, y]), y),
        ("commutativity", F.swap(1), F),
    ):
        bad = lhs.agrees(rhs)
        if bad is not None:
            raise AxiomViolation(name, bad)
    c3 = TruncationContext(3, c2.trunc, c2.ring)
    a, b, c = c3.variables()
    bad = F.substitute([a, F.substitute([b, c])]).agrees(F.substitute([F.substitute([a, b]), c]))
    if bad is not None:
        raise AxiomViolation("associativity", bad)
    return _finish("custom", F, _iota_by_iteration(F))


def load_custom(path):
    """Read a JSON config ``{"base", "params", "trunc", "F"}``."""
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read formal group law config {path}: {exc}") from exc
    for k in ("trunc", "F"):
        if k not in cfg:
            raise ConfigError(f"config is missing {k!r}")
    ring = CoefficientRing(cfg.get("base", "Z"), [tuple(p) for p in cfg.get("params", [])])
    c2 = TruncationContext(2, int(cfg["trunc"]), ring)
    return fgl_custom(c2, c2.parse(cfg["F"]))


def make_fgl(spec, trunc, coeff="Z"):
    """Build a law from a CLI selector such as ``log:2``."""
    if spec == "additive":
        return fgl_additive(TruncationContext(2, trunc, CoefficientRing(coeff)))
    if spec == "multiplicative":
        return fgl_multiplicative(TruncationContext(2, trunc, CoefficientRing(coeff, [("b", -2)])))
    if spec.startswith("log:"):
        try:
            K = int(spec[4:])
        except ValueError:
            raise ConfigError(f"bad parameter count in {spec!r}") from None
        if K < 0:
            raise ConfigError("parameter count must be non-negative")
        return fgl_from_log(TruncationContext(2, trunc, log_ring(K)))
    if spec.startswith("custom:"):
        L = load_custom(spec[7:])
        if L.trunc != trunc:
            raise ConfigError(f"config truncation {L.trunc} differs from requested {trunc}")
        return L
    raise ConfigError(f"unknown formal group law {spec!r}")
