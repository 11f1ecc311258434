"""Text form of truncated series.

Line format: one term per line, ``coeff * p1^a1 * x1^e1 ...`` with the
coefficient written as an integer or ``p/q``.  The parser accepts that format
and ordinary infix expressions (``+ - * / ^`` and parentheses).
"""

from __future__ import annotations

import re
from fractions import Fraction

from soergel.errors import ParseError


def _monomial_factors(ctx, x, p, names=None):
    out = []
    for (name, _), e in zip(ctx.ring.params, p):
        if e:
            out.append(name if e == 1 else f"{name}^{e}")
    for i, e in enumerate(x, 1):
        if e:
            v = names[i - 1] if names else f"x{i}"
            out.append(v if e == 1 else f"{v}^{e}")
    return out


def _frac(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_lines(f):
    lines = []
    for x, p, c in f.items():
        lines.append(" * ".join([_frac(c)] + _monomial_factors(f.ctx, x, p)))
    return "\n".join(lines) if lines else "0"


def format_inline(f, names=None):
    """One-line form; ``names`` overrides the variable names ``x1, x2, ..``."""
    parts = []
    for x, p, c in f.items():
        fac = _monomial_factors(f.ctx, x, p, names)
        mag = abs(c)
        if fac:
            body = "*".join(fac) if mag == 1 else "*".join([_frac(mag)] + fac)
        else:
            body = _frac(mag)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    s = " ".join(parts) if parts else "0"
    if f.prec != float("inf"):
        s += f" + O({f.prec + 1})"
    return s


_TOKEN = re.compile(r"(\d+)|([A-Za-z_]\w*)|(\S)")


def _tokenize(text):
    toks = []
    for m in _TOKEN.finditer(text):
        num, ident, op = m.groups()
        if num:
            toks.append(("num", int(num), m.start()))
        elif ident:
            toks.append(("id", ident, m.start()))
        else:
            if op not in "+-*/^()":
                raise ParseError(f"unexpected character {op!r}", m.start())
            toks.append(("op", op, m.start()))
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, ctx, text, names=None):
        self.ctx = ctx
        self.toks = _tokenize(text)
        self.i = 0
        self.names = names or {}

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ParseError(f"expected {op!r}", t[2])

    def parse(self):
        v = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError("trailing input", t[2])
        return v

    def expr(self):
        t = self.peek()
        neg = False
        if t[0] == "op" and t[1] in "+-":
            self.take()
            neg = t[1] == "-"
        v = self.term()
        if neg:
            v = -v
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                w = self.term()
                v = v + w if t[1] == "+" else v - w
            else:
                return v

    def term(self):
        v = self.factor()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] == "*":
                self.take()
                v = v * self.factor()
            elif t[0] == "op" and t[1] == "/":
                self.take()
                d = self.factor()
                if isinstance(d, Fraction):
                    if not d:
                        raise ParseError("division by zero", t[2])
                    v = v / d
                else:
                    v = _lift(self.ctx, v).exact_div(d)
            else:
                return v

    def factor(self):
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            e = self.take()
            if e[0] != "num":
                raise ParseError("exponent must be a non-negative integer", e[2])
            return base ** e[1]
        return base

    def atom(self):
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            return Fraction(val)
        if kind == "id":
            return self.ident(val, pos)
        if kind == "op" and val == "(":
            v = self.expr()
            self.expect(")")
            return v
        if kind == "op" and val == "-":
            return -self.atom()
        raise ParseError("unexpected token", pos)

    def ident(self, name, pos):
        ctx = self.ctx
        if name in self.names:
            return self.names[name]
        if name in ctx.ring.names:
            return ctx.param(name)
        m = re.fullmatch(r"x(\d+)", name)
        if m:
            i = int(m.group(1))
            if not 1 <= i <= ctx.nvars:
                raise ParseError(f"variable {name} outside x1..x{ctx.nvars}", pos)
            return ctx.var(i)
        alias = {"x": 1, "y": 2, "z": 3}.get(name)
        if alias is not None and alias <= ctx.nvars:
            return ctx.var(alias)
        raise ParseError(f"unknown symbol {name!r}", pos)


def _lift(ctx, v):
    return ctx.const(v) if isinstance(v, Fraction) else v


def parse_series(ctx, text, names=None):
    """Parse ``text`` (line format or infix) into a series of ``ctx``.

    Lines are summed, so the line format is just a special case of infix.
    """
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty expression", 0)
    out = ctx.zero()
    for ln in lines:
        out = out + _lift(ctx, _Parser(ctx, ln, names).parse())
    return out
