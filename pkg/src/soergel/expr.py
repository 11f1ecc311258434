"""A small expression language over a :class:`~soergel.bimod.Setting`.

Grammar (whitespace separated, ``^`` binds tightest)::

    expr    := ['-'] term (('+' | '-') term)*
    term    := power (('*' | '/') power)*
    power   := atom ['^' INT]
    atom    := INT | NAME | '(' expr ('(*)' expr)* ')'
             | 'demazure' INT atom | "demazure'" INT atom
             | 'fsum' '(' expr ',' expr ')' | 'fdiff' '(' expr ',' expr ')'
             | 'finv' '(' expr ')' | 'g' ['(' expr ',' expr ')']
             | 'root' INT | 'EB' INT+ atom
             | MAP INT [INT] atom

``MAP`` is one of ``m ms delta deltas mu nablaL nablaR mu_iji restrict``.
A parenthesised group with ``(*)`` (or ``⊗``) separators is a pure tensor;
it is normalised in the source of the map it is fed to, or in ``EB_w``
when prefixed with ``EB w``.  Bare ``g`` is the law's unit ``g(x, y)``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from soergel.bimod.maps import structure_map
from soergel.errors import ParseError, SoergelError
from soergel.series import TruncatedSeries
from soergel.textfmt import format_inline

MAPS = ("m", "ms", "delta", "deltas", "mu", "nablaL", "nablaR", "mu_iji", "restrict")
_TWO_INDEX = ("mu_iji", "restrict")

_TOKEN = re.compile(r"\s*(?:(\d+)|(\(\*\)|⊗)|([A-Za-z_]\w*'?)|(\S))")


class Element:
    """An element of a bimodule object in left-basis coordinates."""

    def __init__(self, setting, obj, coords):
        self.setting = setting
        self.obj = obj
        self.coords = coords

    def _same(self, other):
        if not isinstance(other, Element) or not self.obj.same_shape(other.obj):
            raise SoergelError("elements live in different objects")

    def __add__(self, other):
        self._same(other)
        out = dict(self.coords)
        for k, v in other.coords.items():
            out[k] = out[k] + v if k in out else v
        return Element(self.setting, self.obj, {k: v for k, v in out.items() if v})

    def __neg__(self):
        return Element(self.setting, self.obj, {k: -v for k, v in self.coords.items()})

    def __sub__(self, other):
        return self + (-other)

    def left(self, f):
        return Element(self.setting, self.obj, {k: f * v for k, v in self.coords.items() if f * v})

    def right(self, f):
        return Element(self.setting, self.obj, self.setting.right_action(self.obj, self.coords, f))


class PureTensor:
    def __init__(self, factors):
        self.factors = factors


def _tokenize(text):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        num, tens, ident, op = m.groups()
        start = m.start(m.lastindex)
        if num:
            toks.append(("num", int(num), start))
        elif tens:
            toks.append(("tensor", None, start))
        elif ident:
            toks.append(("id", ident, start))
        else:
            if op not in "+-*/^(),":
                raise ParseError(f"unexpected character {op!r}", start)
            toks.append(("op", op, start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class Evaluator:
    def __init__(self, setting, text):
        self.S = setting
        self.ctx = setting.ctx
        self.law = setting.law
        self.toks = _tokenize(text)
        self.i = 0
        self.law_level = False

    # -- token helpers
    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def is_op(self, op):
        t = self.peek()
        return t[0] == "op" and t[1] == op

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ParseError(f"expected {op!r}", t[2])

    def index(self):
        t = self.take()
        if t[0] != "num":
            raise ParseError("expected an index", t[2])
        return t[1]

    # -- arithmetic on mixed values
    def lift(self, v, pos):
        if isinstance(v, Fraction):
            return self.ctx.const(v)
        if isinstance(v, PureTensor):
            raise ParseError("a pure tensor needs an object: feed it to a map or prefix 'EB w'", pos)
        return v

    def add(self, a, b, pos, sign=1):
        if isinstance(a, Fraction) and isinstance(b, Fraction):
            return a + sign * b
        if isinstance(a, Element) or isinstance(b, Element):
            if not (isinstance(a, Element) and isinstance(b, Element)):
                raise ParseError("cannot add an element and a series", pos)
            return a + b if sign > 0 else a - b
        a, b = self.lift(a, pos), self.lift(b, pos)
        return a + b if sign > 0 else a - b

    def mul(self, a, b, pos):
        if isinstance(a, Fraction) and isinstance(b, Fraction):
            return a * b
        if isinstance(a, Element) and isinstance(b, Element):
            raise ParseError("cannot multiply two elements", pos)
        if isinstance(b, Element):
            return b.left(self.lift(a, pos))
        if isinstance(a, Element):
            return a.right(self.lift(b, pos))
        return self.lift(a, pos) * self.lift(b, pos)

    # -- grammar
    def parse(self):
        v = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError("trailing input", t[2])
        if isinstance(v, PureTensor):
            raise ParseError("a pure tensor needs an object: feed it to a map or prefix 'EB w'", 0)
        return v

    def expr(self):
        neg = False
        if self.is_op("-") or self.is_op("+"):
            neg = self.take()[1] == "-"
        v = self.term()
        if neg:
            v = -v
        while self.is_op("+") or self.is_op("-"):
            t = self.take()
            v = self.add(v, self.term(), t[2], 1 if t[1] == "+" else -1)
        return v

    def term(self):
        v = self.power()
        while self.is_op("*") or self.is_op("/"):
            t = self.take()
            w = self.power()
            if t[1] == "*":
                v = self.mul(v, w, t[2])
            elif isinstance(w, Fraction):
                if not w:
                    raise ParseError("division by zero", t[2])
                v = v / w if isinstance(v, Fraction) else self.lift(v, t[2]) * self.ctx.const(1 / w)
            else:
                v = self.lift(v, t[2]).exact_div(self.lift(w, t[2]))
        return v

    def power(self):
        base = self.atom()
        if self.is_op("^"):
            t = self.take()
            e = self.take()
            if e[0] != "num":
                raise ParseError("exponent must be a non-negative integer", e[2])
            if isinstance(base, (Element, PureTensor)):
                raise ParseError("cannot raise an element to a power", t[2])
            return base ** e[1]
        return base

    def group(self):
        """``( expr )`` or a pure tensor ``( e (*) e ... )``."""
        start = self.peek()[2]
        self.expect("(")
        items = [self.expr()]
        while self.peek()[0] == "tensor":
            self.take()
            items.append(self.expr())
        self.expect(")")
        if len(items) == 1:
            return items[0]
        return PureTensor([self.lift(v, start) for v in items])

    def atom(self):
        t = self.peek()
        kind, val, pos = t
        if kind == "num":
            self.take()
            return Fraction(val)
        if kind == "op" and val == "(":
            return self.group()
        if kind == "op" and val == "-":
            self.take()
            return -self.atom()
        if kind != "id":
            raise ParseError("unexpected token", pos)
        self.take()
        return self.word(val, pos)

    def word(self, name, pos):
        S, L = self.S, self.law
        if name in ("demazure", "demazure'"):
            i = self.index()
            arg = self.lift(self.atom(), pos)
            try:
                return S.R.demazure(i, arg) if name == "demazure" else S.R.demazure_prime(i, arg)
            except SoergelError as exc:
                raise ParseError(str(exc), pos) from None
        if name in ("fsum", "fdiff", "g") and (name != "g" or self.is_op("(")):
            self.expect("(")
            a = self.lift(self.expr(), pos)
            self.expect(",")
            b = self.lift(self.expr(), pos)
            self.expect(")")
            fn = {"fsum": L.sum, "fdiff": L.diff, "g": L.g_at}[name]
            return fn(a, b)
        if name == "finv":
            self.expect("(")
            a = self.lift(self.expr(), pos)
            self.expect(")")
            return L.inv(a)
        if name == "g":
            self.law_level = True
            return L.g
        if name == "root":
            return L.root(self.ctx, self.index())
        if name == "EB":
            word = [self.index()]
            while self.peek()[0] == "num":
                word.append(self.index())
            obj = S.EB(*word)
            return self.place(obj, self.atom(), pos)
        if name in MAPS:
            i = self.index()
            j = self.index() if name in _TWO_INDEX else None
            try:
                phi = structure_map(S, name, i, j)
            except SoergelError as exc:
                raise ParseError(str(exc), pos) from None
            arg = self.place(phi.source, self.atom(), pos)
            return Element(S, phi.target, phi.apply(arg.coords))
        try:
            return self.ctx.parse(name)
        except ParseError:
            raise ParseError(f"unknown symbol {name!r}", pos) from None

    def place(self, obj, v, pos):
        S = self.S
        if isinstance(v, Element):
            if not v.obj.same_shape(obj):
                raise ParseError("element does not live in the map's source", pos)
            return v
        if isinstance(v, PureTensor):
            if len(obj) != 1:
                raise ParseError("pure tensors need a single-summand object", pos)
            try:
                return Element(S, obj, S.element(obj, 0, *v.factors))
            except (ValueError, SoergelError) as exc:
                raise ParseError(str(exc), pos) from None
        v = self.lift(v, pos)
        s = obj.summands[0] if len(obj) == 1 else None
        if s is None or s.gen.slots:
            raise ParseError("a series argument needs a rank-one regular source", pos)
        return Element(S, obj, {(0, ()): v} if v else {})


def format_element(el):
    """One line per basis label: ``coeff · [f0⊗f1⊗..]``."""
    S = el.setting
    lines = []
    for (j, lab), c in sorted(el.coords.items(), key=lambda kv: kv[0]):
        s = el.obj.summands[j]
        label = "[" + "⊗".join(format_inline(f) for f in S.basis_pure(s.gen, lab)) + "]"
        if len(el.obj) > 1:
            label = f"{s.gen.name()}#{j}:{label}"
        text = format_inline(c)
        if len(list(c.items())) > 1:
            text = f"({text})"
        lines.append(f"{text} · {label}")
    return "\n".join(lines) if lines else "0"


def evaluate(setting, text):
    """Evaluate ``text``; returns a series or an :class:`Element`."""
    ev = Evaluator(setting, text)
    v = ev.parse()
    if isinstance(v, Fraction):
        v = setting.ctx.const(v)
    return v, ev.law_level


def compute(setting, text):
    """Evaluate ``text`` and return its normal form as text."""
    v, law_level = evaluate(setting, text)
    if isinstance(v, Element):
        return format_element(v)
    names = None
    if law_level and isinstance(v, TruncatedSeries) and v.ctx == setting.law.ctx:
        names = ["x", "y"]
    return format_inline(v, names)
