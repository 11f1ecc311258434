"""Bott-Samelson, parabolic and twisted bimodules as free left modules.

A generator is a tuple of *separators* (an int ``i`` for ``<s_i>``, a pair
``(a, a+1)`` for the S3 parabolic) plus a right-action twist.  The separator
word ``(i1, .., im)`` stands for ``R (x)_{i1} R (x) .. (x)_{im} R``; its
left basis is labelled by one staircase index per separator.  With no
separators the generator is ``R`` twisted by a permutation (``Rs_i`` etc.).

Elements of an object (a list of shifted summands) are dicts
``(summand index, label) -> left coefficient``.
"""

from __future__ import annotations

from itertools import product

from soergel.errors import (
    ContextMismatch,
    NotEquivariant,
    RankMismatch,
    SoergelError,
    UnsupportedTwist,
)
from soergel.weyl import ParabolicSubgroup, PolyRing


def identity_perm(n):
    return tuple(range(1, n + 1))


def transposition(n, i):
    p = list(range(1, n + 1))
    p[i - 1], p[i] = p[i], p[i - 1]
    return tuple(p)


def compose_perm(p1, p2):
    """Permutation acting as ``f -> p1(p2(f))``."""
    return tuple(p1[v - 1] for v in p2)


def _sep_contains(sep, i):
    return sep == i if isinstance(sep, int) else i in sep


class Gen:
    """Hashable generator: separators plus twist permutation."""

    __slots__ = ("slots", "twist")

    def __init__(self, slots, twist):
        self.slots = tuple(s if isinstance(s, int) else tuple(s) for s in slots)
        self.twist = tuple(twist)

    def __eq__(self, other):
        return isinstance(other, Gen) and (self.slots, self.twist) == (other.slots, other.twist)

    def __hash__(self):
        return hash((self.slots, self.twist))

    @property
    def twisted(self):
        return self.twist != tuple(range(1, len(self.twist) + 1))

    def name(self):
        if not self.slots:
            if not self.twisted:
                return "R"
            moved = [i for i, v in enumerate(self.twist, 1) if v != i]
            if len(moved) == 2 and moved[1] == moved[0] + 1:
                return f"Rs{moved[0]}"
            return "R" + "".join(map(str, self.twist))
        parts = []
        for s in self.slots:
            parts.append(str(s) if isinstance(s, int) else "{%d,%d}" % s)
        base = "EB_" + ("".join(parts) if all(isinstance(s, int) for s in self.slots) else ".".join(parts))
        if self.twisted:
            base += "^" + "".join(map(str, self.twist))
        return base

    def __repr__(self):
        return self.name()


class Summand:
    __slots__ = ("gen", "shift", "tag")

    def __init__(self, gen, shift=0, tag=None):
        self.gen = gen
        self.shift = shift
        self.tag = tag

    def __repr__(self):
        s = self.gen.name()
        return s + (f"({self.shift})" if self.shift else "")


class Obj:
    """Formal direct sum of shifted generators."""

    def __init__(self, summands):
        self.summands = list(summands)

    def __len__(self):
        return len(self.summands)

    def __add__(self, other):
        return Obj(self.summands + other.summands)

    def shifted(self, k):
        return Obj([Summand(s.gen, s.shift + k, s.tag) for s in self.summands])

    def retagged(self, tag):
        return Obj([Summand(s.gen, s.shift, (tag, j)) for j, s in enumerate(self.summands)])

    def same_shape(self, other):
        return [(s.gen, s.shift) for s in self.summands] == [(s.gen, s.shift) for s in other.summands]

    def __repr__(self):
        return " + ".join(map(repr, self.summands)) if self.summands else "0"


# -- element helpers -----------------------------------------------------
def add_into(acc, elt, coeff=None):
    for k, v in elt.items():
        w = v if coeff is None else coeff * v
        cur = acc.get(k)
        acc[k] = w if cur is None else cur + w
    return acc


def prune(elt):
    return {k: v for k, v in elt.items() if v}


def elt_agrees(a, b, degree=None):
    """First x-degree where elements differ, or ``None``."""
    bad = None
    for k in set(a) | set(b):
        x, y = a.get(k), b.get(k)
        if x is None:
            d = y.agrees(0, degree) if degree is not None else y.agrees(0)
        elif y is None:
            d = x.agrees(0, degree) if degree is not None else x.agrees(0)
        else:
            d = x.agrees(y, degree)
        if d is not None:
            bad = d if bad is None else min(bad, d)
    return bad


def elt_certified(elt, trunc):
    return min([trunc] + [v.certified for v in elt.values()])


class Setting:
    """Rank-``n`` bimodule calculus over a formal group law."""

    def __init__(self, law, n):
        if n < 2:
            raise SoergelError("bimodule machinery needs rank n >= 2")
        self.law = law
        self.n = n
        self.ctx = law.context(n)
        self.R = PolyRing(self.ctx, law)
        self.id_perm = identity_perm(n)
        self._W = {}
        self._basis = {}
        self._labels = {}

    # -- separators -------------------------------------------------------
    def W(self, sep):
        w = self._W.get(sep)
        if w is None:
            w = ParabolicSubgroup((sep,) if isinstance(sep, int) else sep, self.n)
            self._W[sep] = w
        return w

    def sep_basis(self, sep):
        b = self._basis.get(sep)
        if b is None:
            b = self.R.basis(self.W(sep))
            self._basis[sep] = b
        return b

    def labels(self, gen):
        ls = self._labels.get(gen)
        if ls is None:
            ls = list(product(*[range(len(self.sep_basis(s))) for s in gen.slots]))
            self._labels[gen] = ls
        return ls

    def label_xdeg(self, gen, label):
        tot = 0
        for s, b in zip(gen.slots, label):
            ea, eb = self.W(s).staircase()[b]
            tot += ea + eb
        return tot

    # -- generators -------------------------------------------------------
    def gen(self, *slots, twist=None):
        for s in slots:
            self.W(s if isinstance(s, int) else tuple(s))
        return Gen(slots, twist or self.id_perm)

    def twist_gen(self, i):
        return Gen((), transposition(self.n, i))

    def obj(self, *items):
        """``obj((gen, shift), ...)`` or ``obj(gen)``."""
        out = []
        for it in items:
            if isinstance(it, Gen):
                out.append(Summand(it, 0))
            else:
                out.append(Summand(it[0], it[1]))
        return Obj(out)

    def EB(self, *word, shift=0):
        return Obj([Summand(self.gen(*word), shift)])

    def Rs(self, i, shift=0):
        return Obj([Summand(self.twist_gen(i), shift)])

    def Rreg(self, shift=0):
        return Obj([Summand(self.gen(), shift)])

    # -- normal forms -----------------------------------------------------
    def nf(self, gen, pure):
        """Left-basis coordinates of the pure tensor ``pure[0] (x) ..``."""
        m = len(gen.slots)
        if len(pure) != m + 1:
            raise ValueError(f"{gen.name()} needs {m + 1} tensor factors")
        for r in pure:
            if r.ctx != self.ctx:
                raise ContextMismatch("tensor factor from another context")
        return prune(self._nf(gen.slots, list(pure)))

    def _nf(self, slots, pure):
        if not slots:
            return {(): pure[0]}
        W = self.W(slots[-1])
        coords = self.R.coords(W, pure[-1])
        out = {}
        for b, p in enumerate(coords):
            if not p:
                continue
            head = pure[:-2] + [pure[-2] * p]
            for lab, c in self._nf(slots[:-1], head).items():
                key = lab + (b,)
                cur = out.get(key)
                out[key] = c if cur is None else cur + c
        return out

    def basis_pure(self, gen, label):
        one = self.ctx.one()
        return [one] + [self.sep_basis(s)[b] for s, b in zip(gen.slots, label)]

    def right_basis(self, gen, label, f):
        """``e_label * f`` in ``gen``."""
        f = f.permute_vars(gen.twist) if gen.twisted else f
        if not gen.slots:
            return {(): f}
        pure = self.basis_pure(gen, label)
        pure[-1] = pure[-1] * f
        return self.nf(gen, pure)

    def right_action(self, obj, elt, f):
        out = {}
        for (j, lab), c in elt.items():
            g = obj.summands[j].gen
            for lab2, v in self.right_basis(g, lab, f).items():
                key = (j, lab2)
                w = c * v
                cur = out.get(key)
                out[key] = w if cur is None else cur + w
        return prune(out)

    def element(self, obj, j, *pure):
        """Normal form of a pure tensor placed in summand ``j``."""
        return {(j, lab): c for lab, c in self.nf(obj.summands[j].gen, list(pure)).items()}

    def basis_element(self, j, label):
        return {(j, label): self.ctx.one()}

    # -- tensor of generators ---------------------------------------------
    def gen_tensor(self, g1, g2):
        """Canonical generator of ``g1 (x) g2`` and the recipe tags."""
        steps = []
        if not g1.slots and g1.twisted and g2.slots:
            moved = [k for k, v in enumerate(g1.twist, 1) if v != k]
            i = moved[0] if len(moved) == 2 and moved[1] == moved[0] + 1 else None
            if i is None or not _sep_contains(g2.slots[0], i):
                raise UnsupportedTwist(f"cannot absorb {g1.name()} into {g2.name()}")
            slots, twist = g2.slots, g2.twist
            steps.append("left")
        elif g1.twisted and g1.slots and g2.slots:
            raise UnsupportedTwist(f"cannot move the twist of {g1.name()} past {g2.name()}")
        else:
            slots = g1.slots + g2.slots
            twist = compose_perm(g1.twist, g2.twist) if not g2.slots else g2.twist
            steps.append("concat")
        if slots and twist != self.id_perm:
            moved = [k for k, v in enumerate(twist, 1) if v != k]
            if len(moved) == 2 and moved[1] == moved[0] + 1 and _sep_contains(slots[-1], moved[0]):
                steps.append(("untwist", moved[0]))
                twist = self.id_perm
            else:
                raise UnsupportedTwist(f"twist {twist} cannot be absorbed")
        return Gen(slots, twist), tuple(steps)

    def _untwist_last(self, gen, label, i):
        pure = self.basis_pure(gen, label)
        pure[-1] = pure[-1].swap(i)
        return self.nf(gen, pure)

    def basis_tensor(self, g1, l1, g2, l2):
        """``e_l1 (x) e_l2`` expressed in the canonical generator."""
        g, steps = self.gen_tensor(g1, g2)
        raw = l2 if steps[0] == "left" else l1 + l2
        if len(steps) == 2:
            return g, self._untwist_last(g, raw, steps[1][1])
        return g, {raw: self.ctx.one()}

    def basis_preimage(self, g1, g2, label):
        """Write canonical ``e_label`` as ``sum (elt of g1) (x) e_m``."""
        g, steps = self.gen_tensor(g1, g2)
        if len(steps) == 2:
            raws = self._untwist_last(g, label, steps[1][1])
        else:
            raws = {label: self.ctx.one()}
        out = []
        k1 = len(g1.slots)
        for raw, c in raws.items():
            if steps[0] == "left":
                out.append(({(): c}, raw))
            else:
                out.append(({raw[:k1]: c}, raw[k1:]))
        return out

    # -- tensor of objects, elements, morphisms ---------------------------
    def obj_tensor(self, X, Y):
        out = []
        for a in X.summands:
            for b in Y.summands:
                g, _ = self.gen_tensor(a.gen, b.gen)
                out.append(Summand(g, a.shift + b.shift, (a.tag, b.tag)))
        return Obj(out)

    def elt_tensor(self, X, A, Y, B):
        """``A (x) B`` for elements ``A`` of ``X`` and ``B`` of ``Y``."""
        nY = len(Y)
        out = {}
        for (ja, la), ca in A.items():
            ga = X.summands[ja].gen
            for (jb, lb), cb in B.items():
                gb = Y.summands[jb].gen
                moved = self.right_basis(ga, la, cb)
                for lk, h in moved.items():
                    _, pieces = self.basis_tensor(ga, lk, gb, lb)
                    coef = ca * h
                    for lab, c in pieces.items():
                        key = (ja * nY + jb, lab)
                        w = coef * c
                        cur = out.get(key)
                        out[key] = w if cur is None else cur + w
        return prune(out)

    def identity(self, X):
        one = self.ctx.one()
        return Morphism(self, X, X, {
            (j, lab): {(j, lab): one} for j, s in enumerate(X.summands) for lab in self.labels(s.gen)
        })

    def zero_map(self, X, Y):
        return Morphism(self, X, Y, {
            (j, lab): {} for j, s in enumerate(X.summands) for lab in self.labels(s.gen)
        })

    def mor_tensor(self, phi, psi):
        if phi.setting is not self or psi.setting is not self:
            raise RankMismatch("morphisms come from different settings")
        X1, X2 = phi.source, psi.source
        Y1, Y2 = phi.target, psi.target
        S = self.obj_tensor(X1, X2)
        T = self.obj_tensor(Y1, Y2)
        n2 = len(X2)
        images = {}
        for ja, a in enumerate(X1.summands):
            for jb, b in enumerate(X2.summands):
                js = ja * n2 + jb
                g = S.summands[js].gen
                for lab in self.labels(g):
                    acc = {}
                    for pre, m in self.basis_preimage(a.gen, b.gen, lab):
                        left = {}
                        for l1, c in pre.items():
                            add_into(left, phi.images[(ja, l1)], c)
                        add_into(acc, self.elt_tensor(Y1, prune(left), Y2, psi.images[(jb, m)]))
                    images[(js, lab)] = prune(acc)
        return Morphism(self, S, T, images)

    def tensor(self, a, b):
        if isinstance(a, Obj):
            return self.obj_tensor(a, b)
        return self.mor_tensor(a, b)


class Morphism:
    """Left-linear map given by the images of the source's left basis."""

    def __init__(self, setting, source, target, images, name=None):
        self.setting = setting
        self.source = source
        self.target = target
        self.images = images
        self.name = name

    def __repr__(self):
        return f"Morphism({self.name or '?'}: {self.source!r} -> {self.target!r})"

    def basis(self):
        return list(self.images)

    def apply(self, elt):
        out = {}
        for key, c in elt.items():
            add_into(out, self.images[key], c)
        return prune(out)

    def __call__(self, elt):
        return self.apply(elt)

    def compose(self, other):
        """``self o other``."""
        if len(other.target) != len(self.source):
            raise ValueError("composition of incompatible morphisms")
        images = {k: self.apply(v) for k, v in other.images.items()}
        nm = f"{self.name}.{other.name}" if self.name and other.name else None
        return Morphism(self.setting, other.source, self.target, images, nm)

    def __matmul__(self, other):
        return self.compose(other)

    def __add__(self, other):
        images = {k: prune(add_into(dict(v), other.images[k])) for k, v in self.images.items()}
        return Morphism(self.setting, self.source, self.target, images)

    def __neg__(self):
        return Morphism(self.setting, self.source, self.target,
                        {k: {t: -c for t, c in v.items()} for k, v in self.images.items()}, self.name)

    def __sub__(self, other):
        return self + (-other)

    def left_mul(self, u):
        """Post-multiply every image by the left scalar series ``u``."""
        return Morphism(self.setting, self.source, self.target,
                        {k: prune({t: u * c for t, c in v.items()}) for k, v in self.images.items()})

    def reindexed(self, source=None, target=None):
        return Morphism(self.setting, source or self.source, target or self.target, self.images, self.name)

    # -- comparisons ------------------------------------------------------
    def certified(self):
        N = self.setting.ctx.trunc
        return min([N] + [elt_certified(v, N) for v in self.images.values()])

    def agrees(self, other, degree=None):
        bad = None
        for k, v in self.images.items():
            d = elt_agrees(v, other.images.get(k, {}), degree)
            if d is not None:
                bad = d if bad is None else min(bad, d)
        return bad

    def is_zero(self, degree=None):
        return all(elt_agrees(v, {}, degree) is None for v in self.images.values())

    def is_identity(self, degree=None):
        return self.agrees(self.setting.identity(self.source), degree) is None

    def entry(self, tgt, src):
        return self.images[src].get(tgt, self.setting.ctx.zero())

    def block(self, tj, sj):
        """Restriction to source summand ``sj`` and corestriction to ``tj``."""
        S = self.setting
        src = Obj([self.source.summands[sj]])
        tgt = Obj([self.target.summands[tj]])
        images = {}
        for (j, lab), v in self.images.items():
            if j == sj:
                images[(0, lab)] = {(0, l2): c for (k, l2), c in v.items() if k == tj}
        return Morphism(S, src, tgt, images)


def check_equivariance(phi, variables=None):
    """``phi(e * x_k) == phi(e) * x_k`` on every basis label; returns the
    certified x-degree or raises ``NotEquivariant``."""
    S = phi.setting
    xs = variables or range(1, S.n + 1)
    cert = S.ctx.trunc
    for key in phi.images:
        j, lab = key
        g = phi.source.summands[j].gen
        for k in xs:
            xk = S.ctx.var(k)
            moved = {(j, l2): c for l2, c in S.right_basis(g, lab, xk).items()}
            lhs = phi.apply(moved)
            rhs = S.right_action(phi.target, phi.images[key], xk)
            d = elt_agrees(lhs, rhs)
            if d is not None:
                raise NotEquivariant(lab, k, d)
            cert = min(cert, elt_certified(lhs, S.ctx.trunc), elt_certified(rhs, S.ctx.trunc))
    return cert


def block_matrix(setting, source, target, blocks):
    """Assemble a morphism from ``{(tj, sj): single-summand morphism}``."""
    images = {}
    for j, s in enumerate(source.summands):
        for lab in setting.labels(s.gen):
            images[(j, lab)] = {}
    for (tj, sj), m in blocks.items():
        for (_, lab), v in m.images.items():
            acc = images[(sj, lab)]
            for (_, l2), c in v.items():
                key = (tj, l2)
                acc[key] = acc[key] + c if key in acc else c
    return Morphism(setting, source, target, {k: prune(v) for k, v in images.items()})
