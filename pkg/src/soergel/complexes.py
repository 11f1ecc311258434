"""Bounded complexes of bimodules, Koszul tensor products, total fibers,
Gaussian elimination and the Rouquier-complex checks.

Indexing is cohomological: the differential raises the degree by one,
``fib(f: X -> Y) = [X@0 -> Y@1]`` and ``cofib(f) = [X@-1 -> Y@0]``.
"""

from __future__ import annotations

from soergel.bimod.core import Morphism, Obj, Summand
from soergel.bimod.maps import (
    delta_map,
    deltas_map,
    m_map,
    split_BB,
)
from soergel.bimod.matrix import invert_morphism
from soergel.bimod.sts import split_121, sts_squares
from soergel.errors import (
    BrokenDifferential,
    IndexOutOfRange,
    NotInvertible,
    PivotNotInvertible,
    RankMismatch,
    SquareDoesNotCommute,
    VerificationFailed,
)

# d(x (x) y) = dx (x) y + (-1)^|x| x (x) dy
KOSZUL = "left"


# -- morphisms between direct sums ----------------------------------------
def sub_obj(X, idxs):
    return Obj([X.summands[k] for k in idxs])


def place(S, phi, src, src_idx, tgt, tgt_idx):
    """Extend ``phi`` (between sub-sums of ``src`` and ``tgt`` given by the
    summand index lists) by zero to a morphism ``src -> tgt``."""
    images = {(j, lab): {} for j, s in enumerate(src.summands) for lab in S.labels(s.gen)}
    for (j, lab), v in phi.images.items():
        images[(src_idx[j], lab)] = {(tgt_idx[k], l2): c for (k, l2), c in v.items()}
    return Morphism(S, src, tgt, images)


def restrict(phi, src_idx, tgt_idx):
    """Corner of ``phi`` between the listed source and target summands."""
    S = phi.setting
    tpos = {k: n for n, k in enumerate(tgt_idx)}
    images = {}
    for n, j in enumerate(src_idx):
        for lab in S.labels(phi.source.summands[j].gen):
            v = phi.images[(j, lab)]
            images[(n, lab)] = {(tpos[k], l2): c for (k, l2), c in v.items() if k in tpos}
    return Morphism(S, sub_obj(phi.source, src_idx), sub_obj(phi.target, tgt_idx), images)


def inclusion(S, X, idxs):
    return place(S, S.identity(sub_obj(X, idxs)), sub_obj(X, idxs), list(range(len(idxs))), X, idxs)


def projection(S, X, idxs):
    return restrict(S.identity(X), list(range(len(X))), idxs)


def shift_morphism(phi, k):
    return phi.reindexed(phi.source.shifted(k), phi.target.shifted(k))


def direct_sum(S, srcs, tgts, blocks):
    """``(+) srcs -> (+) tgts`` from ``{(ti, si): Morphism srcs[si] -> tgts[ti]}``."""
    src = Obj([s for X in srcs for s in X.summands])
    tgt = Obj([s for X in tgts for s in X.summands])
    soff, toff = [0], [0]
    for X in srcs:
        soff.append(soff[-1] + len(X))
    for X in tgts:
        toff.append(toff[-1] + len(X))
    out = S.zero_map(src, tgt)
    for (ti, si), m in blocks.items():
        sidx = list(range(soff[si], soff[si + 1]))
        tidx = list(range(toff[ti], toff[ti + 1]))
        out = out + place(S, m, src, sidx, tgt, tidx)
    return out


def is_zero_obj(X):
    return len(X) == 0


# -- complexes -------------------------------------------------------------
class BoundedComplex:
    """Objects ``X^t`` and differentials ``d^t: X^t -> X^{t+1}``."""

    def __init__(self, S, objs, diffs=None):
        self.S = S
        self.objs = {t: X for t, X in objs.items() if len(X)}
        self.diffs = {}
        for t, d in (diffs or {}).items():
            if t in self.objs and t + 1 in self.objs:
                self.diffs[t] = d

    def degrees(self):
        return sorted(self.objs)

    def obj(self, t):
        return self.objs.get(t, Obj([]))

    def d(self, t):
        m = self.diffs.get(t)
        return m if m is not None else self.S.zero_map(self.obj(t), self.obj(t + 1))

    def check(self):
        """Verify ``d o d == 0``; returns the certified degree."""
        cert = self.S.ctx.trunc
        for t in self.degrees():
            if t + 1 in self.objs and t + 2 in self.objs:
                dd = self.d(t + 1) @ self.d(t)
                bad = dd.agrees(self.S.zero_map(dd.source, dd.target))
                if bad is not None:
                    raise BrokenDifferential(f"d^{t + 1} d^{t} != 0 at x-degree {bad}")
                cert = min(cert, dd.certified())
        return cert

    def shifted(self, k):
        return BoundedComplex(self.S, {t: X.shifted(k) for t, X in self.objs.items()},
                              {t: shift_morphism(d, k) for t, d in self.diffs.items()})

    def is_zero(self):
        return not self.objs

    def summary(self):
        return {t: [repr(s) for s in X.summands] for t, X in sorted(self.objs.items())}

    def canonical(self):
        """Summands sorted by tag within each degree (differentials permuted)."""
        S = self.S
        perms = {t: sorted(range(len(X)), key=lambda k, X=X: repr(X.summands[k].tag))
                 for t, X in self.objs.items()}
        objs = {t: sub_obj(X, perms[t]) for t, X in self.objs.items()}
        diffs = {t: restrict(d, perms[t], perms[t + 1]) for t, d in self.diffs.items()}
        return BoundedComplex(S, objs, diffs)

    def __repr__(self):
        return "Complex(" + ", ".join(f"{t}: {X!r}" for t, X in sorted(self.objs.items())) + ")"


def single(S, X, t=0):
    return BoundedComplex(S, {t: X})


def two_term(S, f, t=0, tag=None):
    """``[source@t -f-> target@t+1]``."""
    X, Y = f.source, f.target
    if tag is not None:
        X, Y = X.retagged((tag, t)), Y.retagged((tag, t + 1))
        f = f.reindexed(X, Y)
    return BoundedComplex(S, {t: X, t + 1: Y}, {t: f})


def fib(S, f, tag=None):
    return two_term(S, f, 0, tag)


def cofib(S, f, tag=None):
    return two_term(S, f, -1, tag)


class ChainMap:
    def __init__(self, source, target, comps):
        self.source = source
        self.target = target
        self.comps = comps

    def at(self, t):
        m = self.comps.get(t)
        S = self.source.S
        return m if m is not None else S.zero_map(self.source.obj(t), self.target.obj(t))

    def check(self):
        """``d f == f d`` in every degree; returns the certified degree."""
        S = self.source.S
        cert = S.ctx.trunc
        ts = set(self.source.degrees()) | set(self.target.degrees())
        for t in sorted(ts):
            lhs = self.target.d(t) @ self.at(t)
            rhs = self.at(t + 1) @ self.source.d(t)
            bad = lhs.agrees(rhs)
            if bad is not None:
                raise VerificationFailed("chain map", bad, {"degree": t})
            cert = min(cert, lhs.certified(), rhs.certified())
        return cert

    def compose(self, other):
        """``self o other``."""
        return ChainMap(other.source, self.target,
                        {t: self.at(t) @ other.at(t) for t in other.source.degrees()})


def identity_chain_map(C):
    return ChainMap(C, C, {t: C.S.identity(X) for t, X in C.objs.items()})


# -- tensor products ---------------------------------------------------------
def cx_tensor(C, D):
    """Total complex of ``C (x) D`` with the left-factor Koszul sign."""
    S = C.S
    if D.S is not S:
        raise RankMismatch("complexes over different settings")
    pieces = {}
    for a in C.degrees():
        for b in D.degrees():
            pieces.setdefault(a + b, []).append((a, b))
    objs = {}
    comps = {}
    for t, ab in pieces.items():
        comps[t] = [(a, b, S.obj_tensor(C.obj(a), D.obj(b))) for a, b in ab]
        objs[t] = Obj([s for _, _, X in comps[t] for s in X.summands])
    diffs = {}
    for t in pieces:
        if t + 1 not in pieces:
            continue
        src = [X for _, _, X in comps[t]]
        tgt = [X for _, _, X in comps[t + 1]]
        tpos = {(a, b): k for k, (a, b, _) in enumerate(comps[t + 1])}
        blocks = {}
        for si, (a, b, _) in enumerate(comps[t]):
            if (a + 1, b) in tpos and a in C.diffs:
                blocks[(tpos[(a + 1, b)], si)] = S.mor_tensor(C.d(a), S.identity(D.obj(b)))
            if (a, b + 1) in tpos and b in D.diffs:
                m = S.mor_tensor(S.identity(C.obj(a)), D.d(b))
                blocks[(tpos[(a, b + 1)], si)] = m if a % 2 == 0 else -m
        diffs[t] = direct_sum(S, src, tgt, blocks).reindexed(objs[t], objs[t + 1])
    return BoundedComplex(S, objs, diffs)


def cx_tensor_many(*cs):
    out = cs[0]
    for c in cs[1:]:
        out = cx_tensor(out, c)
    return out


def whisker_complex(C, left_word=(), right_word=()):
    """``EB_left (x) C (x) EB_right`` as a complex."""
    S = C.S
    out = C
    if left_word:
        out = cx_tensor(single(S, S.EB(*left_word).retagged(("EB", left_word))), out)
    if right_word:
        out = cx_tensor(out, single(S, S.EB(*right_word).retagged(("EB", right_word))))
    return out


# -- total fibers --------------------------------------------------------------
def total_fiber(S, f, g, h, k):
    """Square ``A -f-> B -h-> D``, ``A -g-> C -k-> D``; returns the complex
    ``[A@0 -> B (+) C@1 -> D@2]`` with differentials ``(f, g)`` and ``(h, -k)``."""
    A, B, C, D = f.source, f.target, g.target, h.target
    bad = (h @ f).agrees(k @ g)
    if bad is not None:
        raise SquareDoesNotCommute(f"square fails at x-degree {bad}")
    d0 = direct_sum(S, [A], [B, C], {(0, 0): f, (1, 0): g})
    d1 = direct_sum(S, [B, C], [D], {(0, 0): h, (0, 1): -k})
    objs = {0: A, 1: d0.target, 2: D}
    return BoundedComplex(S, objs, {0: d0, 1: d1.reindexed(d0.target, D)})


def fiber_of_chain_map(phi):
    """``fib(phi: P -> Q)``: components ``P^t (+) Q^{t-1}``, differential
    ``(p, q) -> (d p, phi p - d q)``."""
    P, Q = phi.source, phi.target
    S = P.S
    ts = sorted(set(P.degrees()) | {t + 1 for t in Q.degrees()})
    objs = {t: P.obj(t) + Q.obj(t - 1) for t in ts}
    diffs = {}
    for t in ts:
        if t + 1 not in objs:
            continue
        blocks = {(0, 0): P.d(t), (1, 0): phi.at(t), (1, 1): -Q.d(t - 1)}
        diffs[t] = direct_sum(S, [P.obj(t), Q.obj(t - 1)], [P.obj(t + 1), Q.obj(t)], blocks)
    return BoundedComplex(S, objs, diffs)


# -- change of basis and Gaussian elimination -----------------------------
def replace_summand(C, t, k, iso, inv):
    """Replace summand ``k`` of ``X^t`` through ``iso: X^t[k] -> Y`` with
    inverse ``inv``; returns the new complex and the isomorphism."""
    S = C.S
    X = C.obj(t)
    Y = iso.target
    for comp, src in ((inv @ iso, iso.source), (iso @ inv, Y)):
        bad = comp.agrees(S.identity(src))
        if bad is not None:
            raise NotInvertible(f"change of basis fails at x-degree {bad}")
    before, after = list(range(k)), list(range(k + 1, len(X)))
    newX = Obj(X.summands[:k] + Y.summands + X.summands[k + 1:])
    m = len(Y)
    pos_old = before + after
    pos_new = before + [p + m - 1 for p in after]
    ny = list(range(k, k + m))
    Phi = place(S, S.identity(sub_obj(X, pos_old)), X, pos_old, newX, pos_new)
    Phi = Phi + place(S, iso, X, [k], newX, ny)
    Psi = place(S, S.identity(sub_obj(X, pos_old)), newX, pos_new, X, pos_old)
    Psi = Psi + place(S, inv, newX, ny, X, [k])
    objs = dict(C.objs)
    objs[t] = newX
    diffs = dict(C.diffs)
    if t - 1 in diffs:
        diffs[t - 1] = Phi @ diffs[t - 1]
    if t in diffs:
        diffs[t] = diffs[t] @ Psi
    return BoundedComplex(S, objs, diffs), (Phi, Psi)


def split_summand(C, t, k, biproduct):
    """Replace ``X^t[k]`` using a biproduct ``X = A (+) B``."""
    S = C.S
    bp = biproduct
    X = C.obj(t)
    sh = X.summands[k].shift - bp.incA.target.summands[0].shift
    sk = Obj([X.summands[k]])
    A = bp.incA.source.shifted(sh)
    B = bp.incB.source.shifted(sh)
    iso = direct_sum(S, [sk], [A, B], {(0, 0): shift_morphism(bp.projA, sh).reindexed(sk),
                                       (1, 0): shift_morphism(bp.projB, sh).reindexed(sk)})
    inv = direct_sum(S, [A, B], [sk], {(0, 0): shift_morphism(bp.incA, sh).reindexed(target=sk),
                                       (0, 1): shift_morphism(bp.incB, sh).reindexed(target=sk)})
    tag = X.summands[k].tag
    newY = Obj([Summand(s.gen, s.shift, (tag, "split", n)) for n, s in enumerate(iso.target.summands)])
    return replace_summand(C, t, k, iso.reindexed(target=newY), inv.reindexed(source=newY))


class EliminationStep:
    def __init__(self, t, b, a, alpha_inv, include, project, homotopy, result, certified):
        self.t, self.b, self.a = t, b, a
        self.alpha_inv = alpha_inv
        self.include = include
        self.project = project
        self.homotopy = homotopy
        self.result = result
        self.certified = certified


class EliminationCertificate:
    def __init__(self):
        self.steps = []

    def __len__(self):
        return len(self.steps)

    @property
    def certified(self):
        return min([s.certified for s in self.steps], default=None)


def gaussian_eliminate(C, pivot, check=True):
    """Remove summands ``a`` of ``X^t`` and ``b`` of ``X^{t+1}`` joined by an
    invertible entry ``alpha`` of ``d^t``.  ``pivot = (t, b, a)``."""
    S = C.S
    t, b, a = pivot
    X, Y = C.obj(t), C.obj(t + 1)
    d = C.d(t)
    alpha = restrict(d, [a], [b])
    try:
        ainv = invert_morphism(alpha, "alpha^-1")
    except NotInvertible as exc:
        raise PivotNotInvertible(f"entry ({t}: {b} <- {a}) is not invertible: {exc}") from exc
    Xp = [k for k in range(len(X)) if k != a]
    Yp = [k for k in range(len(Y)) if k != b]
    delta = restrict(d, Xp, [b])
    gamma = restrict(d, [a], Yp)
    eps = restrict(d, Xp, Yp)
    corr = gamma @ ainv @ delta
    objs = dict(C.objs)
    objs[t] = sub_obj(X, Xp)
    objs[t + 1] = sub_obj(Y, Yp)
    diffs = dict(C.diffs)
    diffs[t] = eps - corr
    if t - 1 in diffs:
        diffs[t - 1] = restrict(diffs[t - 1], list(range(len(C.obj(t - 1)))), Xp)
    if t + 1 in diffs:
        diffs[t + 1] = restrict(diffs[t + 1], Yp, list(range(len(C.obj(t + 2)))))
    R = BoundedComplex(S, objs, diffs)
    # homotopy data
    iXp, pXp = inclusion(S, X, Xp), projection(S, X, Xp)
    iYp, pYp = inclusion(S, Y, Yp), projection(S, Y, Yp)
    ia, pb = inclusion(S, X, [a]), projection(S, Y, [b])
    f_t = iXp - ia @ ainv @ delta
    g_t1 = pYp - gamma @ ainv @ pb
    h = ia @ ainv @ pb
    inc = {u: S.identity(R.obj(u)) for u in R.degrees()}
    pro = {u: S.identity(C.obj(u)) for u in C.degrees()}
    if len(Xp):
        inc[t] = f_t
        pro[t] = pXp
    else:
        inc.pop(t, None)
        pro.pop(t, None)
    if len(Yp):
        inc[t + 1] = iYp
        pro[t + 1] = g_t1
    else:
        inc.pop(t + 1, None)
        pro.pop(t + 1, None)
    include = ChainMap(R, C, inc)
    project = ChainMap(C, R, pro)
    cert = S.ctx.trunc
    if check:
        cert = min(cert, R.check())
        cert = min(cert, include.check(), project.check())
        gf = project.compose(include)
        for u in R.degrees():
            bad = gf.at(u).agrees(S.identity(R.obj(u)))
            if bad is not None:
                raise VerificationFailed("elimination g.f", bad, {"degree": u})
        # 1 - f g == d h + h d, with h: X^{t+1} -> X^t the only nonzero piece
        fg = include.compose(project)
        for u in C.degrees():
            lhs = S.identity(C.obj(u)) - fg.at(u)
            rhs = S.zero_map(C.obj(u), C.obj(u))
            if u == t:
                rhs = h @ d
            elif u == t + 1:
                rhs = d @ h
            bad = lhs.agrees(rhs)
            if bad is not None:
                raise VerificationFailed("elimination homotopy", bad, {"degree": u})
    return R, EliminationStep(t, b, a, ainv, include, project, h, R, cert)


def find_pivot(C, skip=()):
    """First invertible entry between equal generators in adjacent degrees."""
    from soergel.bimod.matrix import invert_matrix, to_matrix

    S = C.S
    for t in C.degrees():
        if t not in C.diffs:
            continue
        X, Y = C.obj(t), C.obj(t + 1)
        for a, sa in enumerate(X.summands):
            for b, sb in enumerate(Y.summands):
                if (sa.gen, sa.shift) != (sb.gen, sb.shift) or (t, b, a) in skip:
                    continue
                alpha = restrict(C.d(t), [a], [b])
                try:
                    invert_matrix(S.ctx, to_matrix(alpha)[2])
                except NotInvertible:
                    continue
                return (t, b, a)
    return None


def eliminate_all(C, check=True):
    cert = EliminationCertificate()
    while True:
        p = find_pivot(C)
        if p is None:
            return C, cert
        C, step = gaussian_eliminate(C, p, check)
        cert.steps.append(step)


# -- Rouquier complexes --------------------------------------------------------
def _check_index(S, i):
    if not 1 <= i <= S.n - 1:
        raise IndexOutOfRange(f"index {i} outside 1..{S.n - 1}")


def rouquier(S, i):
    """``R_i = fib(m_i(-2)) = [EB_i(-2)@0 -> R(-2)@1]``."""
    _check_index(S, i)
    m = m_map(S, i).reindexed(S.EB(i, shift=-2), S.Rreg(-2))
    return two_term(S, m, 0, tag=f"R{i}")


def rouquier_inverse(S, i, via="delta"):
    """``R'_i = cofib(Delta_i) = [R(2)@-1 -> EB_i@0]``.

    ``via="deltas"`` uses ``Delta s_i: Rs_i(2) -> EB_i`` instead; that
    complex tensors with ``R_i`` to ``Rs_i`` rather than ``R``.
    """
    _check_index(S, i)
    if via == "delta":
        f = delta_map(S, i)
    elif via == "deltas":
        f = deltas_map(S, i)
    else:
        raise ValueError("via is 'delta' or 'deltas'")
    return two_term(S, f, -1, tag=f"R'{i}")


def _split_eb_words(C, splitters):
    """Split every summand whose generator has a registered biproduct."""
    changed = True
    while changed:
        changed = False
        for t in C.degrees():
            for k, s in enumerate(C.obj(t).summands):
                bp = splitters.get(s.gen)
                if bp is not None:
                    C, _ = split_summand(C, t, k, bp)
                    changed = True
                    break
            if changed:
                break
    return C


def is_unit_complex(C):
    """``[R@0]`` with zero shift and no twist."""
    if C.degrees() != [0] or len(C.obj(0)) != 1:
        return False
    s = C.obj(0).summands[0]
    return not s.gen.slots and not s.gen.twisted and s.shift == 0


class Report:
    def __init__(self, check, status, certified, trace, final, detail=None):
        self.check = check
        self.status = status
        self.certified = certified
        self.trace = trace
        self.final = final
        self.detail = detail or {}

    @property
    def passed(self):
        return self.status == "pass"


def _reduce(S, C, splitters):
    C.check()
    C = _split_eb_words(C, splitters)
    C.check()
    return eliminate_all(C)


def verify_rouquier_invertible(S, i, order="RR'", via="delta"):
    """Reduce ``R (x) R'`` (or ``R' (x) R``) to ``[R@0]``."""
    _check_index(S, i)
    R, Rp = rouquier(S, i), rouquier_inverse(S, i, via)
    if order == "RR'":
        C, side = cx_tensor(R, Rp), "L"
    elif order == "R'R":
        C, side = cx_tensor(Rp, R), "R"
    else:
        raise ValueError("order is \"RR'\" or \"R'R\"")
    bp = split_BB(S, i, side)
    red, cert = _reduce(S, C, {S.gen(i, i): bp})
    ok = is_unit_complex(red)
    certified = min([bp.certified] + [s.certified for s in cert.steps])
    rep = Report(f"rouquier-{order}", "pass" if ok else "fail", certified, len(cert), red.summary())
    if not ok:
        raise VerificationFailed("rouquier", certified, {"surviving": red.summary()})
    return rep


def slide_sides(S, i, j):
    """``EB_i (x) R_j (x) R_i`` and ``R_j (x) R_i (x) EB_j``, shifted by 4."""
    Ri, Rj = rouquier(S, i), rouquier(S, j)
    lhs = cx_tensor_many(single(S, S.EB(i).retagged(("EB", i))), Rj, Ri).shifted(4)
    rhs = cx_tensor_many(Rj, Ri, single(S, S.EB(j).retagged(("EB", j)))).shifted(4)
    return lhs, rhs


def verify_slide(S, i, j, side="R"):
    """Both sides reduce to ``[EB_{i,j}@0 -> EB_ij@1]`` (or ``EB_ji``) and the
    identity of ``EB_{i,j}`` with the identity of the target is a chain
    isomorphism between the reductions (the commuting square)."""
    if abs(i - j) != 1 or S.n < 3:
        raise IndexOutOfRange("slide needs neighbouring indices and n >= 3")
    lhs, rhs = slide_sides(S, i, j)
    red = {}
    trace = 0
    certs = []
    for name, C, a, b in (("lhs", lhs, i, j), ("rhs", rhs, j, i)):
        sp = split_121(S, a, b, side)
        bb = split_BB(S, a, side)
        R, cert = _reduce(S, C, {S.gen(a, b, a): sp.biproduct, S.gen(a, a): bb})
        trace += len(cert)
        certs += [sp.certified, bb.certified] + [s.certified for s in cert.steps]
        shape = R.summary()
        par = S.gen((min(i, j), min(i, j) + 1))
        ok = (R.degrees() == [0, 1] and len(R.obj(0)) == 1 and len(R.obj(1)) == 1
              and R.obj(0).summands[0].gen == par and R.obj(1).summands[0].gen == S.gen(i, j))
        if not ok:
            raise VerificationFailed(f"slide {name} reduction", None, {"surviving": shape})
        red[name] = R
    L, Rr = red["lhs"], red["rhs"]
    phi = ChainMap(L, Rr, {0: S.identity(L.obj(0)).reindexed(L.obj(0), Rr.obj(0)),
                           1: S.identity(L.obj(1)).reindexed(L.obj(1), Rr.obj(1))})
    sign = 1
    try:
        certs.append(phi.check())
    except VerificationFailed:
        phi = ChainMap(L, Rr, {0: -phi.at(0), 1: phi.at(1)})
        certs.append(phi.check())
        sign = -1
    lhs_sq, rhs_sq = sts_squares(S, i, j)["st-square"]
    bad = lhs_sq.agrees(rhs_sq)
    if bad is not None:
        raise VerificationFailed("slide square", bad)
    return Report(f"slide-{i}{j}", "pass", min(certs), trace,
                  {"lhs": L.summary(), "rhs": Rr.summary()}, {"sign": sign})


def condition_one_report(S, i):
    from soergel.bimod.maps import condition_one

    bp = condition_one(S, i)
    return Report(f"condition-one-{i}", "pass", bp.certified, 0, bp.relations)

