"""Structure maps between Bott-Samelson bimodules and the rank-one splittings."""

from __future__ import annotations

from soergel.bimod.core import Morphism, add_into, check_equivariance, elt_agrees, prune
from soergel.errors import IndexOutOfRange, VerificationFailed


def _idx(S, i):
    if not 1 <= i <= S.n - 1:
        raise IndexOutOfRange(f"index {i} outside 1..{S.n - 1}")


def _basis_images(S, X, fn):
    g = X.summands[0].gen
    return {(0, lab): prune(fn(lab)) for lab in S.labels(g)}


def split_by_power(G, var):
    """``G = sum_b G_b * v^b``: returns ``{b: G_b}`` with ``v`` removed."""
    ctx = G.ctx
    groups = {}
    for x, p, c in G.items():
        b = x[var - 1]
        y = list(x)
        y[var - 1] = 0
        groups.setdefault(b, {})[(tuple(y), p)] = c
    out = {}
    for b, terms in groups.items():
        prec = G.prec - b if G.prec != float("inf") else G.prec
        out[b] = ctx.from_terms(terms, prec=prec)
    return out


def _fgl_element(S, u_var, v_var, i):
    """``x_u (x) 1  -_F  1 (x) x_v`` in ``EB_i``."""
    L = S.law
    c2 = L.ctx
    X, Y = c2.variables()
    G = L.F.substitute([X, L.iota.substitute([Y])])
    g = S.gen(i)
    one = S.ctx.one()
    out = {}
    for b, Gb in split_by_power(G, 2).items():
        left = Gb.embed(S.ctx, (u_var, u_var))
        for lab, c in S.nf(g, [one, S.ctx.var(v_var) ** b]).items():
            key = (0, lab)
            w = left * c
            out[key] = out[key] + w if key in out else w
    return prune(out)


def m_map(S, i):
    _idx(S, i)
    X = S.EB(i)
    B = S.sep_basis(i)
    return Morphism(S, X, S.Rreg(), _basis_images(S, X, lambda lab: {(0, ()): B[lab[0]]}), f"m{i}")


def ms_map(S, i):
    _idx(S, i)
    X = S.EB(i)
    B = S.sep_basis(i)
    return Morphism(S, X, S.Rs(i), _basis_images(S, X, lambda lab: {(0, ()): B[lab[0]].swap(i)}), f"ms{i}")


def delta_map(S, i):
    """``Delta_i: R(2) -> EB_i``, ``1 -> x_i(x)1 -_F 1(x)x_{i+1}``."""
    _idx(S, i)
    return Morphism(S, S.Rreg(2), S.EB(i), {(0, ()): _fgl_element(S, i, i + 1, i)}, f"Delta{i}")


def deltas_map(S, i):
    """``Delta s_i: Rs_i(2) -> EB_i``, ``1 -> x_{i+1}(x)1 -_F 1(x)x_{i+1}``."""
    _idx(S, i)
    return Morphism(S, S.Rs(i, 2), S.EB(i), {(0, ()): _fgl_element(S, i + 1, i + 1, i)}, f"Deltas{i}")


def mu_map(S, i):
    _idx(S, i)
    X = S.EB(i)
    return Morphism(S, X, S.EB(i, i), _basis_images(S, X, lambda lab: {(0, (0,) + lab): S.ctx.one()}), f"mu{i}")


def _dprime_basis(S, i):
    return [S.R.demazure_prime(i, b) for b in S.sep_basis(i)]


def nabla_left(S, i):
    """``r1 (x) r2 (x) r3 -> r1 d'_i(r2) (x) r3``."""
    _idx(S, i)
    X = S.EB(i, i)
    D = _dprime_basis(S, i)
    return Morphism(S, X, S.EB(i, shift=2),
                    _basis_images(S, X, lambda lab: {(0, (lab[1],)): D[lab[0]]}), f"nablaL{i}")


def nabla_right(S, i, literal=False):
    """``r1 (x) r2 (x) r3 -> r1 (x) (-d_i r2) r3``.

    With ``literal=True`` the mirrored operator ``d'_i`` is used instead;
    that variant only splits ``EB_i (x) Delta s_i`` for the additive law.
    """
    _idx(S, i)
    X = S.EB(i, i)
    D = _dprime_basis(S, i) if literal else [S.R.demazure(i, b) for b in S.sep_basis(i)]
    B = S.sep_basis(i)
    g = S.gen(i)
    one = S.ctx.one()

    def img(lab):
        return {(0, l2): c for l2, c in S.nf(g, [one, -(D[lab[0]] * B[lab[1]])]).items()}

    return Morphism(S, X, S.EB(i, shift=2), _basis_images(S, X, img), f"nablaR{i}")


def parabolic_sep(i, j):
    if abs(i - j) != 1:
        raise IndexOutOfRange("parabolic needs neighbouring indices")
    a = min(i, j)
    return (a, a + 1)


def mu_iji(S, i, j):
    """``EB_{i,j} -> EB_iji``, ``r1 (x) r2 -> r1 (x) 1 (x) 1 (x) r2``."""
    sep = parabolic_sep(i, j)
    _idx(S, max(i, j))
    X = S.EB(sep)
    g = S.gen(i, j, i)
    one = S.ctx.one()
    B = S.sep_basis(sep)

    def img(lab):
        return {(0, l2): c for l2, c in S.nf(g, [one, one, one, B[lab[0]]]).items()}

    return Morphism(S, X, S.EB(i, j, i), _basis_images(S, X, img), f"mu{i}{j}{i}")


def restrict_map(S, i, j):
    """``EB_{i,j} -> EB_i``, ``r1 (x) r2 -> r1 (x) r2``."""
    sep = parabolic_sep(i, j)
    X = S.EB(sep)
    g = S.gen(i)
    one = S.ctx.one()
    B = S.sep_basis(sep)

    def img(lab):
        return {(0, l2): c for l2, c in S.nf(g, [one, B[lab[0]]]).items()}

    return Morphism(S, X, S.EB(i), _basis_images(S, X, img), f"res{i}")


def left_mult(S, X, u, name=None):
    """``e -> u e`` on ``X`` (a bimodule endomorphism)."""
    m = S.identity(X).left_mul(u)
    m.name = name
    return m


def right_mult(S, X, f, name=None):
    """``e -> e f`` on ``X`` (a bimodule endomorphism)."""
    images = {}
    for j, s in enumerate(X.summands):
        for lab in S.labels(s.gen):
            images[(j, lab)] = {(j, l2): c for l2, c in S.right_basis(s.gen, lab, f).items()}
    return Morphism(S, X, X, images, name)


def whisker(S, left_word, phi, right_word):
    """``EB_left (x) phi (x) EB_right``."""
    out = phi
    if left_word:
        out = S.mor_tensor(S.identity(S.EB(*left_word)), out)
    if right_word:
        out = S.mor_tensor(out, S.identity(S.EB(*right_word)))
    out.name = f"{''.join(map(str, left_word))}[{phi.name}]{''.join(map(str, right_word))}"
    return out


STRUCTURE_MAPS = {
    "m": m_map,
    "ms": ms_map,
    "delta": delta_map,
    "deltas": deltas_map,
    "mu": mu_map,
    "nablaL": nabla_left,
    "nablaR": nabla_right,
}


def structure_map(S, name, i, j=None):
    if name == "mu_iji":
        return mu_iji(S, i, j)
    if name == "restrict":
        return restrict_map(S, i, j)
    try:
        return STRUCTURE_MAPS[name](S, i)
    except KeyError:
        raise ValueError(f"unknown structure map {name!r}") from None


# -- biproduct certificates ---------------------------------------------------
class Biproduct:
    """``X == A (+) B`` via inclusions/projections with verified relations."""

    def __init__(self, incA, projA, incB, projB, relations):
        self.incA, self.projA = incA, projA
        self.incB, self.projB = incB, projB
        self.relations = relations

    @property
    def certified(self):
        return min(self.relations.values())


def verify_biproduct(S, incA, projA, incB, projB):
    """Check ``pA iA = 1``, ``pB iB = 1``, ``pA iB = 0``, ``pB iA = 0`` and
    ``iA pA + iB pB = 1``; return a :class:`Biproduct`."""
    rel = {}

    def need(name, m, kind):
        if kind == "id":
            bad = m.agrees(S.identity(m.source))
        else:
            bad = m.agrees(S.zero_map(m.source, m.target))
        if bad is not None:
            raise VerificationFailed(name, bad)
        rel[name] = m.certified()

    need("retraction", projA @ incA, "id")
    need("section", projB @ incB, "id")
    need("cross-A", projB @ incA, "zero")
    need("cross-B", projA @ incB, "zero")
    total = (incA @ projA) + (incB @ projB)
    bad = total.agrees(S.identity(total.source))
    if bad is not None:
        raise VerificationFailed("completeness", bad)
    rel["completeness"] = total.certified()
    return Biproduct(incA, projA, incB, projB, rel)


def split_BB(S, i, side="L"):
    """``EB_ii == EB_i (+) EB_i(2)``; only the ``Delta s_i`` side exists."""
    mu = mu_map(S, i)
    if side == "L":
        ret = whisker(S, (), m_map(S, i), (i,))
        nab = nabla_left(S, i)
        sec = whisker(S, (), deltas_map(S, i), (i,))
    elif side == "R":
        ret = whisker(S, (i,), m_map(S, i), ())
        nab = nabla_right(S, i)
        sec = whisker(S, (i,), deltas_map(S, i), ())
    else:
        raise ValueError("side is 'L' or 'R'")
    return verify_biproduct(S, mu, ret, sec, nab)


def condition_one(S, i):
    """``EB_i == R (+) Rs_i(2)`` as left modules (the four explicit maps)."""
    _idx(S, i)
    X = S.EB(i)
    one = S.ctx.one()
    m = m_map(S, i)
    ds = deltas_map(S, i)
    sec = Morphism(S, S.Rreg(), X, {(0, ()): {(0, (0,)): one}}, "r->r(x)1")
    D = _dprime_basis(S, i)
    ret = Morphism(S, X, S.Rs(i, 2), {(0, (b,)): prune({(0, ()): D[b]}) for b in range(2)},
                   "r1(x)r2->r1 d'(r2)")
    return verify_biproduct(S, sec, m, ds, ret)


def key_identity(S, i, r2):
    """``1(x)r2 - r2(x)1 == d'_i(r2) (x_{i+1}(x)1 -_F 1(x)x_{i+1})`` in
    ``EB_i``; returns the first failing degree or ``None``."""
    g = S.gen(i)
    one = S.ctx.one()
    lhs = add_into(dict(S.nf(g, [one, r2])), {k: -v for k, v in S.nf(g, [r2, one]).items()})
    el = _fgl_element(S, i + 1, i + 1, i)
    d = S.R.demazure_prime(i, r2)
    rhs = {lab: d * c for (_, lab), c in el.items()}
    return elt_agrees(prune(lhs), prune(rhs))


def corner_unit(S, i):
    """``nablaL o (EB_i (x) Delta s_i)``: an automorphism of ``EB_i(2)``."""
    comp = nabla_left(S, i) @ whisker(S, (i,), deltas_map(S, i), ())
    return comp


def check_all_equivariant(maps):
    return {m.name: check_equivariance(m) for m in maps}
