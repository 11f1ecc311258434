"""Verification suites: each suite is a list of named check items.

An item is ``(check_id, function, args)``.  Functions take the
:class:`~soergel.bimod.Setting`, the run config, the args and an ``inputs``
dict they fill with serialized random inputs (the reproduction payload).
They return ``(certified degree, trace length, detail)`` or raise.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from itertools import product

from soergel.bimod import Setting
from soergel.bimod.maps import key_identity, corner_unit, split_BB
from soergel.bimod.matrix import invert_morphism
from soergel.bimod.sts import check_sts_square, gkm_injectivity, split_121, unit_closed_form
from soergel.complexes import condition_one_report, verify_rouquier_invertible, verify_slide
from soergel.errors import ConfigError, VerificationFailed
from soergel.fgl import check_axioms, make_fgl

SUITES = ("fgl-axioms", "demazure", "splittings", "condition-one", "sts", "gkm", "rouquier", "braid")
# (min rank, min truncation)
REQUIRES = {
    "fgl-axioms": (1, 1),
    "demazure": (2, 2),
    "splittings": (2, 4),
    "condition-one": (2, 2),
    "sts": (3, 4),
    "gkm": (2, 2),
    "rouquier": (2, 4),
    "braid": (3, 4),
}
RANDOM_ITEMS = 20


@dataclass(frozen=True)
class RunConfig:
    fgl: str = "additive"
    rank: int = 3
    trunc: int = 6
    coeff: str = "Z"
    suite: str = "all"
    seed: int = 0
    out: str | None = None

    def suites(self):
        """Selected suites; ``all`` keeps those the rank and truncation allow."""
        if self.suite == "all":
            return [s for s in SUITES if self._fits(s)]
        names = [s.strip() for s in self.suite.split(",") if s.strip()]
        for s in names:
            if s not in REQUIRES:
                raise ConfigError(f"unknown suite {s!r}; choose from {', '.join(SUITES)} or all")
            n, N = REQUIRES[s]
            if self.trunc < N:
                raise ConfigError(f"suite {s} needs truncation N >= {N}, got {self.trunc}")
            if self.rank < n:
                raise ConfigError(f"suite {s} needs rank n >= {n}, got {self.rank}")
        return names

    def skipped(self):
        return [s for s in SUITES if not self._fits(s)] if self.suite == "all" else []

    def _fits(self, s):
        n, N = REQUIRES[s]
        return self.rank >= n and self.trunc >= N

    def validate(self):
        if self.trunc < 1:
            raise ConfigError("truncation N must be positive")
        if self.rank < 1:
            raise ConfigError("rank n must be positive")
        if self.coeff not in ("Z", "Q"):
            raise ConfigError("coefficient base is Z or Q")
        return self.suites()

    def key(self):
        return (self.fgl, self.rank, self.trunc, self.coeff)

    def as_dict(self):
        return asdict(self)


_SETTINGS = {}


def setting_for(cfg):
    S = _SETTINGS.get(cfg.key())
    if S is None:
        L = make_fgl(cfg.fgl, cfg.trunc, cfg.coeff)
        S = Setting(L, max(cfg.rank, 2))
        _SETTINGS[cfg.key()] = S
    return S


def law_for(cfg):
    if cfg.rank >= 2:
        return setting_for(cfg).law
    return make_fgl(cfg.fgl, cfg.trunc, cfg.coeff)


# -- random homogeneous elements ----------------------------------------------
def item_rng(cfg, *parts):
    return random.Random(":".join(map(str, (cfg.seed, cfg.fgl, cfg.rank, cfg.trunc) + parts)))


def random_homogeneous(ctx, d, rng, max_x=None, nterms=4):
    """A random element of internal degree ``d`` whose x-degrees stay
    ``<= max_x`` (default ``N - 2``); integer coefficients in ``[-3, 3]``."""
    max_x = ctx.trunc - 2 if max_x is None else max_x
    weights = [-deg // 2 for _, deg in ctx.ring.params]
    monos = []
    for k in range(max_x + 1):
        w = k - d // 2
        if 2 * k - 2 * w != d or w < 0:
            continue
        for xe in product(range(k + 1), repeat=ctx.nvars):
            if sum(xe) != k:
                continue
            for pe in product(*(range(w // a + 1) for a in weights)):
                if sum(a * e for a, e in zip(weights, pe)) == w:
                    monos.append((xe, pe))
    if not monos or d % 2:
        return ctx.zero()
    terms = {}
    for _ in range(nterms):
        terms[rng.choice(monos)] = rng.choice([-3, -2, -1, 1, 2, 3])
    return ctx.from_terms(terms)


def _random_pair(S, rng):
    """Two random homogeneous elements whose x-degrees sum to at most ``N - 2``."""
    N = S.ctx.trunc
    a = rng.randrange(0, N - 1)
    f = random_homogeneous(S.ctx, 2 * rng.randrange(0, a + 1), rng, max_x=a)
    b = N - 2 - a
    h = random_homogeneous(S.ctx, 2 * rng.randrange(0, b + 1), rng, max_x=b)
    return f, h


def _need(name, lhs, rhs):
    bad = lhs.agrees(rhs)
    if bad is not None:
        raise VerificationFailed(name, bad)
    return lhs.certified_with(rhs)


# -- items ------------------------------------------------------------------------
def _fgl_axioms(S, cfg, args, inputs):
    out = check_axioms(law_for(cfg))
    return min(out.values()), 0, out


def _demazure_random(S, cfg, args, inputs):
    i, k = args
    rng = item_rng(cfg, "demazure", i, k)
    R = S.R
    f, h = _random_pair(S, rng)
    inputs.update(f=f.to_text(), h=h.to_text())
    inv = f + R.s(i, f)
    certs = [
        _need("(1) d kills invariants", R.demazure(i, inv), S.ctx.zero()),
        _need("(1) d' kills invariants", R.demazure_prime(i, inv), S.ctx.zero()),
        _need("(2) twisted Leibniz", R.demazure(i, f * h), R.demazure(i, f) * h + R.s(i, f) * R.demazure(i, h)),
        _need("(2) twisted Leibniz'", R.demazure_prime(i, f * h),
              R.demazure_prime(i, f) * R.s(i, h) + f * R.demazure_prime(i, h)),
        _need("(3) invariant linearity", R.demazure(i, inv * h), inv * R.demazure(i, h)),
        _need("(3) invariant linearity'", R.demazure_prime(i, inv * h), inv * R.demazure_prime(i, h)),
    ]
    return min(certs), 0, {}


def _demazure_generators(S, cfg, args, inputs):
    (i,) = args
    R, L, ctx = S.R, S.law, S.ctx
    xi, xj = ctx.var(i), ctx.var(i + 1)
    g, gm = L.unit(ctx, i), L.unit(ctx, i, mirrored=True)
    certs = [
        _need("(4) d x_i", R.demazure(i, xi), g),
        _need("(4) d x_i+1", R.demazure(i, xj), -g),
        _need("(4) d' x_i", R.demazure_prime(i, xi), gm),
        _need("(4) d' x_i+1", R.demazure_prime(i, xj), -gm),
    ]
    return min(certs), 0, {}


def _key_identity(S, cfg, args, inputs):
    i, k = args
    rng = item_rng(cfg, "key-identity", i, k)
    d = 2 * rng.randrange(0, max(S.ctx.trunc - 2, 1) + 1)
    r2 = random_homogeneous(S.ctx, d, rng)
    inputs.update(r2=r2.to_text())
    bad = key_identity(S, i, r2)
    if bad is not None:
        raise VerificationFailed("key identity", bad)
    # d'_i is certified one below N
    return S.ctx.trunc - 1, 0, {}


def _split_bb(S, cfg, args, inputs):
    i, side = args
    bp = split_BB(S, i, side)
    return bp.certified, 0, dict(bp.relations)


def _corner_unit(S, cfg, args, inputs):
    (i,) = args
    comp = corner_unit(S, i)
    inv = invert_morphism(comp, "unit^-1")
    return min(comp.certified(), inv.certified()), 0, {}


def _condition_one(S, cfg, args, inputs):
    (i,) = args
    rep = condition_one_report(S, i)
    return rep.certified, 0, dict(rep.final)


def _split121(S, cfg, args, inputs):
    i, j, side = args
    sp = split_121(S, i, j, side)
    detail = dict(sp.relations)
    if side == "L":
        _need("unit closed form", sp.unit, unit_closed_form(S, i, j))
    return sp.certified, 0, detail


def _sts_square(S, cfg, args, inputs):
    i, j = args
    rep = check_sts_square(S, i, j, max_degree=min(12, 2 * S.ctx.trunc))
    detail = {"squares": rep.squares, "exactness": {str(d): list(v) for d, v in rep.exactness.items()}}
    return rep.certified, 0, detail


def _gkm(S, cfg, args, inputs):
    (i,) = args
    out = gkm_injectivity(S, i)
    return 2 * S.ctx.trunc, 0, {str(d): list(v) for d, v in out.items()}


def _rouquier(S, cfg, args, inputs):
    i, order = args
    rep = verify_rouquier_invertible(S, i, order)
    return rep.certified, rep.trace, {"final": {str(k): v for k, v in rep.final.items()}}


def _slide(S, cfg, args, inputs):
    i, j = args
    rep = verify_slide(S, i, j)
    return rep.certified, rep.trace, {"sign": rep.detail["sign"]}


def _pairs(n):
    return [(i, i + 1) for i in range(1, n - 1)] + [(i + 1, i) for i in range(1, n - 1)]


def items_for(cfg, suite):
    n = cfg.rank
    idx = range(1, n)
    if suite == "fgl-axioms":
        return [("fgl-axioms", _fgl_axioms, ())]
    if suite == "demazure":
        out = [(f"demazure-gen-{i}", _demazure_generators, (i,)) for i in idx]
        out += [(f"demazure-props-{i}-{k:02d}", _demazure_random, (i, k)) for i in idx for k in range(RANDOM_ITEMS)]
        return out
    if suite == "splittings":
        out = [(f"key-identity-{i}-{k:02d}", _key_identity, (i, k)) for i in idx for k in range(RANDOM_ITEMS)]
        out += [(f"split-BB-{i}-{side}", _split_bb, (i, side)) for i in idx for side in "LR"]
        out += [(f"corner-unit-{i}", _corner_unit, (i,)) for i in idx]
        return out
    if suite == "condition-one":
        return [(f"condition-one-{i}", _condition_one, (i,)) for i in idx]
    if suite == "sts":
        out = [(f"split-121-{i}{j}-{side}", _split121, (i, j, side)) for i, j in _pairs(n) for side in "LR"]
        out += [(f"sts-square-{i}{j}", _sts_square, (i, j)) for i, j in _pairs(n)]
        return out
    if suite == "gkm":
        return [(f"gkm-{i}", _gkm, (i,)) for i in idx]
    if suite == "rouquier":
        return [(f"rouquier-{i}-{o}", _rouquier, (i, o)) for i in idx for o in ("RR'", "R'R")]
    if suite == "braid":
        return [(f"slide-{i}{j}", _slide, (i, j)) for i, j in _pairs(n)]
    raise ConfigError(f"unknown suite {suite!r}")
