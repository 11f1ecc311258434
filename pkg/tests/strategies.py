"""Hypothesis strategies for truncated series."""

from itertools import product

from hypothesis import strategies as st


def monomials(ctx, max_x):
    np_ = len(ctx.ring.params)
    out = []
    for xe in product(range(max_x + 1), repeat=ctx.nvars):
        if sum(xe) <= max_x:
            for pe in product(range(2), repeat=np_):
                out.append((xe, pe))
    return out


def series(ctx, max_x=None, max_terms=5):
    monos = monomials(ctx, ctx.trunc if max_x is None else max_x)
    terms = st.dictionaries(st.sampled_from(monos), st.integers(-4, 4), max_size=max_terms)
    return terms.map(ctx.from_terms)


def homogeneous(ctx, d, max_x=None):
    """Elements of internal degree ``d``."""
    max_x = ctx.trunc if max_x is None else max_x
    ws = [-deg for _, deg in ctx.ring.params]
    monos = []
    for xe, pe in monomials(ctx, max_x):
        if 2 * sum(xe) - sum(w * e for w, e in zip(ws, pe)) == d:
            monos.append((xe, pe))
    if not monos:
        return st.just(ctx.zero())
    return st.dictionaries(st.sampled_from(monos), st.integers(-4, 4), max_size=4).map(ctx.from_terms)
