"""Pure-Python sparse multiplication kernel.

Monomials are packed integers whose top field is the total x-degree, so
integer order is degree order and a sorted operand lets the inner loop stop
as soon as the truncation limit is crossed.
"""

from __future__ import annotations


def mul_terms(a, b, limit, guard):
    """Multiply packed-term dicts ``a`` and ``b``, keeping keys ``< limit``.

    ``guard`` masks the overflow bit of every parameter field; a product key
    touching it means an exponent left its field and the result is invalid.
    """
    if len(a) > len(b):
        a, b = b, a
    bk = sorted(b)
    bv = [b[k] for k in bk]
    nb = len(bk)
    out = {}
    get = out.get
    for ka, ca in a.items():
        room = limit - ka
        if room <= 0:
            continue
        for idx in range(nb):
            kb = bk[idx]
            if kb >= room:
                break
            k = ka + kb
            if k & guard:
                raise OverflowError("parameter exponent exceeds packed field width")
            out[k] = get(k, 0) + ca * bv[idx]
    return {k: v for k, v in out.items() if v}
