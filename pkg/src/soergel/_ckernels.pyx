# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled sparse multiplication kernel.

Same contract as ``_kernels_py.mul_terms``.  Keys live in ``uint64`` and
coefficients in ``int64`` with overflow detection; any coefficient that does
not fit, or any overflowing product, sends the call back to the Python path.
"""

from libc.stdint cimport int64_t, uint64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector
from libcpp.algorithm cimport sort
from libcpp.pair cimport pair
from cython.operator cimport dereference as deref, preincrement as inc

from soergel._kernels_py import mul_terms as _py_mul_terms

cdef extern from *:
    """
    static inline int _smul_ovf(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int _sadd_ovf(long long a, long long b, long long *r) {
        return __builtin_add_overflow(a, b, r);
    }
    """
    int _smul_ovf(long long a, long long b, long long *r) nogil
    int _sadd_ovf(long long a, long long b, long long *r) nogil

cdef int64_t _I64_MAX = 9223372036854775807
cdef int64_t _I64_MIN = -9223372036854775807


cdef bint _load(dict d, vector[pair[uint64_t, int64_t]]& out):
    cdef object k, v
    out.reserve(len(d))
    for k, v in d.items():
        if v > _I64_MAX or v < _I64_MIN:
            return False
        out.push_back(pair[uint64_t, int64_t](<uint64_t>k, <int64_t>v))
    return True


def mul_terms(dict a, dict b, object limit, object guard):
    if limit >= (1 << 63):
        return _py_mul_terms(a, b, limit, guard)
    cdef vector[pair[uint64_t, int64_t]] va, vb
    if not _load(a, va) or not _load(b, vb):
        return _py_mul_terms(a, b, limit, guard)
    sort(vb.begin(), vb.end())
    cdef uint64_t lim = <uint64_t>limit
    cdef uint64_t g = <uint64_t>guard
    cdef unordered_map[uint64_t, int64_t] acc
    cdef size_t i, j, nb = vb.size()
    cdef uint64_t ka, k, room
    cdef long long prod, s
    cdef bint overflow = False
    with nogil:
        for i in range(va.size()):
            ka = va[i].first
            if ka >= lim:
                continue
            room = lim - ka
            for j in range(nb):
                if vb[j].first >= room:
                    break
                k = ka + vb[j].first
                if k & g:
                    overflow = True
                    break
                if _smul_ovf(va[i].second, vb[j].second, &prod):
                    overflow = True
                    break
                s = acc[k]
                if _sadd_ovf(s, prod, &s):
                    overflow = True
                    break
                acc[k] = s
            if overflow:
                break
    if overflow:
        # either a genuine field overflow (re-raised by the Python path) or an
        # int64 coefficient overflow (handled exactly by the Python path)
        return _py_mul_terms(a, b, limit, guard)
    cdef dict out = {}
    cdef unordered_map[uint64_t, int64_t].iterator it = acc.begin()
    while it != acc.end():
        if deref(it).second != 0:
            out[deref(it).first] = deref(it).second
        inc(it)
    return out
