# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Semantics must match ``fallback.py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, int32_t
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef enum:
    OP_NOT = -1
    OP_AND = -2
    OP_OR = -3
    OP_IMP = -4
    OP_IFF = -5

cdef uint64_t[6] _LOW_MASKS
_LOW_MASKS[0] = 0xAAAAAAAAAAAAAAAAULL
_LOW_MASKS[1] = 0xCCCCCCCCCCCCCCCCULL
_LOW_MASKS[2] = 0xF0F0F0F0F0F0F0F0ULL
_LOW_MASKS[3] = 0xFF00FF00FF00FF00ULL
_LOW_MASKS[4] = 0xFFFF0000FFFF0000ULL
_LOW_MASKS[5] = 0xFFFFFFFF00000000ULL


def first_countermodel(const int32_t[::1] code, int nvars):
    """Index of the first truth-table row where the postfix program is false, or -1.

    Row ``r`` assigns variable ``v`` the value of bit ``v`` of ``r``.
    """
    cdef Py_ssize_t n = code.shape[0]
    cdef int64_t rows = (<int64_t>1) << nvars
    cdef int64_t words = rows // 64 if rows >= 64 else 1
    cdef uint64_t valid = 0xFFFFFFFFFFFFFFFFULL if rows >= 64 else (((<uint64_t>1) << rows) - 1)
    cdef uint64_t *stack = <uint64_t *> malloc((n + 1) * sizeof(uint64_t))
    cdef int64_t w
    cdef Py_ssize_t i, sp
    cdef int32_t c
    cdef uint64_t a, b, res
    cdef int bit
    if stack == NULL:
        raise MemoryError()
    try:
        for w in range(words):
            sp = 0
            for i in range(n):
                c = code[i]
                if c >= 0:
                    if c < 6:
                        stack[sp] = _LOW_MASKS[c]
                    elif (w >> (c - 6)) & 1:
                        stack[sp] = 0xFFFFFFFFFFFFFFFFULL
                    else:
                        stack[sp] = 0
                    sp += 1
                elif c == OP_NOT:
                    stack[sp - 1] = ~stack[sp - 1]
                else:
                    b = stack[sp - 1]
                    a = stack[sp - 2]
                    sp -= 1
                    if c == OP_AND:
                        stack[sp - 1] = a & b
                    elif c == OP_OR:
                        stack[sp - 1] = a | b
                    elif c == OP_IMP:
                        stack[sp - 1] = (~a) | b
                    else:
                        stack[sp - 1] = ~(a ^ b)
            res = (~stack[0]) & valid
            if res:
                bit = 0
                while not ((res >> bit) & 1):
                    bit += 1
                return w * 64 + bit
        return -1
    finally:
        free(stack)


def bkt_trace(double p, const unsigned char[::1] observations,
              double p_transit, double p_guess, double p_slip):
    """Mastery after each observation (1 = correct)."""
    cdef Py_ssize_t n = observations.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    cdef double num, post
    for i in range(n):
        if observations[i]:
            num = p * (1.0 - p_slip)
            post = num / (num + (1.0 - p) * p_guess)
        else:
            num = p * p_slip
            post = num / (num + (1.0 - p) * (1.0 - p_guess))
        p = post + (1.0 - post) * p_transit
        o[i] = p
    return out


def dominance_counts(const double[::1] xs, const double[::1] ys):
    """(#x>y, #x==y) over all pairs; both inputs must be sorted ascending."""
    cdef Py_ssize_t n = xs.shape[0], m = ys.shape[0]
    cdef Py_ssize_t i, lo = 0, hi = 0
    cdef int64_t gt = 0, eq = 0
    cdef double v
    for i in range(n):
        v = xs[i]
        while lo < m and ys[lo] < v:
            lo += 1
        if hi < lo:
            hi = lo
        while hi < m and ys[hi] <= v:
            hi += 1
        gt += lo
        eq += hi - lo
    return gt, eq
