# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scoring kernel.

Same contract and accumulation order as kernels._pure; compiled with
-ffp-contract=off so the float sums match the fallback bit for bit.
"""
import numpy as np

BACKEND = "accel"


def accumulate_group_totals(group, weight, mult, in_scope, invalid, n_groups):
    """Per-group raw counts and weighted totals over coded signal arrays."""
    cdef const int[:] g = np.ascontiguousarray(group, dtype=np.intc)
    cdef const double[:] w = np.ascontiguousarray(weight, dtype=np.float64)
    cdef const double[:] m = np.ascontiguousarray(mult, dtype=np.float64)
    cdef const unsigned char[:] s = np.ascontiguousarray(in_scope, dtype=np.uint8)
    cdef const unsigned char[:] b = np.ascontiguousarray(invalid, dtype=np.uint8)

    total_raw = np.zeros(n_groups, dtype=np.int64)
    invalid_raw = np.zeros(n_groups, dtype=np.int64)
    total_weighted = np.zeros(n_groups, dtype=np.float64)
    invalid_weighted = np.zeros(n_groups, dtype=np.float64)

    cdef long long[:] tr = total_raw
    cdef long long[:] ir = invalid_raw
    cdef double[:] tw = total_weighted
    cdef double[:] iw = invalid_weighted

    cdef Py_ssize_t i, gi
    cdef Py_ssize_t n = g.shape[0]
    cdef double contrib

    for i in range(n):
        gi = g[i]
        tr[gi] += 1
        if b[i]:
            ir[gi] += 1
        if s[i]:
            contrib = w[i] * m[i]
            tw[gi] += contrib
            if b[i]:
                iw[gi] += contrib

    return total_raw, invalid_raw, total_weighted, invalid_weighted
