# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled message-passing kernels.

Mirrors ``_mp_py`` operation for operation; column sums accumulate in flat
pair order and damping uses the same two-rounding sequence, so the two
backends produce bit-identical messages (the extension is built with FP
contraction disabled to keep it that way).
"""

from libc.math cimport INFINITY

COMPILED = True


def sparse_iteration(double[::1] s, double[::1] r, double[::1] a,
                     long long[::1] row_ptr, long long[::1] col,
                     long long[::1] self_pos, const unsigned char[::1] forced,
                     double[::1] colsum, double damping):
    """One update sweep over CSR support pairs, in place."""
    cdef Py_ssize_t n = row_ptr.shape[0] - 1
    cdef Py_ssize_t i, k, p, start, end, argm
    cdef double om = 1.0 - damping
    cdef double m1, m2, u, rnew, v, anew

    for i in range(n):
        start = row_ptr[i]
        end = row_ptr[i + 1]
        if end - start == 1:
            continue  # single candidate: self responsibility stays pinned
        m1 = -INFINITY
        m2 = -INFINITY
        argm = start
        for p in range(start, end):
            u = a[p] + s[p]
            if u > m1:
                m2 = m1
                m1 = u
                argm = p
            elif u > m2:
                m2 = u
        for p in range(start, end):
            if p == argm:
                rnew = s[p] - m2
            else:
                rnew = s[p] - m1
            r[p] = damping * r[p] + om * rnew

    for k in range(n):
        colsum[k] = 0.0
    for i in range(n):
        start = row_ptr[i]
        end = row_ptr[i + 1]
        for p in range(start, end):
            if p == self_pos[i]:
                v = r[p]
            else:
                v = r[p] if r[p] > 0.0 else 0.0
            colsum[col[p]] += v
    for i in range(n):
        start = row_ptr[i]
        end = row_ptr[i + 1]
        for p in range(start, end):
            if p == self_pos[i]:
                anew = colsum[i] - r[p]
            elif forced[col[p]]:
                anew = 0.0
            else:
                v = r[p] if r[p] > 0.0 else 0.0
                anew = colsum[col[p]] - v
                if anew > 0.0:
                    anew = 0.0
            a[p] = damping * a[p] + om * anew


def dense_iteration(double[:, ::1] s, double[:, ::1] r, double[:, ::1] a,
                    double[::1] colsum, double damping):
    """One update sweep over full (n, n) message matrices, in place."""
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t i, k, argm
    cdef double om = 1.0 - damping
    cdef double m1, m2, u, rnew, v, anew

    for i in range(n):
        m1 = -INFINITY
        m2 = -INFINITY
        argm = 0
        for k in range(n):
            u = a[i, k] + s[i, k]
            if u > m1:
                m2 = m1
                m1 = u
                argm = k
            elif u > m2:
                m2 = u
        for k in range(n):
            if k == argm:
                rnew = s[i, k] - m2
            else:
                rnew = s[i, k] - m1
            r[i, k] = damping * r[i, k] + om * rnew

    for k in range(n):
        colsum[k] = 0.0
    for i in range(n):
        for k in range(n):
            if i == k:
                v = r[i, k]
            else:
                v = r[i, k] if r[i, k] > 0.0 else 0.0
            colsum[k] += v
    for i in range(n):
        for k in range(n):
            if i == k:
                anew = colsum[k] - r[k, k]
            else:
                v = r[i, k] if r[i, k] > 0.0 else 0.0
                anew = colsum[k] - v
                if anew > 0.0:
                    anew = 0.0
            a[i, k] = damping * a[i, k] + om * anew
