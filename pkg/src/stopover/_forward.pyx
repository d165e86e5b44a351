# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled scaled forward recursion; see ``_forward_py`` for the contract."""

import numpy as np

cimport numpy as cnp
from libc.math cimport log

cnp.import_array()


def forward_kernel(const double[::1] pi, const double[:, :, ::1] trans,
                   const double[:, :, ::1] expobs, const double[:, ::1] moff,
                   const long long[:, ::1] codes):
    cdef Py_ssize_t J = codes.shape[0]
    cdef Py_ssize_t K = codes.shape[1]
    cdef Py_ssize_t S = pi.shape[0]
    out_arr = np.empty(J, dtype=np.float64)
    cdef double[::1] out = out_arr
    work = np.empty(2 * S, dtype=np.float64)
    cdef double[::1] buf = work
    cdef Py_ssize_t j, k, a, b
    cdef long long c
    cdef double acc, tot, x
    cdef bint dead
    for j in range(J):
        c = codes[j, 0]
        tot = 0.0
        for a in range(S):
            x = pi[a] * expobs[0, c, a]
            buf[a] = x
            tot += x
        dead = tot <= 0.0
        acc = 0.0
        if not dead:
            acc = log(tot) + moff[0, c]
            for a in range(S):
                buf[a] /= tot
        k = 1
        while k < K and not dead:
            for b in range(S):
                buf[S + b] = 0.0
            for a in range(S):
                x = buf[a]
                if x != 0.0:
                    for b in range(S):
                        buf[S + b] += x * trans[k - 1, a, b]
            c = codes[j, k]
            tot = 0.0
            for b in range(S):
                x = buf[S + b] * expobs[k, c, b]
                buf[b] = x
                tot += x
            if tot <= 0.0:
                dead = True
            else:
                acc += log(tot) + moff[k, c]
                for b in range(S):
                    buf[b] /= tot
            k += 1
        out[j] = -np.inf if dead else acc
    return out_arr
