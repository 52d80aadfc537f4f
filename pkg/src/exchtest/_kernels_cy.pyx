# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: per-symbol evidence updates and chain samplers.

API-identical to `_kernels_py`; plain C loops over the same recurrences.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport log

cnp.import_array()

BACKEND = "cython"


def kt_log_numerator(x, int d, int k):
    cdef cnp.int64_t[::1] xs = np.ascontiguousarray(x, dtype=np.int64)
    cdef Py_ssize_t t = xs.shape[0]
    out_arr = np.empty(t, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef cnp.int64_t dk = 1
    cdef int j
    for j in range(k):
        dk *= d
    cdef cnp.int64_t[:, ::1] ctx = np.zeros((dk, d), dtype=np.int64)
    cdef cnp.int64_t[::1] rowsum = np.zeros(dk, dtype=np.int64)
    cdef double acc = 0.0
    cdef double logd = log(<double> d)
    cdef double half_d = 0.5 * d
    cdef cnp.int64_t code = 0
    cdef Py_ssize_t s
    cdef cnp.int64_t a
    for s in range(t):
        a = xs[s]
        if s < k:
            acc -= logd
            code = code * d + a
        else:
            acc += log((ctx[code, a] + 0.5) / (rowsum[code] + half_d))
            ctx[code, a] += 1
            rowsum[code] += 1
            if k > 0:
                code = (code * d + a) % dk
        out[s] = acc
    return out_arr


def bernoulli_mle_log(x, int d):
    cdef cnp.int64_t[::1] xs = np.ascontiguousarray(x, dtype=np.int64)
    cdef Py_ssize_t t = xs.shape[0]
    out_arr = np.empty(t, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef cnp.int64_t[::1] n = np.zeros(d, dtype=np.int64)
    cdef double entsum = 0.0  # sum_a n_a ln n_a
    cdef double c
    cdef Py_ssize_t s
    cdef cnp.int64_t a
    for s in range(t):
        a = xs[s]
        c = <double> n[a]
        if c > 0.0:
            entsum += (c + 1.0) * log(c + 1.0) - c * log(c)
        # c == 0 contributes (0+1)*ln(1) = 0
        n[a] += 1
        out[s] = entsum - (s + 1.0) * log(s + 1.0)
    return out_arr


def kt0_split_log_numerator(x, int d, Py_ssize_t split):
    cdef cnp.int64_t[::1] xs = np.ascontiguousarray(x, dtype=np.int64)
    cdef Py_ssize_t t = xs.shape[0]
    out_arr = np.empty(t, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef cnp.int64_t[::1] n = np.zeros(d, dtype=np.int64)
    cdef double half_d = 0.5 * d
    cdef double acc = 0.0
    cdef Py_ssize_t s, pos = 0
    cdef cnp.int64_t a
    for s in range(t):
        if s == split:
            n[:] = 0
            pos = 0
        a = xs[s]
        acc += log((n[a] + 0.5) / (pos + half_d))
        n[a] += 1
        pos += 1
        out[s] = acc
    return out_arr


def sample_markov1(u, double p10, double p11, int x0):
    cdef double[::1] us = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t t = us.shape[0]
    out_arr = np.empty(t, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    cdef cnp.int64_t prev = x0
    cdef Py_ssize_t i
    cdef double p
    out[0] = prev
    for i in range(1, t):
        p = p11 if prev == 1 else p10
        prev = 1 if us[i] < p else 0
        out[i] = prev
    return out_arr


def sample_markov_ctx(u, cdf, int d, int k, init):
    cdef double[::1] us = np.ascontiguousarray(u, dtype=np.float64)
    cdef double[:, ::1] cdfv = np.ascontiguousarray(cdf, dtype=np.float64)
    cdef cnp.int64_t[::1] iv = np.ascontiguousarray(init, dtype=np.int64)
    cdef Py_ssize_t t = us.shape[0]
    cdef cnp.int64_t dk = cdfv.shape[0]
    out_arr = np.empty(t, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    cdef cnp.int64_t code = 0, a
    cdef Py_ssize_t i
    for i in range(min(k, t)):
        out[i] = iv[i]
        code = code * d + iv[i]
    for i in range(k, t):
        a = 0
        while a < d - 1 and us[i] >= cdfv[code, a]:
            a += 1
        out[i] = a
        code = (code * d + a) % dk
    return out_arr
