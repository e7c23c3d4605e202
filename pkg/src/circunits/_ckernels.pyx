# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the modular evaluation kernels (see _kernels_py)."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()


cdef inline int64_t _powmod(int64_t b, int64_t e, int64_t q) nogil:
    cdef int64_t r = 1
    b %= q
    if b < 0:
        b += q
    while e > 0:
        if e & 1:
            r = r * b % q
        b = b * b % q
        e >>= 1
    return r


def modpow(base, exp, q):
    cdef cnp.ndarray[int64_t, ndim=1] b = np.ascontiguousarray(base, dtype=np.int64).ravel()
    cdef cnp.ndarray[int64_t, ndim=1] out = np.empty_like(b)
    cdef Py_ssize_t i
    cdef int64_t e = exp, qq = q
    for i in range(b.shape[0]):
        out[i] = _powmod(b[i], e, qq)
    return out.reshape(np.shape(base))


def modinv(a, q):
    return modpow(a, q - 2, q)


def symbol_values(W, X, offsets, T, N, q):
    cdef int64_t[::1] w = np.ascontiguousarray(W, dtype=np.int64)
    cdef int64_t[::1] x = np.ascontiguousarray(X, dtype=np.int64)
    cdef int64_t[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef int64_t[::1] t = np.ascontiguousarray(T, dtype=np.int64)
    cdef Py_ssize_t ng = off.shape[0] - 1, nt = t.shape[0]
    cdef cnp.ndarray[int64_t, ndim=2] out = np.ones((ng, nt), dtype=np.int64)
    cdef int64_t[:, ::1] V = out
    cdef int64_t NN = N, qq = q, acc, ti
    cdef Py_ssize_t g, j, k
    with nogil:
        for g in range(ng):
            for j in range(nt):
                ti = t[j]
                acc = 1
                for k in range(off[g], off[g + 1]):
                    acc = acc * ((1 - w[x[k] * ti % NN] + qq) % qq) % qq
                V[g, j] = acc
    return out


def relation_products(V, rowptr, idx, exps, q):
    cdef int64_t[:, ::1] v = np.ascontiguousarray(V, dtype=np.int64)
    cdef int64_t[::1] rp = np.ascontiguousarray(rowptr, dtype=np.int64)
    cdef int64_t[::1] ix = np.ascontiguousarray(idx, dtype=np.int64)
    cdef int64_t[::1] ex = np.ascontiguousarray(exps, dtype=np.int64)
    cdef Py_ssize_t nrel = rp.shape[0] - 1, nt = v.shape[1]
    P_arr = np.ones((nrel, nt), dtype=np.int64)
    Q_arr = np.ones((nrel, nt), dtype=np.int64)
    cdef int64_t[:, ::1] P = P_arr
    cdef int64_t[:, ::1] Q = Q_arr
    cdef int64_t qq = q, e
    cdef Py_ssize_t r, k, j
    with nogil:
        for r in range(nrel):
            for k in range(rp[r], rp[r + 1]):
                e = ex[k]
                if e > 0:
                    for j in range(nt):
                        P[r, j] = P[r, j] * _powmod(v[ix[k], j], e, qq) % qq
                elif e < 0:
                    for j in range(nt):
                        Q[r, j] = Q[r, j] * _powmod(v[ix[k], j], -e, qq) % qq
    return P_arr, Q_arr
