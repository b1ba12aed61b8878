# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror :mod:`fstruct._pykernels`."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def ring_matmul(const double[:, :, ::1] A, const double[:, :, ::1] B,
                const double[:, :, ::1] table):
    """Product of two matrices whose entries live in an algebra with
    multiplication tensor ``table[a, b, c]`` (component c of e_a * e_b)."""
    cdef Py_ssize_t n = A.shape[0], m = A.shape[1], p = B.shape[1]
    cdef Py_ssize_t d = A.shape[2]
    if B.shape[0] != m or B.shape[2] != d or table.shape[0] != d:
        raise ValueError("shape mismatch in ring_matmul")
    out = np.zeros((n, p, d), dtype=np.float64)
    cdef double[:, :, ::1] C = out
    cdef Py_ssize_t i, j, k, a, b, c
    cdef double av, prod, t
    for i in range(n):
        for j in range(m):
            for a in range(d):
                av = A[i, j, a]
                if av == 0.0:
                    continue
                for k in range(p):
                    for b in range(d):
                        prod = av * B[j, k, b]
                        if prod == 0.0:
                            continue
                        for c in range(d):
                            t = table[a, b, c]
                            if t != 0.0:
                                C[i, k, c] += t * prod
    return out


def bilinear_batch(const double[:, :, ::1] T, const double[:, ::1] X,
                   const double[:, ::1] Y):
    """out[p, k] = sum_ij T[k, i, j] X[p, i] Y[p, j]."""
    cdef Py_ssize_t nk = T.shape[0], ni = T.shape[1], nj = T.shape[2]
    cdef Py_ssize_t P = X.shape[0]
    if X.shape[1] != ni or Y.shape[1] != nj or Y.shape[0] != P:
        raise ValueError("shape mismatch in bilinear_batch")
    out = np.zeros((P, nk), dtype=np.float64)
    cdef double[:, ::1] O = out
    cdef Py_ssize_t p, k, i, j
    cdef double xi, acc
    for p in range(P):
        for k in range(nk):
            acc = 0.0
            for i in range(ni):
                xi = X[p, i]
                if xi == 0.0:
                    continue
                for j in range(nj):
                    acc += T[k, i, j] * xi * Y[p, j]
            O[p, k] = acc
    return out
