"""Pure-Python (numpy) versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def ring_matmul(A, B, table):
    """Product of two matrices whose entries live in an algebra with
    multiplication tensor ``table[a, b, c]`` (component c of e_a * e_b)."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape[1] != B.shape[0] or A.shape[2] != B.shape[2] or table.shape[0] != A.shape[2]:
        raise ValueError("shape mismatch in ring_matmul")
    return np.einsum("ija,jkb,abc->ikc", A, B, table, optimize=True)


def bilinear_batch(T, X, Y):
    """out[p, k] = sum_ij T[k, i, j] X[p, i] Y[p, j]."""
    T = np.asarray(T, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.shape[1] != T.shape[1] or Y.shape[1] != T.shape[2] or X.shape[0] != Y.shape[0]:
        raise ValueError("shape mismatch in bilinear_batch")
    return np.einsum("kij,pi,pj->pk", T, X, Y, optimize=True)
