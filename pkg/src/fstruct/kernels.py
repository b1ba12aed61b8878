"""Backend selection for the hot loops.

The compiled extension is used when it imports; set ``FSTRUCT_BACKEND=python``
to force the numpy fallback.
"""

import os

import numpy as np

from fstruct import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("FSTRUCT_BACKEND", "").lower() != "python":
    try:
        from fstruct import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels


def _c3(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def ring_matmul(A, B, table):
    return _impl.ring_matmul(_c3(A), _c3(B), _c3(table))


def bilinear_batch(T, X, Y):
    X = np.atleast_2d(X)
    Y = np.atleast_2d(Y)
    return _impl.bilinear_batch(_c3(T), _c3(X), _c3(Y))


def use_backend(name):
    """Switch backend at runtime ("cython" or "python"); returns the previous one."""
    global _impl, BACKEND
    prev = BACKEND
    if name == "python":
        _impl, BACKEND = _pykernels, "python"
    elif name == "cython":
        from fstruct import _kernels

        _impl, BACKEND = _kernels, "cython"
    else:
        raise ValueError(f"unknown backend {name!r}")
    return prev
