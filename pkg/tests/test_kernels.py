import numpy as np
import pytest

from fstruct import _pykernels, kernels
from fstruct.scalars import MULT_TABLE


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="extension not built")
@pytest.mark.parametrize("ring", ["R", "C", "H"])
def test_ring_matmul_backends_agree(ring, rng):
    T = MULT_TABLE[ring]
    d = T.shape[0]
    A, B = rng.standard_normal((3, 4, d)), rng.standard_normal((4, 2, d))
    assert np.allclose(kernels.ring_matmul(A, B, T), _pykernels.ring_matmul(A, B, T), atol=1e-12)


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="extension not built")
def test_bilinear_backends_agree(rng):
    T = rng.standard_normal((5, 6, 6))
    X, Y = rng.standard_normal((7, 6)), rng.standard_normal((7, 6))
    assert np.allclose(kernels.bilinear_batch(T, X, Y), _pykernels.bilinear_batch(T, X, Y), atol=1e-12)


def test_use_backend_roundtrip(rng):
    T = rng.standard_normal((2, 3, 3))
    X = rng.standard_normal((4, 3))
    ref = np.einsum("kij,pi,pj->pk", T, X, X)
    prev = kernels.use_backend("python")
    try:
        assert np.allclose(kernels.bilinear_batch(T, X, X), ref)
    finally:
        kernels.use_backend(prev)
    assert np.allclose(kernels.bilinear_batch(T, X, X), ref)


def test_shape_mismatch_raises():
    with pytest.raises(ValueError):
        kernels.bilinear_batch(np.zeros((2, 3, 3)), np.zeros((4, 3)), np.zeros((5, 3)))
