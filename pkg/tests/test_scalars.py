import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fstruct.registry import build_space
from fstruct.scalars import Mat, RingMismatch, Scalar, bracket, quat_mul, trace_form

finite = st.floats(-10, 10, allow_nan=False)
quats = st.tuples(finite, finite, finite, finite).map(lambda t: Scalar.quat(*t))


def E(n, a, b):
    return Mat.from_entries("R", n, [(a, b, 1.0), (b, a, -1.0)])


def test_quaternion_units():
    i, j, k = Scalar.quat(x=1), Scalar.quat(y=1), Scalar.quat(z=1)
    assert quat_mul(i, j).isclose(k)
    assert quat_mul(j, i).isclose(-k)
    assert quat_mul(i, i).isclose(Scalar.quat(-1))


def test_quaternion_identity_and_expansion():
    q = Scalar.quat(0.3, -1, 2, 0.5)
    assert (q * Scalar.quat(1)).isclose(q)
    lhs = Scalar.quat(1, 1) * Scalar.quat(1, 0, 1)
    assert lhs.isclose(Scalar.quat(1, 1, 1, 1))


def test_ring_mismatch():
    with pytest.raises(RingMismatch):
        Scalar("C", (1.0, 0.0)) * Scalar.quat(1)


@given(quats, quats)
def test_norm_multiplicative(p, q):
    assert np.isclose((p * q).norm(), p.norm() * q.norm(), rtol=1e-12, atol=1e-9)


@given(quats, quats, quats)
def test_quaternion_associative(p, q, r):
    assert ((p * q) * r).isclose(p * (q * r), tol=1e-8)


def test_so3_bracket():
    A, B = E(3, 0, 1), E(3, 1, 2)
    assert bracket(A, B).allclose(E(3, 0, 2))
    assert bracket(A, A).max_abs() == 0.0


def test_trace_form_values():
    A = E(4, 0, 1)
    assert trace_form(A, A, 2.0) == pytest.approx(4.0)
    assert trace_form(E(4, 0, 1), E(4, 2, 3), 2.0) == 0.0
    S = build_space("sp3_flags")
    X = S.m_basis[0][0]
    assert trace_form(X, X, 8.0) == pytest.approx(16.0)


def _random_skew(ring, n, rng):
    M = Mat(ring, rng.standard_normal((n, n, {"R": 1, "C": 2, "H": 4}[ring])))
    return M - M.H


@pytest.mark.parametrize("ring", ["R", "C", "H"])
def test_jacobi_and_invariance(ring, rng):
    for _ in range(10):
        A, B, C = (_random_skew(ring, 3, rng) for _ in range(3))
        jac = bracket(A, bracket(B, C)) + bracket(B, bracket(C, A)) + bracket(C, bracket(A, B))
        assert jac.max_abs() < 1e-9
        # ad-invariance of the trace form
        lhs = trace_form(bracket(A, B), C, 1.0) + trace_form(B, bracket(A, C), 1.0)
        assert abs(lhs) < 1e-9


def test_matrix_product_matches_complex(rng):
    z = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    w = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    prod = (Mat.from_complex(z) @ Mat.from_complex(w)).to_complex()
    assert np.allclose(prod, z @ w)


def test_mat_is_immutable():
    M = Mat.zeros("R", 2)
    with pytest.raises(AttributeError):
        M.ring = "C"
