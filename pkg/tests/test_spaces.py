import numpy as np
import pytest

from conftest import SPACES, space_id
from fstruct.registry import build_space, oriented_flags, parse_space
from fstruct.spaces import (
    MODULES, ReductiveSpace, bracket_m, equivariant_maps, irreducibility_probe, project,
    verify_assumption1,
)

stiefel = build_space("stiefel_so4_so2")


def test_dims():
    assert stiefel.dims == (1, 1, 2, 2)
    sp3 = build_space("sp3_flags")
    assert sp3.dims == (9, 4, 4, 4) and sp3.ring == "H"
    assert build_space("su3_tmax").dims == (2, 2, 2, 2)
    for n in (4, 5, 6, 7):
        assert build_space("oriented_flags", (n,)).dims == ((n - 3) * (n - 4) // 2 + 1, 2 * (n - 3), 2, n - 3)


def test_bad_parameters():
    with pytest.raises(ValueError):
        oriented_flags(3)
    with pytest.raises(KeyError):
        parse_space("nowhere")
    with pytest.raises(ValueError):
        parse_space("oriented_flags:x")


def test_project_coordinates():
    X = stiefel.vector([1, 2, 3, 4, 5])
    assert np.array_equal(project(X, 3).coords, [0, 0, 0, 4, 5])
    Y = stiefel.module_vector(2, [1, -1])
    assert project(Y, 2).allclose(Y)
    assert project(Y, 1).norm_max() == 0 and project(Y, 3).norm_max() == 0


@pytest.mark.parametrize("S", SPACES, ids=space_id)
def test_projections_orthogonal_idempotent(S, rng):
    G = S.gram
    for _ in range(5):
        X = S.vector(rng.standard_normal(S.dim_m))
        parts = [project(X, i) for i in MODULES]
        assert sum(parts[1:], parts[0]).allclose(X)
        for i, P in zip(MODULES, parts):
            assert project(P, i).allclose(P)
        for a in range(3):
            for b in range(a + 1, 3):
                assert abs(parts[a].coords @ G @ parts[b].coords) < 1e-9


@pytest.mark.parametrize("S", SPACES, ids=space_id)
def test_module_bracket_relations(S, rng):
    for i in MODULES:
        j, k = i % 3 + 1, (i + 1) % 3 + 1
        X = S.module_vector(i, rng.standard_normal(S.dims[i]))
        Y = S.module_vector(j, rng.standard_normal(S.dims[j]))
        m, h = bracket_m(X, Y)
        assert project(m, k).allclose(m) and h.max_abs() < 1e-9
        m2, _ = bracket_m(X, X + X * 0.5)
        assert m2.norm_max() < 1e-9
        Z = S.module_vector(i, rng.standard_normal(S.dims[i]))
        assert bracket_m(X, Z)[0].norm_max() < 1e-9


def test_stiefel_m1_self_bracket():
    X = stiefel.module_vector(1, [1.0])
    assert bracket_m(X, X * 3.0)[0].norm_max() == 0


def test_equivariant_map_counts():
    assert equivariant_maps(stiefel, 1, 1) == 1
    assert equivariant_maps(stiefel, 1, 2) == 0
    assert equivariant_maps(stiefel, 2, 2) == 2


def test_sp3_modules_real_type():
    S = build_space("sp3_flags")
    assert [equivariant_maps(S, i, i) for i in MODULES] == [1, 1, 1]


@pytest.mark.parametrize("name,params", [("su3_tmax", ()), ("sp3_flags", ()),
                                         ("oriented_flags", (6,)), ("oriented_flags", (7,))])
def test_assumption_holds(name, params):
    rep = verify_assumption1(build_space(name, params))
    assert rep.passed, rep.failed_clauses


def test_flags5_module_splits():
    probe = irreducibility_probe(build_space("oriented_flags", (5,)), 1)
    assert not probe.irreducible
    assert sorted(probe.invariant_subspace_dims) == [2, 2]


def test_corrupted_space_fails_a3():
    m = stiefel.m_basis
    broken = ReductiveSpace("broken", "R", 4, stiefel.h_basis, [m[0], m[1] + m[2], []], 2.0)
    rep = verify_assumption1(broken)
    assert not rep.clause("A3").passed
    assert not rep.passed


def test_non_orthogonal_fails_a2():
    m = stiefel.m_basis
    skewed = [m[1][0] + m[2][0], m[1][1]]
    bad = ReductiveSpace("skewed", "R", 4, stiefel.h_basis, [m[0], skewed, m[2]], 2.0)
    rep = verify_assumption1(bad)
    assert "A2" in rep.failed_clauses
