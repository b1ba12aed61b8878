"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; the session summary (see conftest) prints
one line per criterion after the run.
"""

from functools import lru_cache

import numpy as np
import pytest

from fstruct.cli import main as cli_main
from fstruct.connection import (
    CLASSES, Metric, cross_validate, metric_grid, nabla, predicate_direct, u_closed, u_oracle,
    u_tensor_closed,
)
from fstruct.foperator import classify_shape
from fstruct.library import all_builtin, builtin_f, is_antipodal, quaternion_pairs, quaternion_samples
from fstruct.registry import build_space, registered_instances
from fstruct.scalars import bracket, trace_form
from fstruct.spaces import MODULES, project, verify_assumption1

TOL = 1e-9
GRID = metric_grid()
SPACES = registered_instances()
RESULTS: dict = {}


def record(criterion: int, part: str, ok: bool, detail: str = "") -> None:
    RESULTS.setdefault(criterion, []).append((part, bool(ok), detail))
    print(f"criterion {criterion} [{part}]: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else ""))


def _proportional(g: Metric, ref) -> bool:
    r = np.array(g.numbers) / np.array(ref, dtype=float)
    return bool(np.max(r) - np.min(r) <= 1e-9 * np.max(r))


@lru_cache(maxsize=None)
def _sp3_family():
    S = build_space("sp3_flags")
    fs = []
    for h1, h2 in quaternion_pairs():
        for fid in ("f1", "f2", "f3"):
            fs.append(builtin_f(S, fid, {"h1": h1, "h2": h2}))
    fs += [builtin_f(S, f"one{p}", {"h": h}) for p in MODULES for h in quaternion_samples()]
    return tuple(fs)


@lru_cache(maxsize=None)
def _all_structures():
    out = [f for S in SPACES for f in all_builtin(S)]
    return tuple(out) + _sp3_family()


@lru_cache(maxsize=None)
def _agreements():
    return tuple(cross_validate(f, GRID, TOL) for f in _all_structures())


# -- 1 ------------------------------------------------------------------------


@pytest.mark.parametrize("S", SPACES, ids=lambda S: S.label)
def test_criterion_1_assumption_audit(S):
    rep = verify_assumption1(S, TOL)
    worst = max(c.residual for c in rep.clauses)
    ok = rep.passed and worst < TOL
    detail = f"max residual {worst:.2g}"
    if not rep.passed:
        a2 = rep.clause("A2").detail if "A2" in rep.failed_clauses else {}
        detail += f"; failed {rep.failed_clauses}"
        if a2.get("equivalent_pairs"):
            detail += f"; equivalent modules {a2['equivalent_pairs']}"
        if a2.get("reducible_modules"):
            detail += f"; reducible modules {a2['reducible_modules']}"
    record(1, S.label, ok, detail)
    assert ok, detail


# -- 2 ------------------------------------------------------------------------


@pytest.mark.parametrize("S", SPACES, ids=lambda S: S.label)
def test_criterion_2_oracle_equivalence(S):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(5):
        g = Metric(*rng.uniform(0.2, 5.0, 3))
        for _ in range(100):
            X = S.vector(rng.standard_normal(S.dim_m))
            Y = S.vector(rng.standard_normal(S.dim_m))
            worst = max(worst, float(np.max(np.abs(u_closed(X, Y, g).coords - u_oracle(X, Y, g).coords))))
    ok = worst < 1e-8
    record(2, S.label, ok, f"500 pairs, max |U_closed - U_oracle| = {worst:.2g}")
    assert ok


# -- 3 ------------------------------------------------------------------------


def test_criterion_3_image_shapes():
    image = [f for f in _all_structures() if classify_shape(f).kind == "image"]
    bad = []
    for f in image:
        for g in GRID:
            r = {c: predicate_direct(c, f, g, TOL) for c in CLASSES}
            if not (r["NKf"].holds and r["G1f"].holds and not r["Killf"].holds):
                bad.append(f"{f.space.label} {f.name} {g}")
    ok = bool(image) and not bad
    record(3, "all", ok, f"{len(image)} structures x {len(GRID)} metrics"
           + (f"; first failure {bad[0]}" if bad else ""))
    assert ok


# -- 4 ------------------------------------------------------------------------


@pytest.mark.parametrize("space,params,fid,ref,must_fail", [
    ("stiefel_so4_so2", (), "f4", (4, 3, 3), [(1, 1, 1), (3, 3, 4)]),
    ("oriented_flags", (5,), "f1", (3, 3, 4), [(1, 1, 1)]),
])
def test_criterion_4_killing_points(space, params, fid, ref, must_fail):
    f = builtin_f(build_space(space, params), fid)
    holds = {g.numbers for g in GRID if predicate_direct("Killf", f, g, TOL).holds}
    expected = {g.numbers for g in GRID if _proportional(g, ref)}
    fails = all(not predicate_direct("Killf", f, Metric(*m), TOL).holds for m in must_fail)
    ok = holds == expected and bool(expected) and fails
    record(4, f"{f.space.label} {fid}", ok, f"Killf on {sorted(holds)}")
    assert ok


# -- 5 ------------------------------------------------------------------------


def test_criterion_5_sp3_quaternionic():
    S = build_space("sp3_flags")
    problems = []
    antipodal = [(h1, h2) for h1, h2 in quaternion_pairs() if is_antipodal(h1, h2)]
    for h1, h2 in antipodal:
        f = builtin_f(S, "f1", {"h1": h1, "h2": h2})
        nkf = {g.numbers for g in GRID if predicate_direct("NKf", f, g, TOL).holds}
        want = {g.numbers for g in GRID if abs(g.a1 - g.a2) <= 1e-9 * g.a1}
        if nkf != want:
            problems.append(f"f1 h1={h1}: NKf on {len(nkf)} metrics, expected {len(want)}")
        kill = sorted(g.numbers for g in GRID if predicate_direct("Killf", f, g, TOL).holds)
        if kill:
            problems.append(f"f1 h1={h1} h2={h2}: Killf holds on {kill}")
    for h1, h2 in quaternion_pairs():
        for fid in ("f2", "f3"):
            f = builtin_f(S, fid, {"h1": h1, "h2": h2})
            if any(predicate_direct("NKf", f, g, TOL).holds for g in GRID):
                problems.append(f"{fid} h1={h1} h2={h2}: NKf somewhere")
    for p in MODULES:
        for h in quaternion_samples():
            f = builtin_f(S, f"one{p}", {"h": h})
            if not all(predicate_direct("NKf", f, g, TOL).holds for g in GRID):
                problems.append(f"one{p} h={h}: NKf fails somewhere")
    ok = bool(antipodal) and not problems
    record(5, "sp3_flags", ok, "; ".join(problems))
    assert ok, problems


# -- 6, 7 ---------------------------------------------------------------------


def test_criterion_6_route_agreement():
    reports = _agreements()
    bad = [r for r in reports if r.disagreements]
    detail = f"{len(reports)} structures x {len(GRID)} metrics"
    if bad:
        d = bad[0].first
        detail += f"; first: {bad[0].space} {bad[0].structure} {d.metric} {d.cls}"
    record(6, "all", not bad, detail)
    assert not bad


def test_criterion_7_class_chain():
    violations = [(r.space, r.structure, m) for r in _agreements() for m in r.chain_violations]
    for r in _agreements():
        for g, res in r.direct_table.items():
            if (res["Killf"].holds and not res["NKf"].holds) or (res["NKf"].holds and not res["G1f"].holds):
                violations.append((r.space, r.structure, g))
    record(7, "all", not violations, f"{sum(len(r.direct_table) for r in _agreements())} reports checked")
    assert not violations


# -- 8 ------------------------------------------------------------------------


def _full_structure(S):
    """Structure constants C[l, i, j] of the full basis h | m, and the decomposition residual."""
    basis = list(S.h_basis) + list(S.m_flat)
    n, k = len(basis), S.dims[0]
    C = np.zeros((n, n, n))
    resid = 0.0
    for i in range(n):
        for j in range(n):
            hc, mc, r = S.decompose(bracket(basis[i], basis[j]))
            C[:k, i, j], C[k:, i, j] = hc, mc
            resid = max(resid, r)
    return basis, C, resid


@pytest.mark.parametrize("S", SPACES, ids=lambda S: S.label)
def test_criterion_8_structural(S):
    basis, C, resid = _full_structure(S)
    G = S.full_gram
    k = S.dims[0]
    # Jacobi on all basis triples
    AC = np.einsum("mil,ljk->mijk", C, C)
    jac = AC + AC.transpose(0, 2, 3, 1) + AC.transpose(0, 3, 1, 2)
    checks = {"closure": resid, "jacobi": float(np.max(np.abs(jac)))}
    # ad-invariance of g0: g0([x,y],z) + g0(y,[x,z]) = 0
    inv = np.einsum("lij,lk->ijk", C, G) + np.einsum("lik,jl->ijk", C, G)
    checks["ad_invariance"] = float(np.max(np.abs(inv)))
    # the Gram matrix really is the trace form
    tf = np.array([[trace_form(a, b, S.g0_scale) for b in basis] for a in basis])
    checks["gram"] = float(np.max(np.abs(tf - G)))
    # projections on every basis vector
    proj = 0.0
    for e in np.eye(S.dim_m):
        X = S.vector(e)
        parts = [project(X, i) for i in MODULES]
        proj = max(proj, float(np.max(np.abs(sum(p.coords for p in parts) - e))))
        for i, P in zip(MODULES, parts):
            proj = max(proj, float(np.max(np.abs(project(P, i).coords - P.coords))))
            for j, Q in zip(MODULES, parts):
                if i != j:
                    proj = max(proj, abs(float(P.coords @ S.gram @ Q.coords)))
    checks["projection"] = proj
    Cm = C[k:, k:, k:]
    tors, uid = 0.0, 0.0
    for g in (Metric(1, 1, 1), Metric(0.5, 2, 4 / 3), Metric(3, 3, 4), Metric(4, 3, 3)):
        E = [S.vector(e) for e in np.eye(S.dim_m)]
        for a in range(S.dim_m):
            for b in range(S.dim_m):
                t = nabla(E[a], E[b], g).coords - nabla(E[b], E[a], g).coords - Cm[:, a, b]
                tors = max(tors, float(np.max(np.abs(t))))
        U, Gg = u_tensor_closed(S, g), g.gram(S)
        lhs = 2 * np.einsum("kij,kz->ijz", U, Gg)
        rhs = np.einsum("ik,kzj->ijz", Gg, Cm) + np.einsum("kzi,kj->ijz", Cm, Gg)
        uid = max(uid, float(np.max(np.abs(lhs - rhs))))
    checks["torsion"] = tors
    checks["u_identity"] = uid
    ok = all(v < TOL for v in checks.values())
    record(8, S.label, ok, ", ".join(f"{k} {v:.1g}" for k, v in checks.items()))
    assert ok, checks


# -- 9 ------------------------------------------------------------------------


def test_criterion_9_reproduce(capsys):
    code = cli_main(["reproduce-paper"])
    out = capsys.readouterr().out
    summary = out.strip().splitlines()[-1]
    record(9, "reproduce-paper", code == 0, f"exit {code}; {summary}")
    assert code == 0, out
