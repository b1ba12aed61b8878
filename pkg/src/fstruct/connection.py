"""Levi-Civita connection of diagonal invariant metrics and the class tests.

Two independent routes decide membership in G1f, NKf and Kill f:

* direct: the quadratic conditions on U and the bracket, checked by
  polarization over a basis plus random vectors;
* theorem: the image/kernel dichotomy with the bracket conditions, which
  yields a metric region ("all", "empty", a_j = a_k, or the Killing ray).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from fstruct import kernels
from fstruct.foperator import FOperator, Shape, classify_shape, check_invariance
from fstruct.scalars import EPS
from fstruct.spaces import MODULES, MVector, ReductiveSpace, bracket_m, project

CLASSES = ("G1f", "NKf", "Killf")
GRID_VALUES = (0.5, 1.0, 4.0 / 3.0, 2.0, 3.0, 4.0)
REL_TOL = 1e-9
KILLING_RATIO = 4.0 / 3.0


@dataclass(frozen=True)
class Metric:
    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        for name in ("a1", "a2", "a3"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v <= 0:
                raise ValueError(f"characteristic number {name}={v} must be positive")
            object.__setattr__(self, name, v)

    @classmethod
    def parse(cls, text: str) -> "Metric":
        parts = [p for p in text.replace(" ", "").split(",") if p]
        if len(parts) != 3:
            raise ValueError(f"metric needs three numbers, got {text!r}")
        return cls(*(float(Fraction(p)) for p in parts))

    @property
    def numbers(self) -> tuple[float, float, float]:
        return (self.a1, self.a2, self.a3)

    def __getitem__(self, i: int) -> float:
        return self.numbers[i - 1]

    def scaled(self, s: float) -> "Metric":
        return Metric(*(s * a for a in self.numbers))

    def gram(self, space: ReductiveSpace) -> np.ndarray:
        mods = space.module_of
        same = mods[:, None] == mods[None, :]
        weights = np.array(self.numbers)[mods - 1]
        return np.where(same, space.gram * weights[:, None], 0.0)

    def __str__(self) -> str:
        return "(" + ",".join(f"{a:g}" for a in self.numbers) + ")"


def metric_grid(values=GRID_VALUES) -> list[Metric]:
    return [Metric(*t) for t in itertools.product(values, repeat=3)]


# -- U ------------------------------------------------------------------------


def _pair_tensor(space: ReductiveSpace, p: int, q: int) -> np.ndarray:
    """T[k, i, j] = [e_i, e_j] for e_i in m_p, e_j in m_q, symmetrized in (i, j)."""
    Cm = space.structure_m
    mp, mq = space.module_mask(p), space.module_mask(q)
    sel = mp[:, None] & mq[None, :]
    T = np.where(sel[None], Cm, 0.0)
    return T + np.transpose(T, (0, 2, 1))


def _u_coefficients(g: Metric) -> tuple[float, float, float]:
    a1, a2, a3 = g.numbers
    return ((a3 - a2) / (2 * a1), (a3 - a1) / (2 * a2), (a2 - a1) / (2 * a3))


def _u_pieces(space: ReductiveSpace) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    cache = space.__dict__.get("_u_pieces")
    if cache is None:
        cache = (_pair_tensor(space, 2, 3), _pair_tensor(space, 1, 3), _pair_tensor(space, 1, 2))
        space.__dict__["_u_pieces"] = cache
    return cache


def u_tensor_closed(space: ReductiveSpace, g: Metric) -> np.ndarray:
    """U as a tensor U[k, i, j] from the closed form for three-module spaces."""
    c = _u_coefficients(g)
    return sum(ci * Ti for ci, Ti in zip(c, _u_pieces(space)))


def u_tensor_oracle(space: ReductiveSpace, g: Metric) -> np.ndarray:
    """U from its defining identity 2 g(U(X,Y),Z) = g(X,[Z,Y]_m) + g([Z,X]_m,Y)."""
    G = g.gram(space)
    Cm = space.structure_m
    # rhs[l, i, j] = g(e_i, [e_l, e_j]) + g([e_l, e_i], e_j)
    rhs = np.einsum("ik,klj->lij", G, Cm) + np.einsum("kli,kj->lij", Cm, G)
    n = space.dim_m
    U = np.linalg.solve(G, rhs.reshape(n, -1) / 2.0)
    return U.reshape(n, n, n)


def _same_space(X: MVector, Y: MVector) -> ReductiveSpace:
    if X.space is not Y.space:
        raise ValueError("vectors belong to different spaces")
    return X.space


def u_closed(X: MVector, Y: MVector, g: Metric) -> MVector:
    """Closed form of U in terms of module projections and ambient brackets."""
    S = _same_space(X, Y)
    c23, c13, c12 = _u_coefficients(g)
    P = {i: (project(X, i), project(Y, i)) for i in MODULES}

    def br(A, B):
        return bracket_m(A, B)[0]

    out = c23 * (br(P[2][0], P[3][1]) + br(P[2][1], P[3][0]))
    out = out + c13 * (br(P[1][0], P[3][1]) + br(P[1][1], P[3][0]))
    out = out + c12 * (br(P[1][0], P[2][1]) + br(P[1][1], P[2][0]))
    return MVector(S, out.coords)


def u_oracle(X: MVector, Y: MVector, g: Metric) -> MVector:
    """Solve the defining identity of U over the full m-basis of Z."""
    S = _same_space(X, Y)
    G = g.gram(S)
    x, y = X.coords, Y.coords
    rhs = np.empty(S.dim_m)
    for l in range(S.dim_m):
        Z = S.vector(np.eye(S.dim_m)[l])
        zy = bracket_m(Z, Y)[0].coords
        zx = bracket_m(Z, X)[0].coords
        rhs[l] = x @ G @ zy + zx @ G @ y
    return MVector(S, np.linalg.solve(G, rhs / 2.0))


def nabla(X: MVector, Y: MVector, g: Metric) -> MVector:
    """Levi-Civita connection at the origin: 1/2 [X,Y]_m + U(X,Y)."""
    S = _same_space(X, Y)
    b = kernels.bilinear_batch(S.structure_m, X.coords, Y.coords)[0]
    u = kernels.bilinear_batch(u_tensor_closed(S, g), X.coords, Y.coords)[0]
    return MVector(S, 0.5 * b + u)


def _nabla_f(f: FOperator, A: MVector, B: MVector, g: Metric) -> MVector:
    """(nabla_A f) B = nabla_A (fB) - f(nabla_A B)."""
    S = f.space
    fB = S.vector(f(B.coords))
    return nabla(A, fB, g) - S.vector(f(nabla(A, B, g).coords))


def composition_tensor(f: FOperator, X: MVector, Y: MVector, g: Metric) -> MVector:
    """T(X,Y) = 1/4 f( (nabla_{fX} f) fY - (nabla_{f^2 X} f) f^2 Y )."""
    S = f.space
    fX, fY = S.vector(f(X.coords)), S.vector(f(Y.coords))
    f2X, f2Y = S.vector(f(fX.coords)), S.vector(f(fY.coords))
    inner = _nabla_f(f, fX, fY, g) - _nabla_f(f, f2X, f2Y, g)
    return S.vector(0.25 * f(inner.coords))


# -- direct predicates ----------------------------------------------------------


def polarization_vectors(n: int) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """Rows e_i followed by e_i + e_j (i < j)."""
    pairs = list(itertools.combinations(range(n), 2))
    V = np.zeros((n + len(pairs), n))
    V[np.arange(n), np.arange(n)] = 1.0
    for r, (i, j) in enumerate(pairs, start=n):
        V[r, i] = V[r, j] = 1.0
    return V, pairs


def _condition(cls: str, F: np.ndarray, Cm: np.ndarray | None, U: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Left side of the class condition at each row of X (rows of the result).

    ``Cm`` may be None to drop the bracket term (used for the pieces that
    multiply the metric coefficients).
    """
    fX = X @ F.T
    f2X = fX @ F.T
    bb = kernels.bilinear_batch
    if cls == "Killf":
        out = bb(U, X, fX) - bb(U, X, X) @ F.T
        if Cm is not None:
            out = out + 0.5 * bb(Cm, X, fX)
    elif cls == "NKf":
        out = bb(U, fX, f2X) - bb(U, fX, fX) @ F.T
        if Cm is not None:
            out = out + 0.5 * bb(Cm, fX, f2X)
    elif cls == "G1f":
        inner = 2 * bb(U, fX, f2X) - bb(U, fX, fX) @ F.T + bb(U, f2X, f2X) @ F.T
        out = inner @ F.T
    else:
        raise ValueError(f"unknown class {cls!r}; expected one of {CLASSES}")
    return out


def _polarized(Q: np.ndarray, n: int, pairs) -> np.ndarray:
    """Per-row residuals: Q(e_i) and Q(e_i+e_j) - Q(e_i) - Q(e_j)."""
    R = Q[: n + len(pairs)].copy()
    if pairs:
        idx = np.array(pairs)
        R[n:] -= Q[idx[:, 0]] + Q[idx[:, 1]]
    return R


@dataclass
class DirectResult:
    cls: str
    holds: bool
    residual: float
    witness: list | None = None


class _ConditionCache:
    """Metric-independent pieces of each condition for one operator.

    U is linear in three metric coefficients, so every condition is
    Q0 + c23 Q23 + c13 Q13 + c12 Q12 evaluated on a fixed vector set.
    """

    def __init__(self, f: FOperator, n_random: int, seed: int):
        S = f.space
        n = S.dim_m
        V, pairs = polarization_vectors(n)
        rng = np.random.default_rng(seed)
        R = rng.standard_normal((n_random, n)) if n_random else np.zeros((0, n))
        self.n, self.pairs, self.n_pol = n, pairs, V.shape[0]
        self.vectors = np.vstack([V, R])
        self.pieces = {}
        zero = np.zeros((n, n, n))
        for cls in CLASSES:
            base = _condition(cls, f.matrix, S.structure_m, zero, self.vectors)
            parts = [_condition(cls, f.matrix, None, T, self.vectors) for T in _u_pieces(S)]
            self.pieces[cls] = np.stack([base] + parts)

    def evaluate(self, cls: str, g: Metric) -> np.ndarray:
        coef = np.concatenate([[1.0], _u_coefficients(g)])
        return np.tensordot(coef, self.pieces[cls], axes=1)


def _cache_for(f: FOperator, n_random: int, seed: int) -> _ConditionCache:
    store = f.__dict__.setdefault("_condition_cache", {})
    key = (n_random, seed)
    if key not in store:
        store[key] = _ConditionCache(f, n_random, seed)
    return store[key]


def predicate_direct(cls: str, f: FOperator, g: Metric, tol: float = EPS,
                     n_random: int = 50, seed: int = 0, u_route: str = "closed") -> DirectResult:
    """Decide a class condition "for all X in m" by polarization plus random X.

    ``u_route`` selects U from the closed form (default, via cached pieces),
    ``"closed-direct"`` (closed form recomputed without the cache) or
    ``"oracle"`` (solving the defining identity).
    """
    if cls not in CLASSES:
        raise ValueError(f"unknown class {cls!r}; expected one of {CLASSES}")
    S = f.space
    if u_route == "closed":
        cache = _cache_for(f, n_random, seed)
        Q = cache.evaluate(cls, g)
        n, pairs, vecs = cache.n, cache.pairs, cache.vectors
    else:
        n = S.dim_m
        V, pairs = polarization_vectors(n)
        rng = np.random.default_rng(seed)
        vecs = np.vstack([V, rng.standard_normal((n_random, n))])
        U = u_tensor_oracle(S, g) if u_route == "oracle" else u_tensor_closed(S, g)
        Q = _condition(cls, f.matrix, S.structure_m, U, vecs)
    pol = _polarized(Q, n, pairs)
    rand = Q[n + len(pairs):]
    residual = max(float(np.max(np.abs(pol), initial=0.0)), float(np.max(np.abs(rand), initial=0.0)))
    holds = residual < tol
    witness = None
    if not holds:
        row = int(np.argmax(np.max(np.abs(Q), axis=1)))
        witness = vecs[row].tolist()
    return DirectResult(cls, holds, residual, witness)


# -- theorem route ----------------------------------------------------------------


@dataclass(frozen=True)
class Region:
    """Set of characteristic numbers: all, empty, a_j = a_k, or the Killing ray
    a_i = (4/3) a_j = (4/3) a_k with i the kernel module."""

    kind: str  # "all" | "empty" | "equal" | "killing"
    modules: tuple = ()

    def contains(self, g: Metric, rtol: float = REL_TOL) -> bool:
        if self.kind == "all":
            return True
        if self.kind == "empty":
            return False
        if self.kind == "equal":
            j, k = self.modules
            return _close(g[j], g[k], rtol)
        if self.kind == "killing":
            i, j, k = self.modules
            return _close(g[j], g[k], rtol) and _close(g[i], KILLING_RATIO * g[j], rtol)
        raise ValueError(self.kind)

    def describe(self) -> str:
        """Region in the (a1,a2,a3) parameter style, e.g. "(4s,3s,3s), s>0"."""
        if self.kind == "all":
            return "all (a1,a2,a3), a_i>0"
        if self.kind == "empty":
            return "none"
        slots = ["", "", ""]
        if self.kind == "equal":
            j, k = self.modules
            i = ({1, 2, 3} - {j, k}).pop()
            # letters in order of first appearance: (s,t,t), (s,s,t), (s,t,s)
            first, second = ("s", "t") if j == 1 else ("t", "s")
            slots[j - 1] = slots[k - 1] = first
            slots[i - 1] = second
            return f"({','.join(slots)}), s,t>0"
        i, j, k = self.modules
        slots[i - 1] = "4s"
        slots[j - 1] = slots[k - 1] = "3s"
        return f"({','.join(slots)}), s>0"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "modules": list(self.modules), "description": self.describe()}

    @classmethod
    def from_dict(cls, d: dict) -> "Region":
        return cls(d["kind"], tuple(d["modules"]))


def _close(a: float, b: float, rtol: float) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b))


ALL, EMPTY = Region("all"), Region("empty")


def _bracket_pol(space: ReductiveSpace, F: np.ndarray, rows: np.ndarray) -> float:
    """max polarized residual of X -> [fX, f^2 X]_m over the basis vectors ``rows``."""
    n = space.dim_m
    idx = np.flatnonzero(rows)
    basis = np.eye(n)[idx]
    V, pairs = polarization_vectors(len(idx))
    X = V @ basis
    fX = X @ F.T
    Q = kernels.bilinear_batch(space.structure_m, fX, fX @ F.T)
    return float(np.max(np.abs(_polarized(Q, len(idx), pairs)), initial=0.0))


@dataclass
class TheoremConditions:
    shape: Shape
    nkf_bracket: float | None = None      # [fX, f^2X]_m = 0 for all X
    kill_bracket_zfz: float | None = None  # [Z, fZ]_m = 0 on m_j + m_k
    kill_bracket_yz: float | None = None   # [Y, fZ] + f[Y, Z] = 0


def theorem_conditions(f: FOperator, tol: float = EPS) -> TheoremConditions:
    S, F = f.space, f.matrix
    shape = classify_shape(f, tol)
    tc = TheoremConditions(shape)
    if shape.kind != "kernel":
        return tc
    i = shape.module
    jk = ~S.module_mask(i)
    tc.nkf_bracket = _bracket_pol(S, F, np.ones(S.dim_m, dtype=bool))
    # [Z, fZ]_m: polarize over the basis of m_j + m_k
    idx = np.flatnonzero(jk)
    V, pairs = polarization_vectors(len(idx))
    Z = V @ np.eye(S.dim_m)[idx]
    Q = kernels.bilinear_batch(S.structure_m, Z, Z @ F.T)
    tc.kill_bracket_zfz = float(np.max(np.abs(_polarized(Q, len(idx), pairs)), initial=0.0))
    # [Y, fZ] + f[Y, Z] over basis pairs, Y in m_i, Z in m_j + m_k
    Ys = np.eye(S.dim_m)[np.flatnonzero(~jk)]
    Zs = np.eye(S.dim_m)[idx]
    Yr = np.repeat(Ys, len(Zs), axis=0)
    Zr = np.tile(Zs, (len(Ys), 1))
    # [Y, fZ] is a full bracket; its h-part vanishes by the module relations
    term = kernels.bilinear_batch(S.structure_m, Yr, Zr @ F.T) + kernels.bilinear_batch(S.structure_m, Yr, Zr) @ F.T
    hpart = kernels.bilinear_batch(S.structure_h, Yr, Zr @ F.T) if S.dims[0] else np.zeros(1)
    tc.kill_bracket_yz = max(float(np.max(np.abs(term), initial=0.0)), float(np.max(np.abs(hpart), initial=0.0)))
    return tc


@dataclass
class ClassVerdict:
    verdict: str  # "always" | "never" | "region"
    region: Region
    at_metric: bool | None = None
    residual: float | None = None
    witness: list | None = None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "region": self.region.to_dict(),
            "at_metric": self.at_metric,
            "residual": self.residual,
            "witness": self.witness,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassVerdict":
        return cls(d["verdict"], Region.from_dict(d["region"]), d.get("at_metric"),
                   d.get("residual"), d.get("witness"))


def _verdict_of(region: Region) -> str:
    return {"all": "always", "empty": "never"}.get(region.kind, "region")


@dataclass
class ClassReport:
    space: str
    structure: str
    shape: str
    route: str
    tolerance: float
    invariance_residual: float
    classes: dict[str, ClassVerdict]
    metric: tuple | None = None
    conditions: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    @property
    def invariant(self) -> bool:
        return self.invariance_residual < self.tolerance

    def chain_ok(self) -> bool:
        """Kill f inside NKf inside G1f, both for regions and the metric verdicts."""
        order = [self.classes[c] for c in ("Killf", "NKf", "G1f")]
        for lo, hi in zip(order, order[1:]):
            if lo.at_metric is True and hi.at_metric is False:
                return False
            if lo.region.kind == "all" and hi.region.kind != "all":
                return False
            if hi.region.kind == "empty" and lo.region.kind != "empty":
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "space": self.space,
            "structure": self.structure,
            "shape": self.shape,
            "route": self.route,
            "tolerance": self.tolerance,
            "invariance_residual": self.invariance_residual,
            "metric": list(self.metric) if self.metric is not None else None,
            "classes": {c: v.to_dict() for c, v in self.classes.items()},
            "conditions": self.conditions,
            "params": self.params,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassReport":
        return cls(
            space=d["space"], structure=d["structure"], shape=d["shape"], route=d["route"],
            tolerance=d["tolerance"], invariance_residual=d["invariance_residual"],
            classes={c: ClassVerdict.from_dict(v) for c, v in d["classes"].items()},
            metric=tuple(d["metric"]) if d.get("metric") is not None else None,
            conditions=d.get("conditions", {}), params=d.get("params", {}),
        )


class UnsupportedShape(ValueError):
    pass


def theorem_regions(f: FOperator, tol: float = EPS) -> tuple[dict[str, Region], TheoremConditions]:
    """Class regions from the image/kernel dichotomy."""
    tc = theorem_conditions(f, tol)
    shape = tc.shape
    if shape.kind == "image":
        return {"G1f": ALL, "NKf": ALL, "Killf": EMPTY}, tc
    if shape.kind != "kernel":
        raise UnsupportedShape(f"{f.name}: shape {shape} is outside the image/kernel dichotomy")
    i = shape.module
    j, k = [m for m in MODULES if m != i]
    regions = {"G1f": ALL}
    if tc.nkf_bracket < tol:
        regions["NKf"] = Region("equal", (j, k))
        if tc.kill_bracket_zfz < tol and tc.kill_bracket_yz < tol:
            regions["Killf"] = Region("killing", (i, j, k))
        else:
            regions["Killf"] = EMPTY
    else:
        regions["NKf"] = EMPTY
        regions["Killf"] = EMPTY
    return regions, tc


def theorem_classify(f: FOperator, metric: Metric | None = None, tol: float = EPS) -> ClassReport:
    regions, tc = theorem_regions(f, tol)
    classes = {}
    for c in CLASSES:
        r = regions[c]
        classes[c] = ClassVerdict(_verdict_of(r), r, r.contains(metric) if metric is not None else None)
    conditions = {k: v for k, v in (("nkf_bracket", tc.nkf_bracket),
                                    ("kill_bracket_zfz", tc.kill_bracket_zfz),
                                    ("kill_bracket_yz", tc.kill_bracket_yz)) if v is not None}
    return ClassReport(
        space=f.space.label, structure=f.name, shape=str(tc.shape), route="theorem",
        tolerance=tol, invariance_residual=check_invariance(f), classes=classes,
        metric=metric.numbers if metric is not None else None, conditions=conditions,
        params={k: _jsonable(v) for k, v in f.params.items()},
    )


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, tuple):
        return list(v)
    return v


def classify(f: FOperator, metric: Metric, tol: float = EPS) -> ClassReport:
    """Both routes at one metric; route tag is "both-agree" when they match."""
    report = theorem_classify(f, metric, tol)
    agree = True
    for c in CLASSES:
        d = predicate_direct(c, f, metric, tol)
        v = report.classes[c]
        if d.holds != v.at_metric:
            agree = False
        v.residual = d.residual
        v.witness = d.witness
    report.route = "both-agree" if agree else "disagree"
    return report


@dataclass
class Disagreement:
    metric: tuple
    cls: str
    direct: bool
    theorem: bool
    residual: float


@dataclass
class AgreementReport:
    space: str
    structure: str
    points: int
    disagreements: list[Disagreement]
    chain_violations: list[tuple]
    direct_table: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.disagreements and not self.chain_violations

    @property
    def first(self) -> Disagreement | None:
        return self.disagreements[0] if self.disagreements else None


def direct_sweep(f: FOperator, grid, tol: float = EPS) -> dict[tuple, dict[str, DirectResult]]:
    """Direct verdicts for every metric of ``grid`` (ordered as given)."""
    return {g.numbers: {c: predicate_direct(c, f, g, tol) for c in CLASSES} for g in grid}


def cross_validate(f: FOperator, grid=None, tol: float = EPS) -> AgreementReport:
    """Compare the direct predicates with theorem-region membership on a grid."""
    grid = metric_grid() if grid is None else list(grid)
    regions, _ = theorem_regions(f, tol)
    table = direct_sweep(f, grid, tol)
    bad, chain = [], []
    for g in grid:
        res = table[g.numbers]
        for c in CLASSES:
            th = regions[c].contains(g)
            if res[c].holds != th:
                bad.append(Disagreement(g.numbers, c, res[c].holds, th, res[c].residual))
        if (res["Killf"].holds and not res["NKf"].holds) or (res["NKf"].holds and not res["G1f"].holds):
            chain.append(g.numbers)
    return AgreementReport(f.space.label, f.name, len(grid), bad, chain, table)
