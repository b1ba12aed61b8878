"""Reductive decompositions g = h + m1 + m2 + m3 inside matrix Lie algebras.

A :class:`ReductiveSpace` holds explicit bases; everything else (Gram matrix
of the normalized form g0, structure constants of the bracket restricted to
m, the isotropy action of h on m) is derived once and cached.

Vectors of m are handled as real coordinate arrays in the concatenated basis
m1 | m2 | m3. :class:`MVector` wraps such an array together with its space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from fstruct.scalars import EPS, Mat, bracket, trace_form

MODULES = (1, 2, 3)


class DecompositionError(ValueError):
    """A matrix does not decompose along h + m within tolerance."""


class ReductiveSpace:
    """Bases of h and of the three modules of m, plus the scale of g0."""

    def __init__(
        self,
        name: str,
        ring: str,
        size: int,
        h_basis: Sequence[Mat],
        m_basis: Sequence[Sequence[Mat]],
        g0_scale: float,
        params: tuple = (),
    ):
        if len(m_basis) != 3:
            raise ValueError("exactly three modules are required")
        self.name = name
        self.ring = ring
        self.size = int(size)
        self.h_basis = tuple(h_basis)
        self.m_basis = tuple(tuple(b) for b in m_basis)
        self.g0_scale = float(g0_scale)
        self.params = tuple(params)
        for M in self.h_basis + self.m_flat:
            if M.ring != ring or M.shape != (self.size, self.size):
                raise ValueError(f"basis element {M!r} does not match ring {ring} / size {size}")

    def __repr__(self) -> str:
        return f"ReductiveSpace({self.label}, dims={self.dims})"

    @property
    def label(self) -> str:
        if self.params:
            return f"{self.name}:{','.join(str(p) for p in self.params)}"
        return self.name

    @property
    def m_flat(self) -> tuple[Mat, ...]:
        return tuple(M for block in self.m_basis for M in block)

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return (len(self.h_basis),) + tuple(len(b) for b in self.m_basis)

    @property
    def dim_m(self) -> int:
        return sum(self.dims[1:])

    @cached_property
    def slices(self) -> dict[int, slice]:
        out, start = {}, 0
        for i, block in zip(MODULES, self.m_basis):
            out[i] = slice(start, start + len(block))
            start += len(block)
        return out

    @cached_property
    def module_of(self) -> np.ndarray:
        """Module index (1, 2 or 3) of each m-coordinate."""
        return np.concatenate([np.full(len(b), i) for i, b in zip(MODULES, self.m_basis)])

    def module_mask(self, i: int) -> np.ndarray:
        _check_index(i)
        return self.module_of == i

    # -- inner products -------------------------------------------------

    def g0(self, A: Mat, B: Mat) -> float:
        return trace_form(A, B, self.g0_scale)

    @cached_property
    def full_gram(self) -> np.ndarray:
        """g0 on the basis h | m (used for orthogonality and definiteness)."""
        basis = self.h_basis + self.m_flat
        n = len(basis)
        G = np.empty((n, n))
        for a in range(n):
            for b in range(a, n):
                G[a, b] = G[b, a] = self.g0(basis[a], basis[b])
        return G

    @property
    def gram(self) -> np.ndarray:
        """g0 Gram matrix on the m-basis."""
        k = self.dims[0]
        return self.full_gram[k:, k:]

    # -- coordinates ----------------------------------------------------

    @cached_property
    def _basis_rows(self) -> np.ndarray:
        return np.array([M.flat() for M in self.h_basis + self.m_flat])

    @cached_property
    def _solver(self) -> np.ndarray:
        return np.linalg.pinv(self._basis_rows.T)

    @cached_property
    def basis_rank(self) -> int:
        s = np.linalg.svd(self._basis_rows, compute_uv=False)
        return int(np.sum(s > EPS * max(1.0, s[0])))

    def decompose(self, M: Mat) -> tuple[np.ndarray, np.ndarray, float]:
        """Coordinates of ``M`` along h and m, and the reconstruction residual."""
        v = M.flat()
        c = self._solver @ v
        resid = float(np.max(np.abs(self._basis_rows.T @ c - v))) if v.size else 0.0
        k = self.dims[0]
        return c[:k], c[k:], resid

    def embed(self, coords) -> Mat:
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.dim_m,):
            raise ValueError(f"expected {self.dim_m} coordinates, got shape {coords.shape}")
        data = np.tensordot(coords, np.array([M.data for M in self.m_flat]), axes=1)
        return Mat(self.ring, data)

    def embed_h(self, coords) -> Mat:
        coords = np.asarray(coords, dtype=float)
        if not self.h_basis:
            return Mat.zeros(self.ring, self.size)
        data = np.tensordot(coords, np.array([M.data for M in self.h_basis]), axes=1)
        return Mat(self.ring, data)

    def vector(self, coords) -> "MVector":
        return MVector(self, np.asarray(coords, dtype=float))

    def module_vector(self, i: int, coords) -> "MVector":
        """Vector of m supported on module ``i`` with the given local coordinates."""
        _check_index(i)
        full = np.zeros(self.dim_m)
        full[self.slices[i]] = coords
        return self.vector(full)

    # -- structure constants --------------------------------------------

    @cached_property
    def _structure(self):
        n, k = self.dim_m, self.dims[0]
        m = self.m_flat
        Cm = np.zeros((n, n, n))
        Ch = np.zeros((k, n, n))
        resid = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                hc, mc, r = self.decompose(bracket(m[i], m[j]))
                Cm[:, i, j], Cm[:, j, i] = mc, -mc
                Ch[:, i, j], Ch[:, j, i] = hc, -hc
                resid = max(resid, r)
        Ad = np.zeros((k, n, n))
        Adh = np.zeros((k, k, n))
        for w, W in enumerate(self.h_basis):
            for i in range(n):
                hc, mc, r = self.decompose(bracket(W, m[i]))
                Ad[w, :, i] = mc
                Adh[w, :, i] = hc
                resid = max(resid, r)
        for arr in (Cm, Ch, Ad, Adh):
            arr.setflags(write=False)
        return Cm, Ch, Ad, Adh, resid

    @property
    def structure_m(self) -> np.ndarray:
        """``C[k, i, j]``: m-coordinate k of [e_i, e_j]."""
        return self._structure[0]

    @property
    def structure_h(self) -> np.ndarray:
        """``C[w, i, j]``: h-coordinate w of [e_i, e_j]."""
        return self._structure[1]

    @property
    def ad_h(self) -> np.ndarray:
        """``A[w, k, i]``: m-coordinate k of [W_w, e_i]."""
        return self._structure[2]

    @property
    def ad_h_leak(self) -> np.ndarray:
        """h-coordinates of [W_w, e_i]; nonzero means m is not ad(h)-stable."""
        return self._structure[3]

    @property
    def structure_residual(self) -> float:
        return self._structure[4]


def _check_index(i: int) -> None:
    if i not in MODULES:
        raise IndexError(f"module index must be 1, 2 or 3, got {i!r}")


@dataclass(frozen=True, eq=False)
class MVector:
    space: ReductiveSpace
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        if c.shape != (self.space.dim_m,):
            raise ValueError(f"expected {self.space.dim_m} coordinates, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def matrix(self) -> Mat:
        return self.space.embed(self.coords)

    def _same(self, other: "MVector") -> None:
        if other.space is not self.space:
            raise ValueError("vectors belong to different spaces")

    def __add__(self, other: "MVector") -> "MVector":
        self._same(other)
        return MVector(self.space, self.coords + other.coords)

    def __sub__(self, other: "MVector") -> "MVector":
        self._same(other)
        return MVector(self.space, self.coords - other.coords)

    def __mul__(self, s: float) -> "MVector":
        return MVector(self.space, self.coords * float(s))

    __rmul__ = __mul__

    def __neg__(self) -> "MVector":
        return MVector(self.space, -self.coords)

    def norm_max(self) -> float:
        return float(np.max(np.abs(self.coords))) if self.coords.size else 0.0

    def allclose(self, other: "MVector", tol: float = EPS) -> bool:
        self._same(other)
        return bool(np.max(np.abs(self.coords - other.coords)) < tol)


def project(X: MVector, i: int) -> MVector:
    """Component of ``X`` in module ``i``."""
    _check_index(i)
    return MVector(X.space, np.where(X.space.module_mask(i), X.coords, 0.0))


def bracket_m(X: MVector, Y: MVector, tol: float = EPS) -> tuple[MVector, Mat]:
    """Split the ambient bracket [X, Y] into its m-part and h-part."""
    if X.space is not Y.space:
        raise ValueError("vectors belong to different spaces")
    S = X.space
    full = bracket(X.matrix(), Y.matrix())
    hc, mc, resid = S.decompose(full)
    if resid >= tol:
        raise DecompositionError(
            f"[X, Y] leaves h + m by {resid:.3g}; basis is not reductive or is corrupted"
        )
    return MVector(S, mc), S.embed_h(hc)


# -- equivariant maps -------------------------------------------------------


def _null_basis(M: np.ndarray, ncols: int, tol: float) -> np.ndarray:
    """Orthonormal basis (rows) of the null space of ``M``."""
    if M.size == 0:
        return np.eye(ncols)
    _, s, vt = np.linalg.svd(M)
    cutoff = tol * max(1.0, s[0] if s.size else 1.0)
    rank = int(np.sum(s > cutoff))
    return vt[rank:]


def _module_action(space: ReductiveSpace, i: int) -> np.ndarray:
    """ad(W) restricted to module i, stacked over the h-basis: shape (k, d, d)."""
    sl = space.slices[i]
    return space.ad_h[:, sl, sl]


def commutant_basis(space: ReductiveSpace, i: int, j: int, tol: float = EPS) -> np.ndarray:
    """Basis of real-linear L: m_i -> m_j with L ad(W) = ad(W) L for all W in h.

    Returned as an array of shape (r, dim m_j, dim m_i) in module coordinates.
    """
    _check_index(i)
    _check_index(j)
    di, dj = space.dims[i], space.dims[j]
    if di * dj == 0:
        return np.zeros((0, dj, di))
    Ai, Aj = _module_action(space, i), _module_action(space, j)
    # row-major vec: vec(L A) = (I kron A^T) vec L, vec(A L) = (A kron I) vec L
    rows = [np.kron(np.eye(dj), a_i.T) - np.kron(a_j, np.eye(di)) for a_i, a_j in zip(Ai, Aj)]
    M = np.vstack(rows) if rows else np.zeros((0, di * dj))
    null = _null_basis(M, di * dj, tol)
    return null.reshape(-1, dj, di)


def equivariant_maps(space: ReductiveSpace, i: int, j: int, tol: float = EPS) -> int:
    """Dimension of the space of ad(h)-equivariant linear maps m_i -> m_j."""
    return int(commutant_basis(space, i, j, tol).shape[0])


@dataclass
class IrreducibilityProbe:
    module: int
    commutant_dim: int
    symmetric_dim: int
    invariant_subspace_dims: tuple[int, ...]

    @property
    def irreducible(self) -> bool:
        return self.symmetric_dim == 1


def irreducibility_probe(space: ReductiveSpace, i: int, tol: float = EPS, seed: int = 0) -> IrreducibilityProbe:
    """Self-adjoint intertwiners of module ``i`` in g0-orthonormal coordinates.

    For an orthogonal representation the module is irreducible exactly when the
    only self-adjoint intertwiners are scalars. A random self-adjoint
    intertwiner is diagonalized; its eigenspaces are invariant subspaces.
    """
    sl = space.slices[i]
    G = space.gram[sl, sl]
    d = G.shape[0]
    comm = commutant_basis(space, i, i, tol)
    try:
        R = np.linalg.cholesky(G)  # G = R R^T; orthonormal coords y = R^T x
    except np.linalg.LinAlgError:
        return IrreducibilityProbe(i, comm.shape[0], -1, ())
    Rt_inv = np.linalg.inv(R.T)
    sym = []
    for L in comm:
        Lt = R.T @ L @ Rt_inv
        sym.append(((Lt + Lt.T) / 2).reshape(-1))
    sym = np.array(sym) if sym else np.zeros((0, d * d))
    if sym.size:
        s = np.linalg.svd(sym, compute_uv=False)
        sym_dim = int(np.sum(s > tol * max(1.0, s[0])))
    else:
        sym_dim = 0
    rng = np.random.default_rng(seed)
    S = (rng.standard_normal(len(sym)) @ sym).reshape(d, d) if len(sym) else np.zeros((d, d))
    w = np.linalg.eigvalsh((S + S.T) / 2)
    clusters, start = [], 0
    for k in range(1, d + 1):
        if k == d or abs(w[k] - w[k - 1]) > 1e-6 * max(1.0, np.max(np.abs(w))):
            clusters.append(k - start)
            start = k
    return IrreducibilityProbe(i, comm.shape[0], sym_dim, tuple(clusters))


# -- decomposition audit ------------------------------------------------------


@dataclass
class Clause:
    name: str
    passed: bool
    residual: float
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "residual": self.residual, "detail": self.detail}

    @classmethod
    def from_dict(cls, d: dict) -> "Clause":
        return cls(d["name"], d["passed"], d["residual"], d.get("detail", {}))


@dataclass
class Assumption1Report:
    space: str
    dims: tuple
    tolerance: float
    clauses: list[Clause]
    commutant_dims: dict
    equivariant_dims: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    def clause(self, name: str) -> Clause:
        for c in self.clauses:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def failed_clauses(self) -> list[str]:
        return [c.name for c in self.clauses if not c.passed]

    def to_dict(self) -> dict:
        return {
            "space": self.space,
            "dims": list(self.dims),
            "tolerance": self.tolerance,
            "passed": self.passed,
            "clauses": [c.to_dict() for c in self.clauses],
            "commutant_dims": {str(k): v for k, v in self.commutant_dims.items()},
            "equivariant_dims": {f"{i}->{j}": v for (i, j), v in self.equivariant_dims.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Assumption1Report":
        equiv = {}
        for key, v in d["equivariant_dims"].items():
            i, j = key.split("->")
            equiv[(int(i), int(j))] = v
        return cls(
            space=d["space"], dims=tuple(d["dims"]), tolerance=d["tolerance"],
            clauses=[Clause.from_dict(c) for c in d["clauses"]],
            commutant_dims={int(k): v for k, v in d["commutant_dims"].items()},
            equivariant_dims=equiv,
        )


def _nxt(i: int, k: int) -> int:
    return (i - 1 + k) % 3 + 1


def verify_assumption1(space: ReductiveSpace, tol: float = EPS) -> Assumption1Report:
    """Audit the decomposition: algebra membership, definiteness, orthogonality,
    invariance, irreducibility/inequivalence, and the bracket relations."""
    S = space
    clauses = []
    mask = {i: S.module_mask(i) for i in MODULES}

    # basis sanity: elements lie in the algebra and are independent
    skew = max(((M + M.H).max_abs() for M in S.h_basis + S.m_flat), default=0.0)
    n_basis = len(S.h_basis) + S.dim_m
    clauses.append(Clause(
        "basis", skew < tol and S.basis_rank == n_basis and S.structure_residual < tol,
        max(skew, S.structure_residual),
        {"skew_residual": skew, "rank": S.basis_rank, "size": n_basis,
         "bracket_closure_residual": S.structure_residual},
    ))

    # A1 (necessary condition only): g0 positive definite on the basis
    eig = np.linalg.eigvalsh(S.full_gram) if n_basis else np.array([1.0])
    min_eig = float(eig[0])
    clauses.append(Clause("A1", min_eig > tol, max(0.0, -min_eig), {"min_gram_eigenvalue": min_eig}))

    # A2: orthogonality, invariance, irreducibility, inequivalence
    k = S.dims[0]
    G = S.full_gram
    orth = 0.0
    for i in MODULES:
        rows = k + np.flatnonzero(mask[i])
        others = np.concatenate([np.arange(k)] + [k + np.flatnonzero(mask[j]) for j in MODULES if j != i])
        if rows.size and others.size:
            orth = max(orth, float(np.max(np.abs(G[np.ix_(rows, others)]))))
    inv = 0.0
    if k:
        inv = float(np.max(np.abs(S.ad_h_leak)))
        for i in MODULES:
            cols = mask[i]
            if cols.any() and (~mask[i]).any():
                inv = max(inv, float(np.max(np.abs(S.ad_h[:, ~mask[i]][:, :, cols]))))
    probes = {i: irreducibility_probe(S, i, tol) for i in MODULES}
    commutant_dims = {i: probes[i].commutant_dim for i in MODULES}
    equiv = {(i, j): equivariant_maps(S, i, j, tol) for i in MODULES for j in MODULES if i != j}
    empty = [i for i in MODULES if S.dims[i] == 0]
    reducible = [i for i in MODULES if not probes[i].irreducible]
    equivalent = sorted({tuple(sorted(p)) for p, v in equiv.items() if v > 0})
    a2_pass = orth < tol and inv < tol and not reducible and not equivalent and not empty
    clauses.append(Clause("A2", a2_pass, max(orth, inv), {
        "orthogonality_residual": orth,
        "invariance_residual": inv,
        "empty_modules": empty,
        "reducible_modules": reducible,
        "invariant_subspace_dims": {str(i): list(probes[i].invariant_subspace_dims) for i in MODULES},
        "symmetric_commutant_dims": {str(i): probes[i].symmetric_dim for i in MODULES},
        "equivalent_pairs": [list(p) for p in equivalent],
    }))

    # A3: 0 != [m_i, m_{i+1}] subset m_{i+2}
    Cm, Ch = S.structure_m, S.structure_h
    a3_resid, a3_ok, witnesses = 0.0, True, {}
    for i in MODULES:
        j, l = _nxt(i, 1), _nxt(i, 2)
        rows_i, rows_j = np.flatnonzero(mask[i]), np.flatnonzero(mask[j])
        if rows_i.size == 0 or rows_j.size == 0:
            a3_ok = False
            witnesses[f"{i},{j}"] = None
            continue
        block_m = Cm[:, rows_i][:, :, rows_j]
        block_h = Ch[:, rows_i][:, :, rows_j]
        outside = block_m[~mask[l]]
        leak = max(float(np.max(np.abs(outside))) if outside.size else 0.0,
                   float(np.max(np.abs(block_h))) if block_h.size else 0.0)
        a3_resid = max(a3_resid, leak)
        size = np.max(np.abs(block_m[mask[l]]), axis=0) if mask[l].any() else np.zeros((rows_i.size, rows_j.size))
        a, b = np.unravel_index(int(np.argmax(size)), size.shape)
        strength = float(size[a, b])
        witnesses[f"{i},{j}"] = {"pair": [int(rows_i[a]), int(rows_j[b])], "norm": strength} if strength > tol else None
        if strength <= tol:
            a3_ok = False
    clauses.append(Clause("A3", a3_ok and a3_resid < tol, a3_resid, {"witnesses": witnesses}))

    # A4: [m_i, m_i] subset h
    a4 = 0.0
    for i in MODULES:
        rows = np.flatnonzero(mask[i])
        if rows.size:
            a4 = max(a4, float(np.max(np.abs(Cm[:, rows][:, :, rows]))))
    clauses.append(Clause("A4", a4 < tol, a4))

    return Assumption1Report(S.label, S.dims, tol, clauses, commutant_dims, equiv)
