"""Invariant f-structures as endomorphisms of m in module coordinates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from fstruct.scalars import EPS, Scalar, left_mult_matrix
from fstruct.spaces import MODULES, ReductiveSpace


@dataclass(frozen=True)
class Shape:
    kind: str  # "image" | "kernel" | "almost_complex" | "other"
    module: int | None = None

    def __str__(self) -> str:
        if self.kind in ("image", "kernel"):
            return f"{self.kind}_is({self.module})"
        return self.kind

    @classmethod
    def parse(cls, text: str) -> "Shape":
        text = text.strip()
        for kind in ("image", "kernel"):
            if text.startswith(f"{kind}_is(") and text.endswith(")"):
                return cls(kind, int(text[len(kind) + 4:-1]))
        if text in ("almost_complex", "other"):
            return cls(text)
        raise ValueError(f"unknown shape tag {text!r}")


class FOperator:
    """Linear operator on m given by its matrix on m-coordinates."""

    def __init__(self, space: ReductiveSpace, matrix, name: str = "f", params: dict | None = None):
        F = np.array(matrix, dtype=float)
        if F.shape != (space.dim_m, space.dim_m):
            raise ValueError(f"operator must be {space.dim_m}x{space.dim_m}, got {F.shape}")
        F.setflags(write=False)
        self.space = space
        self.matrix = F
        self.name = name
        self.params = dict(params or {})

    def __repr__(self) -> str:
        return f"FOperator({self.name} on {self.space.label})"

    def __call__(self, coords) -> np.ndarray:
        return self.matrix @ np.asarray(coords, dtype=float)

    def scaled(self, s: float) -> "FOperator":
        return FOperator(self.space, s * self.matrix, f"{s:g}*{self.name}", self.params)


def check_f_cubed(f: FOperator) -> float:
    F = f.matrix
    return float(np.max(np.abs(F @ F @ F + F))) if F.size else 0.0


def check_invariance(f: FOperator) -> float:
    """max over W in h, basis X of |f([W,X]_m) - [W,fX]_m| (infinitesimal Ad(H))."""
    A = f.space.ad_h
    if A.shape[0] == 0 or f.matrix.size == 0:
        return 0.0
    F = f.matrix
    return float(np.max(np.abs(np.einsum("kl,wli->wki", F, A) - np.einsum("wkl,li->wki", A, F))))


def check_compatibility(f: FOperator, g) -> float:
    """max over basis pairs of |g(fX, Y) + g(X, fY)|."""
    G = g.gram(f.space)
    F = f.matrix
    return float(np.max(np.abs(F.T @ G + G @ F))) if F.size else 0.0


def _rank(M: np.ndarray, tol: float) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def classify_shape(f: FOperator, tol: float = EPS) -> Shape:
    """Image/kernel alignment with the modules, decided by singular values."""
    S, F = f.space, f.matrix
    n = S.dim_m
    r = _rank(F, tol)
    if r == 0:
        return Shape("other")
    if r == n:
        return Shape("almost_complex")
    scale = float(np.max(np.abs(F)))
    for i in MODULES:
        mask = S.module_mask(i)
        # image = m_i: rank matches and every row outside m_i vanishes
        if r == mask.sum() and np.max(np.abs(F[~mask]), initial=0.0) <= tol * scale:
            return Shape("image", i)
        # kernel = m_i: columns of m_i vanish and nothing else is killed
        if r == n - mask.sum() and np.max(np.abs(F[:, mask]), initial=0.0) <= tol * scale:
            return Shape("kernel", i)
    return Shape("other")


def rotation_block(dim: int, pairs) -> np.ndarray:
    """Complex structure from a pairing: each ``(p, q, s)`` sends the
    coordinates (x_p, x_q) to (s x_q, -s x_p)."""
    J = np.zeros((dim, dim))
    seen = []
    for item in pairs:
        p, q = int(item[0]), int(item[1])
        s = float(item[2]) if len(item) > 2 else 1.0
        if abs(abs(s) - 1.0) > EPS:
            raise ValueError(f"pairing sign must be +-1, got {s}")
        if p == q or not (0 <= p < dim and 0 <= q < dim):
            raise ValueError(f"bad pairing ({p}, {q}) for a {dim}-dimensional module")
        J[p, q], J[q, p] = s, -s
        seen += [p, q]
    if sorted(seen) != list(range(dim)):
        raise ValueError(f"pairing must cover each of the {dim} coordinates exactly once")
    return J


def quaternion_block(dim: int, h) -> np.ndarray:
    """Left multiplication by a unit pure quaternion on consecutive 4-blocks."""
    comps = np.asarray(h.comps if isinstance(h, Scalar) else h, dtype=float)
    if comps.size == 3:
        comps = np.concatenate([[0.0], comps])
    if comps.size != 4:
        raise ValueError(f"quaternion needs 3 or 4 components, got {comps.size}")
    if abs(comps[0]) > EPS:
        raise ValueError(f"quaternion {tuple(comps)} is not pure imaginary")
    if abs(np.linalg.norm(comps) - 1.0) > EPS:
        raise ValueError(f"quaternion {tuple(comps)} is not a unit")
    if dim % 4:
        raise ValueError(f"module of dimension {dim} is not a sum of quaternion slots")
    L = left_mult_matrix(comps)
    return np.kron(np.eye(dim // 4), L)


def block_f(space: ReductiveSpace, image_modules, rotation_spec: Mapping | None = None,
            name: str = "f", params: dict | None = None) -> FOperator:
    """Block-diagonal operator, zero outside ``image_modules``.

    ``rotation_spec[i]`` is a list of ``(p, q, sign)`` pairings, a quaternion
    (Scalar or 3/4 components), or an explicit square block.
    """
    rotation_spec = dict(rotation_spec or {})
    F = np.zeros((space.dim_m, space.dim_m))
    for i in sorted(set(image_modules)):
        if i not in MODULES:
            raise IndexError(f"module index must be 1, 2 or 3, got {i!r}")
        d = space.dims[i]
        if i not in rotation_spec:
            raise ValueError(f"no complex structure given for module {i}")
        spec = rotation_spec[i]
        if d % 2:
            raise ValueError(f"module {i} has odd dimension {d}; no complex structure exists")
        if isinstance(spec, Scalar) or (isinstance(spec, (tuple, list)) and len(spec) in (3, 4)
                                        and all(np.isscalar(c) for c in spec)):
            block = quaternion_block(d, spec)
        else:
            arr = np.asarray(spec, dtype=float)
            if arr.ndim == 2 and arr.shape == (d, d):
                block = arr
            else:
                block = rotation_block(d, spec)
        sl = space.slices[i]
        F[sl, sl] = block
    return FOperator(space, F, name, params)
