"""Dense matrices over R, C and H stored componentwise over the reals.

Every matrix is an ``(rows, cols, d)`` float array where ``d`` is 1, 2 or 4
(components w, x, y, z with units 1, i, j, k). Multiplication goes through a
structure tensor for the division ring so one kernel serves all three.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from fstruct import kernels

EPS = 1e-9

RING_DIM = {"R": 1, "C": 2, "H": 4}


def _mult_table(ring: str) -> np.ndarray:
    d = RING_DIM[ring]
    t = np.zeros((d, d, d))
    if ring == "R":
        t[0, 0, 0] = 1.0
    elif ring == "C":
        t[0, 0, 0] = t[0, 1, 1] = t[1, 0, 1] = 1.0
        t[1, 1, 0] = -1.0
    else:
        # e_a e_b = sign * e_c for the Hamilton units
        rules = {
            (1, 1): (-1, 0), (2, 2): (-1, 0), (3, 3): (-1, 0),
            (1, 2): (1, 3), (2, 1): (-1, 3),
            (2, 3): (1, 1), (3, 2): (-1, 1),
            (3, 1): (1, 2), (1, 3): (-1, 2),
        }
        for a in range(4):
            t[0, a, a] = t[a, 0, a] = 1.0
        for (a, b), (s, c) in rules.items():
            t[a, b, c] = s
    t.setflags(write=False)
    return t


MULT_TABLE = {r: _mult_table(r) for r in RING_DIM}
CONJ_SIGN = {r: np.array([1.0, -1.0, -1.0, -1.0][: RING_DIM[r]]) for r in RING_DIM}


class RingMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Scalar:
    ring: str
    comps: tuple

    def __post_init__(self):
        if self.ring not in RING_DIM:
            raise ValueError(f"unknown ring {self.ring!r}")
        if len(self.comps) != RING_DIM[self.ring]:
            raise ValueError(f"{self.ring} scalar needs {RING_DIM[self.ring]} components")
        object.__setattr__(self, "comps", tuple(float(c) for c in self.comps))

    @classmethod
    def quat(cls, w=0.0, x=0.0, y=0.0, z=0.0) -> "Scalar":
        return cls("H", (w, x, y, z))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.comps)

    def conj(self) -> "Scalar":
        return Scalar(self.ring, tuple(self.array * CONJ_SIGN[self.ring]))

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.array, self.array)))

    @property
    def real(self) -> float:
        return self.comps[0]

    def __mul__(self, other: "Scalar") -> "Scalar":
        if not isinstance(other, Scalar):
            return Scalar(self.ring, tuple(self.array * float(other)))
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring} * {other.ring}")
        prod = np.einsum("a,b,abc->c", self.array, other.array, MULT_TABLE[self.ring])
        return Scalar(self.ring, tuple(prod))

    __rmul__ = __mul__

    def __add__(self, other: "Scalar") -> "Scalar":
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring} + {other.ring}")
        return Scalar(self.ring, tuple(self.array + other.array))

    def __neg__(self) -> "Scalar":
        return Scalar(self.ring, tuple(-self.array))

    def __sub__(self, other: "Scalar") -> "Scalar":
        return self + (-other)

    def isclose(self, other: "Scalar", tol: float = EPS) -> bool:
        return self.ring == other.ring and np.max(np.abs(self.array - other.array)) < tol


def quat_mul(p: Scalar, q: Scalar) -> Scalar:
    """Hamilton product; both operands must be quaternions."""
    if p.ring != "H" or q.ring != "H":
        raise RingMismatch(f"quat_mul needs H operands, got {p.ring} and {q.ring}")
    return p * q


def left_mult_matrix(h) -> np.ndarray:
    """Real 4x4 matrix of x -> h*x on quaternion components."""
    h = np.asarray(h.comps if isinstance(h, Scalar) else h, dtype=float)
    return np.einsum("a,abc->cb", h, MULT_TABLE["H"])


class Mat:
    """Immutable dense matrix with entries in R, C or H."""

    __slots__ = ("ring", "data")

    def __init__(self, ring: str, data):
        if ring not in RING_DIM:
            raise ValueError(f"unknown ring {ring!r}")
        arr = np.array(data, dtype=np.float64)
        d = RING_DIM[ring]
        if arr.ndim == 2 and d == 1:
            arr = arr[:, :, None]
        if arr.ndim != 3 or arr.shape[2] != d:
            raise ValueError(f"{ring} matrix data must have shape (rows, cols, {d})")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("matrix must have positive size")
        arr.setflags(write=False)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Mat is immutable")

    # construction helpers
    @classmethod
    def zeros(cls, ring: str, rows: int, cols: int | None = None) -> "Mat":
        return cls(ring, np.zeros((rows, rows if cols is None else cols, RING_DIM[ring])))

    @classmethod
    def from_complex(cls, z) -> "Mat":
        z = np.asarray(z, dtype=complex)
        return cls("C", np.stack([z.real, z.imag], axis=-1))

    @classmethod
    def from_entries(cls, ring: str, size: int, entries: Sequence) -> "Mat":
        """Sparse construction from ``(row, col, value)`` triples; value is a
        number or a component list."""
        d = RING_DIM[ring]
        arr = np.zeros((size, size, d))
        for r, c, v in entries:
            comp = np.atleast_1d(np.asarray(v, dtype=float))
            if comp.size == 1 and d > 1:
                comp = np.concatenate([comp, np.zeros(d - 1)])
            if comp.size != d:
                raise ValueError(f"entry {v!r} has wrong number of components for {ring}")
            arr[r, c] += comp
        return cls(ring, arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[:2]

    def entry(self, i: int, j: int) -> Scalar:
        return Scalar(self.ring, tuple(self.data[i, j]))

    def to_complex(self) -> np.ndarray:
        if self.ring == "H":
            raise RingMismatch("quaternionic matrix has no complex form")
        if self.ring == "R":
            return self.data[:, :, 0].astype(complex)
        return self.data[:, :, 0] + 1j * self.data[:, :, 1]

    def flat(self) -> np.ndarray:
        return self.data.reshape(-1)

    def _check(self, other: "Mat") -> None:
        if not isinstance(other, Mat):
            raise TypeError("expected Mat")
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")

    def __add__(self, other: "Mat") -> "Mat":
        self._check(other)
        if other.shape != self.shape:
            raise ValueError("shape mismatch")
        return Mat(self.ring, self.data + other.data)

    def __sub__(self, other: "Mat") -> "Mat":
        self._check(other)
        if other.shape != self.shape:
            raise ValueError("shape mismatch")
        return Mat(self.ring, self.data - other.data)

    def __neg__(self) -> "Mat":
        return Mat(self.ring, -self.data)

    def __mul__(self, s: float) -> "Mat":
        return Mat(self.ring, self.data * float(s))

    __rmul__ = __mul__

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        return Mat(self.ring, kernels.ring_matmul(self.data, other.data, MULT_TABLE[self.ring]))

    def conj_transpose(self) -> "Mat":
        return Mat(self.ring, np.transpose(self.data, (1, 0, 2)) * CONJ_SIGN[self.ring])

    @property
    def H(self) -> "Mat":
        return self.conj_transpose()

    def real_trace(self) -> float:
        if self.rows != self.cols:
            raise ValueError("trace of a non-square matrix")
        return float(np.trace(self.data[:, :, 0]))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.data)))

    def is_skew(self, tol: float = EPS) -> bool:
        """A* = -A (skew, anti-Hermitian or quaternionic anti-Hermitian)."""
        return (self + self.H).max_abs() < tol

    def allclose(self, other: "Mat", tol: float = EPS) -> bool:
        return self.ring == other.ring and self.shape == other.shape and (self - other).max_abs() < tol

    def __repr__(self) -> str:
        return f"Mat({self.ring}, {self.rows}x{self.cols})"


def _square_pair(A: Mat, B: Mat) -> None:
    if not isinstance(A, Mat) or not isinstance(B, Mat):
        raise TypeError("expected Mat operands")
    if A.ring != B.ring:
        raise RingMismatch(f"{A.ring} vs {B.ring}")
    if A.rows != A.cols or A.shape != B.shape:
        raise ValueError(f"need square matrices of equal size, got {A.shape} and {B.shape}")


def bracket(A: Mat, B: Mat) -> Mat:
    """Commutator AB - BA."""
    _square_pair(A, B)
    return A @ B - B @ A


def trace_form(A: Mat, B: Mat, scale: float) -> float:
    """-scale * Re Tr(AB); positive definite on skew matrices for scale > 0."""
    _square_pair(A, B)
    return -float(scale) * (A @ B).real_trace()
