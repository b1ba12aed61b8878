"""Named f-structures on the registered spaces.

Relative signs matter: on the Stiefel manifold ``f4`` rotates the b- and c-slots
in opposite senses, and on the oriented flags ``f1`` does the same on m1 and m2
while ``f4`` rotates them in the same sense.
"""

from __future__ import annotations

import numpy as np

from fstruct.foperator import FOperator, block_f
from fstruct.scalars import EPS
from fstruct.spaces import ReductiveSpace

AXIS_UNITS = (
    (1.0, 0.0, 0.0), (-1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0), (0.0, -1.0, 0.0),
    (0.0, 0.0, 1.0), (0.0, 0.0, -1.0),
)


def fibonacci_sphere(count: int) -> list[tuple[float, float, float]]:
    golden = np.pi * (3.0 - np.sqrt(5.0))
    out = []
    for k in range(count):
        z = 1.0 - 2.0 * (k + 0.5) / count
        r = np.sqrt(1.0 - z * z)
        out.append((float(r * np.cos(golden * k)), float(r * np.sin(golden * k)), float(z)))
    return out


def quaternion_samples() -> list[tuple[float, float, float]]:
    """Deterministic pure unit quaternions: the six axis units plus 20 Fibonacci points."""
    return list(AXIS_UNITS) + fibonacci_sphere(20)


def quaternion_pairs() -> list[tuple[tuple, tuple]]:
    """26 (h1, h2) pairs: consecutive samples, wrapping around.

    Includes the antipodal pairs (i,-i), (j,-j), (k,-k).
    """
    s = quaternion_samples()
    return [(s[k], s[(k + 1) % len(s)]) for k in range(len(s))]


_UNIT_NAMES = {"i": (1.0, 0.0, 0.0), "j": (0.0, 1.0, 0.0), "k": (0.0, 0.0, 1.0)}


def parse_quaternion(text: str) -> tuple[float, float, float]:
    """``i``, ``-k`` or ``x/y/z`` (pure components) -> (x, y, z)."""
    t = text.strip().replace(" ", "")
    sign = 1.0
    if t[:1] in "+-" and t[1:] in _UNIT_NAMES:
        sign, t = (-1.0 if t[0] == "-" else 1.0), t[1:]
    if t in _UNIT_NAMES:
        return tuple(sign * c for c in _UNIT_NAMES[t])
    parts = t.split("/")
    if len(parts) != 3:
        raise ValueError(f"cannot parse quaternion {text!r}; use i, -j, or x/y/z")
    return tuple(float(p) for p in parts)


def quat_label(h) -> str:
    """Short name for a pure quaternion: ``i``, ``-k`` or rounded components."""
    names = {(1.0, 0.0, 0.0): "i", (0.0, 1.0, 0.0): "j", (0.0, 0.0, 1.0): "k"}
    for v, n in names.items():
        if all(abs(a - b) < EPS for a, b in zip(h, v)):
            return n
        if all(abs(a + b) < EPS for a, b in zip(h, v)):
            return "-" + n
    return "(" + ",".join(f"{c:.3f}" for c in h) + ")"


def is_antipodal(h1, h2, tol: float = EPS) -> bool:
    return bool(np.max(np.abs(np.asarray(h1) + np.asarray(h2))) < tol)


def _stiefel(space, fid, quats):
    b = c = [(0, 1, 1)]
    specs = {
        "f1": ({2}, {2: b}),
        "f2": ({3}, {3: c}),
        "f3": ({2, 3}, {2: b, 3: c}),
        "f4": ({2, 3}, {2: b, 3: [(0, 1, -1)]}),
    }
    return specs


def _flags(space, fid, quats):
    n = space.params[0]
    j1 = [(2 * t, 2 * t + 1, 1) for t in range(n - 3)]
    return {
        "f1": ({1, 2}, {1: j1, 2: [(0, 1, -1)]}),
        "f2": ({2}, {2: [(0, 1, 1)]}),
        "f3": ({1}, {1: j1}),
        "f4": ({1, 2}, {1: j1, 2: [(0, 1, 1)]}),
    }


def _su3(space, fid, quats):
    j = [(0, 1, 1)]
    out = {f"im{p}": ({p}, {p: j}) for p in (1, 2, 3)}
    for i in (1, 2, 3):
        a, b = [m for m in (1, 2, 3) if m != i]
        out[f"ker{i}_same"] = ({a, b}, {a: j, b: j})
        out[f"ker{i}_opp"] = ({a, b}, {a: j, b: [(0, 1, -1)]})
    return out


def _sp3(space, fid, quats):
    h = quats.get("h", (1.0, 0.0, 0.0))
    h1 = quats.get("h1", (1.0, 0.0, 0.0))
    h2 = quats.get("h2", (-1.0, 0.0, 0.0))
    out = {f"one{p}": ({p}, {p: h}) for p in (1, 2, 3)}
    out["f1"] = ({1, 2}, {1: h1, 2: h2})
    out["f2"] = ({1, 3}, {1: h1, 3: h2})
    out["f3"] = ({2, 3}, {2: h1, 3: h2})
    return out


_BUILDERS = {
    "stiefel_so4_so2": _stiefel,
    "oriented_flags": _flags,
    "su3_tmax": _su3,
    "sp3_flags": _sp3,
}


def builtin_ids(space: ReductiveSpace) -> list[str]:
    return list(_BUILDERS[space.name](space, None, {}))


def builtin_f(space: ReductiveSpace, fid: str, quats: dict | None = None) -> FOperator:
    """Named structure on a registered space; ``quats`` sets h/h1/h2 on sp3_flags."""
    if space.name not in _BUILDERS:
        raise KeyError(f"no built-in f-structures for {space.name!r}")
    quats = dict(quats or {})
    specs = _BUILDERS[space.name](space, fid, quats)
    if fid not in specs:
        raise KeyError(f"unknown structure {fid!r} on {space.name}; known: {', '.join(specs)}")
    images, rot = specs[fid]
    params = {}
    if space.name == "sp3_flags":
        names = ("h",) if fid.startswith("one") else ("h1", "h2")
        slots = sorted(images)
        params = {nm: tuple(float(c) for c in rot[m]) for nm, m in zip(names, slots)}
    return block_f(space, images, rot, name=fid, params=params)


def all_builtin(space: ReductiveSpace) -> list[FOperator]:
    return [builtin_f(space, fid) for fid in builtin_ids(space)]
