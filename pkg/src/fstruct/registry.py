"""Built-in homogeneous spaces with three-module isotropy decompositions."""

from __future__ import annotations

from fstruct.scalars import Mat
from fstruct.spaces import ReductiveSpace

QUAT_UNITS = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))


def _skew_real(n: int, a: int, b: int) -> Mat:
    return Mat.from_entries("R", n, [(a, b, 1.0), (b, a, -1.0)])


def stiefel_so4_so2() -> ReductiveSpace:
    """SO(4)/SO(2), isotropy rotating the last two coordinates.

    m1 is the a-slot (1,2), m2 the b-slots (1,3),(1,4), m3 the c-slots
    (2,3),(2,4) (1-based).
    """
    n = 4
    h = [_skew_real(n, 2, 3)]
    m1 = [_skew_real(n, 0, 1)]
    m2 = [_skew_real(n, 0, 2), _skew_real(n, 0, 3)]
    m3 = [_skew_real(n, 1, 2), _skew_real(n, 1, 3)]
    return ReductiveSpace("stiefel_so4_so2", "R", n, h, [m1, m2, m3], g0_scale=2.0)


def oriented_flags(n: int) -> ReductiveSpace:
    """SO(n)/SO(2) x SO(n-3) for the partition 1 + 2 + (n-3).

    Index blocks: the line {0}, the plane {1, 2}, the rest {3..n-1}.
    m1 = plane x rest (ordered rest-major so the plane pairs are adjacent),
    m2 = line x plane, m3 = line x rest.
    """
    n = int(n)
    if n < 4:
        raise ValueError(f"oriented flags need n >= 4, got {n}")
    plane, rest = (1, 2), tuple(range(3, n))
    h = [_skew_real(n, 1, 2)]
    h += [_skew_real(n, a, b) for ai, a in enumerate(rest) for b in rest[ai + 1:]]
    m1 = [_skew_real(n, p, q) for q in rest for p in plane]
    m2 = [_skew_real(n, 0, p) for p in plane]
    m3 = [_skew_real(n, 0, q) for q in rest]
    return ReductiveSpace("oriented_flags", "R", n, h, [m1, m2, m3], g0_scale=n - 2, params=(n,))


def _complex_slot(n: int, a: int, b: int) -> list[Mat]:
    re = Mat.from_entries("C", n, [(a, b, (1, 0)), (b, a, (-1, 0))])
    im = Mat.from_entries("C", n, [(a, b, (0, 1)), (b, a, (0, 1))])
    return [re, im]


def su3_tmax() -> ReductiveSpace:
    """SU(3)/T with the three off-diagonal root planes (1,2), (1,3), (2,3).

    g0 = -6 Re Tr(XY), the negative Killing form of su(3).
    """
    n = 3
    h = [
        Mat.from_entries("C", n, [(0, 0, (0, 1)), (1, 1, (0, -1))]),
        Mat.from_entries("C", n, [(1, 1, (0, 1)), (2, 2, (0, -1))]),
    ]
    m = [_complex_slot(n, 0, 1), _complex_slot(n, 0, 2), _complex_slot(n, 1, 2)]
    return ReductiveSpace("su3_tmax", "C", n, h, m, g0_scale=6.0)


def _quat_slot(n: int, a: int, b: int) -> list[Mat]:
    out = []
    for u in QUAT_UNITS:
        ubar = (u[0], -u[1], -u[2], -u[3])
        out.append(Mat.from_entries("H", n, [(a, b, u), (b, a, tuple(-c for c in ubar))]))
    return out


def sp3_flags() -> ReductiveSpace:
    """Sp(3)/Sp(1)^3; modules are the x, y, z quaternionic slots (1,2), (1,3), (2,3).

    g0 = -8 Re Tr(XY).
    """
    n = 3
    h = [Mat.from_entries("H", n, [(d, d, u)]) for d in range(n) for u in QUAT_UNITS[1:]]
    m = [_quat_slot(n, 0, 1), _quat_slot(n, 0, 2), _quat_slot(n, 1, 2)]
    return ReductiveSpace("sp3_flags", "H", n, h, m, g0_scale=8.0)


SPACES = {
    "stiefel_so4_so2": (stiefel_so4_so2, 0),
    "oriented_flags": (oriented_flags, 1),
    "su3_tmax": (su3_tmax, 0),
    "sp3_flags": (sp3_flags, 0),
}

SPACE_INFO = {
    "stiefel_so4_so2": ("R", "SO(4)/SO(2)", None),
    "oriented_flags": ("R", "SO(n)/SO(2)xSO(n-3)", "n >= 4"),
    "su3_tmax": ("C", "SU(3)/T_max", None),
    "sp3_flags": ("H", "Sp(3)/Sp(1)xSp(1)xSp(1)", None),
}

_cache: dict = {}


def build_space(name: str, params=()) -> ReductiveSpace:
    """Build (and memoize) a registered space."""
    if name not in SPACES:
        raise KeyError(f"unknown space {name!r}; known: {', '.join(SPACES)}")
    builder, nparams = SPACES[name]
    params = tuple(int(p) for p in params)
    if len(params) != nparams:
        raise ValueError(f"{name} takes {nparams} integer parameter(s), got {len(params)}")
    key = (name, params)
    if key not in _cache:
        _cache[key] = builder(*params)
    return _cache[key]


def parse_space(spec: str) -> ReductiveSpace:
    """``name`` or ``name:p1,p2`` -> space."""
    name, _, rest = spec.partition(":")
    params = [p for p in rest.split(",") if p.strip()] if rest else []
    try:
        params = [int(p) for p in params]
    except ValueError as exc:
        raise ValueError(f"bad space parameters in {spec!r}") from exc
    return build_space(name, params)


def registered_instances() -> list[ReductiveSpace]:
    """Every registered space, with oriented flags for n = 4..7."""
    return [
        build_space("stiefel_so4_so2"),
        build_space("su3_tmax"),
        build_space("sp3_flags"),
    ] + [build_space("oriented_flags", (n,)) for n in (4, 5, 6, 7)]
