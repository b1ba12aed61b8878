"""Declarative JSON formats: space definitions, f-structure definitions, reports.

Space file::

    {
      "name": "my_space", "ring": "R", "size": 4, "g0_scale": 2,
      "h":  [[[2, 3, 1], [3, 2, -1]]],
      "m1": [[[0, 1, 1], [1, 0, -1]]],
      "m2": [...], "m3": [...]
    }

Each basis element is a sparse list of ``[row, col, value]`` entries, 0-based.
``value`` is a number, ``[re, im]`` for ring C, or ``[w, x, y, z]`` for ring H.

f-structure file::

    {
      "name": "f1", "shape": "image_is(2)",
      "modules": {"2": {"pairs": [[0, 1, 1]]}}
    }

A module entry is ``{"pairs": [[p, q, sign], ...]}``, ``{"quaternion": [x, y, z]}``
or ``{"matrix": [[...], ...]}``; unlisted modules map to zero. A top-level
``"matrix"`` gives the whole operator on m instead. ``"shape"`` is optional and,
when present, must match the computed shape.

Reports are JSON objects tagged with ``schema_version`` and ``kind``.
"""

from __future__ import annotations

import json
from pathlib import Path

from fstruct.connection import AgreementReport, ClassReport, Disagreement
from fstruct.foperator import FOperator, Shape, block_f, classify_shape
from fstruct.scalars import RING_DIM, Mat
from fstruct.spaces import Assumption1Report, ReductiveSpace

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    """Malformed definition file or report."""


def _load_json(source) -> dict:
    if isinstance(source, dict):
        return source
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: top level must be an object")
    return doc


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise SchemaError(f"{where}: missing key {key!r}")
    return doc[key]


def _matrix(ring: str, size: int, entries, where: str) -> Mat:
    if not isinstance(entries, list):
        raise SchemaError(f"{where}: basis element must be a list of [row, col, value]")
    triples = []
    for e in entries:
        if not isinstance(e, list) or len(e) != 3:
            raise SchemaError(f"{where}: bad entry {e!r}")
        r, c, v = e
        if not (isinstance(r, int) and isinstance(c, int) and 0 <= r < size and 0 <= c < size):
            raise SchemaError(f"{where}: index ({r}, {c}) out of range for size {size}")
        triples.append((r, c, v))
    try:
        return Mat.from_entries(ring, size, triples)
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def space_from_dict(doc: dict) -> ReductiveSpace:
    name = str(doc.get("name", "user_space"))
    ring = _require(doc, "ring", name)
    if ring not in RING_DIM:
        raise SchemaError(f"{name}: ring must be one of {sorted(RING_DIM)}, got {ring!r}")
    size = _require(doc, "size", name)
    if not isinstance(size, int) or size < 1:
        raise SchemaError(f"{name}: size must be a positive integer")
    scale = float(doc.get("g0_scale", 1.0))
    if scale <= 0:
        raise SchemaError(f"{name}: g0_scale must be positive")
    h = [_matrix(ring, size, e, f"{name}.h[{k}]") for k, e in enumerate(doc.get("h", []))]
    modules = []
    for i in (1, 2, 3):
        elems = _require(doc, f"m{i}", name)
        modules.append([_matrix(ring, size, e, f"{name}.m{i}[{k}]") for k, e in enumerate(elems)])
    return ReductiveSpace(name, ring, size, h, modules, scale)


def load_space(source) -> ReductiveSpace:
    """Space from a JSON file path (or an already parsed dict)."""
    return space_from_dict(_load_json(source))


def space_to_dict(space: ReductiveSpace) -> dict:
    def sparse(M: Mat) -> list:
        out = []
        for r in range(M.rows):
            for c in range(M.cols):
                comp = M.data[r, c]
                if abs(comp).max() > 0:
                    out.append([r, c, float(comp[0]) if comp.size == 1 else [float(x) for x in comp]])
        return out

    doc = {"name": space.name, "ring": space.ring, "size": space.size, "g0_scale": space.g0_scale,
           "h": [sparse(M) for M in space.h_basis]}
    for i, basis in enumerate(space.m_basis, start=1):
        doc[f"m{i}"] = [sparse(M) for M in basis]
    return doc


def f_from_dict(space: ReductiveSpace, doc: dict) -> FOperator:
    name = str(doc.get("name", "f"))
    if "matrix" in doc:
        try:
            f = FOperator(space, doc["matrix"], name)
        except ValueError as exc:
            raise SchemaError(f"{name}: {exc}") from exc
    else:
        spec, images = {}, []
        for key, entry in _require(doc, "modules", name).items():
            try:
                i = int(key)
            except ValueError as exc:
                raise SchemaError(f"{name}: module key {key!r} is not 1, 2 or 3") from exc
            if not isinstance(entry, dict) or len(entry) != 1:
                raise SchemaError(f"{name}: module {key} needs exactly one of pairs/quaternion/matrix")
            (kind, value), = entry.items()
            if kind == "pairs":
                spec[i] = [tuple(p) for p in value]
            elif kind == "quaternion":
                spec[i] = tuple(float(c) for c in value)
            elif kind == "matrix":
                spec[i] = value
            else:
                raise SchemaError(f"{name}: unknown module spec {kind!r}")
            images.append(i)
        try:
            f = block_f(space, images, spec, name=name)
        except (ValueError, IndexError) as exc:
            raise SchemaError(f"{name}: {exc}") from exc
    if "shape" in doc:
        try:
            want = Shape.parse(doc["shape"])
        except ValueError as exc:
            raise SchemaError(f"{name}: {exc}") from exc
        got = classify_shape(f)
        if got != want:
            raise SchemaError(f"{name}: declared shape {want} but the operator has shape {got}")
    return f


def load_f(space: ReductiveSpace, source) -> FOperator:
    return f_from_dict(space, _load_json(source))


# -- reports ------------------------------------------------------------------


def _agreement_to_dict(r: AgreementReport) -> dict:
    return {
        "space": r.space, "structure": r.structure, "points": r.points, "ok": r.ok,
        "disagreements": [vars(d) | {"metric": list(d.metric)} for d in r.disagreements],
        "chain_violations": [list(m) for m in r.chain_violations],
    }


def _agreement_from_dict(d: dict) -> AgreementReport:
    dis = [Disagreement(tuple(x["metric"]), x["cls"], x["direct"], x["theorem"], x["residual"])
           for x in d["disagreements"]]
    return AgreementReport(d["space"], d["structure"], d["points"], dis,
                           [tuple(m) for m in d["chain_violations"]])


_KINDS = {
    "classification": (ClassReport, lambda r: r.to_dict(), ClassReport.from_dict),
    "assumption1": (Assumption1Report, lambda r: r.to_dict(), Assumption1Report.from_dict),
    "agreement": (AgreementReport, _agreement_to_dict, _agreement_from_dict),
}


def report_to_dict(report, **extra) -> dict:
    for kind, (cls, dump, _) in _KINDS.items():
        if isinstance(report, cls):
            return {"schema_version": SCHEMA_VERSION, "kind": kind, **extra, "report": dump(report)}
    raise TypeError(f"no structured form for {type(report).__name__}")


def render(report, **extra) -> str:
    """Stable-ordered JSON for a report; ``extra`` keys are stored alongside."""
    return json.dumps(report_to_dict(report, **extra), sort_keys=True, indent=2)


def parse(text: str):
    """Inverse of :func:`render` (the report object only)."""
    doc = json.loads(text)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {doc.get('schema_version')!r}")
    kind = doc.get("kind")
    if kind not in _KINDS:
        raise SchemaError(f"unknown report kind {kind!r}")
    return _KINDS[kind][2](doc["report"])
