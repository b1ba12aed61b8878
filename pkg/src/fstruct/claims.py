"""The classification claims for the worked examples, checked end to end.

Each claim fixes an expected region per class for one or more structures. The
computed side is the theorem route, and every structure is also swept over the
metric grid by the direct predicates; a claim matches only when the regions
agree and the sweep reports no disagreement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from fstruct.connection import ALL, CLASSES, EMPTY, Region, cross_validate, metric_grid, theorem_regions
from fstruct.foperator import check_invariance
from fstruct.library import builtin_f, is_antipodal, quat_label, quaternion_pairs, quaternion_samples
from fstruct.registry import build_space, registered_instances
from fstruct.scalars import EPS
from fstruct.spaces import verify_assumption1

FLAG_SIZES = (4, 5, 6, 7)


@dataclass
class Check:
    """One (structure, class) comparison inside a claim."""

    subject: str
    cls: str
    expected: Region
    computed: Region
    agreement: bool

    @property
    def ok(self) -> bool:
        return self.expected == self.computed and self.agreement


@dataclass
class ClaimResult:
    number: int
    statement: str
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return bool(self.checks) and all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def to_dict(self) -> dict:
        return {
            "claim": self.number,
            "statement": self.statement,
            "match": self.ok,
            "checks": [
                {"subject": c.subject, "class": c.cls, "expected": c.expected.describe(),
                 "computed": c.computed.describe(), "routes_agree": c.agreement, "match": c.ok}
                for c in self.checks
            ],
        }


class _Runner:
    """Caches theorem regions and grid agreement per structure."""

    def __init__(self, grid=None):
        self.grid = metric_grid() if grid is None else list(grid)
        self._seen: dict = {}

    def run(self, f):
        key = (f.space.label, f.name, tuple(sorted((k, tuple(v)) for k, v in f.params.items())))
        if key not in self._seen:
            regions, _ = theorem_regions(f)
            self._seen[key] = (regions, cross_validate(f, self.grid).ok)
        return self._seen[key]

    def checks(self, f, expected: dict, subject: str | None = None) -> list[Check]:
        regions, agree = self.run(f)
        subject = subject or f"{f.space.label} {f.name}"
        return [Check(subject, c, expected[c], regions[c], agree) for c in CLASSES if c in expected]


def _flags(runner, fids, expected, statement, number):
    res = ClaimResult(number, statement)
    for n in FLAG_SIZES:
        S = build_space("oriented_flags", (n,))
        for fid in fids:
            res.checks += runner.checks(builtin_f(S, fid), expected)
    return res


def _stiefel(runner, fids, expected, statement, number):
    S = build_space("stiefel_so4_so2")
    res = ClaimResult(number, statement)
    for fid in fids:
        res.checks += runner.checks(builtin_f(S, fid), expected)
    return res


def run_claims(grid=None) -> list[ClaimResult]:
    r = _Runner(grid)
    out = [
        _flags(r, ("f2", "f3"), {"G1f": ALL, "NKf": ALL, "Killf": EMPTY},
               "oriented flags f2, f3: NKf and G1f for every invariant metric, never Killing", 1),
        _flags(r, ("f1", "f4"), {"G1f": ALL},
               "oriented flags f1, f4: G1f for every invariant metric", 2),
        _flags(r, ("f1",), {"NKf": Region("equal", (1, 2))},
               "oriented flags f1: NKf exactly for (s,s,t)", 3),
        _flags(r, ("f4",), {"NKf": EMPTY},
               "oriented flags f4: never NKf", 4),
        _flags(r, ("f1",), {"Killf": Region("killing", (3, 1, 2))},
               "oriented flags f1: Killing exactly for (3s,3s,4s)", 5),
        _flags(r, ("f4",), {"Killf": EMPTY},
               "oriented flags f4: never Killing", 6),
        _stiefel(r, ("f1", "f2"), {"G1f": ALL, "NKf": ALL, "Killf": EMPTY},
                 "Stiefel f1, f2: NKf and G1f for every invariant metric, never Killing", 7),
        _stiefel(r, ("f3", "f4"), {"G1f": ALL},
                 "Stiefel f3, f4: G1f for every invariant metric", 8),
        _stiefel(r, ("f3",), {"NKf": EMPTY, "Killf": EMPTY},
                 "Stiefel f3: neither NKf nor Killing", 9),
        _stiefel(r, ("f4",), {"NKf": Region("equal", (2, 3))},
                 "Stiefel f4: NKf exactly for (s,t,t)", 10),
        _stiefel(r, ("f4",), {"Killf": Region("killing", (1, 2, 3))},
                 "Stiefel f4: Killing exactly for (4s,3s,3s)", 11),
    ]

    S = build_space("sp3_flags")
    c12 = ClaimResult(12, "Sp(3) one-block structures: NKf and G1f for every invariant metric, never Killing")
    for p in (1, 2, 3):
        for h in quaternion_samples():
            f = builtin_f(S, f"one{p}", {"h": h})
            c12.checks += r.checks(f, {"G1f": ALL, "NKf": ALL, "Killf": EMPTY},
                                   f"sp3 one{p} h={quat_label(h)}")
    out.append(c12)

    c13 = ClaimResult(13, "Sp(3) f1: G1f always, never Killing; NKf exactly when h1 = -h2 and (l,l,m)")
    for h1, h2 in quaternion_pairs():
        f = builtin_f(S, "f1", {"h1": h1, "h2": h2})
        nkf = Region("equal", (1, 2)) if is_antipodal(h1, h2) else EMPTY
        c13.checks += r.checks(f, {"G1f": ALL, "NKf": nkf, "Killf": EMPTY},
                               f"sp3 f1 h1={quat_label(h1)} h2={quat_label(h2)}")
    out.append(c13)

    c14 = ClaimResult(14, "Sp(3) f2, f3: G1f always, neither NKf nor Killing, for any h1, h2")
    for fid in ("f2", "f3"):
        for h1, h2 in quaternion_pairs():
            f = builtin_f(S, fid, {"h1": h1, "h2": h2})
            c14.checks += r.checks(f, {"G1f": ALL, "NKf": EMPTY, "Killf": EMPTY},
                                   f"sp3 {fid} h1={quat_label(h1)} h2={quat_label(h2)}")
    out.append(c14)
    return out


def audit_notes() -> list[str]:
    """Hypothesis checks that sit outside the claim table."""
    notes = []
    for S in registered_instances():
        rep = verify_assumption1(S)
        if not rep.passed:
            a2 = rep.clause("A2").detail
            why = []
            if a2.get("equivalent_pairs"):
                why.append("equivalent modules " + ", ".join(f"m{a}~m{b}" for a, b in a2["equivalent_pairs"]))
            if a2.get("reducible_modules"):
                why.append("reducible modules " + ", ".join(f"m{i}" for i in a2["reducible_modules"]))
            notes.append(f"{S.label}: decomposition audit fails {', '.join(rep.failed_clauses)}"
                         + (f" ({'; '.join(why)})" if why else ""))
    S = build_space("sp3_flags")
    worst = max(check_invariance(builtin_f(S, fid)) for fid in ("one1", "f1", "f2", "f3"))
    if worst > EPS:
        notes.append(f"sp3_flags: left-multiplication structures are not ad(h)-invariant "
                     f"(residual {worst:.3g}); each module has a one-dimensional commutant")
    return notes


def render_table(results: list[ClaimResult], verbose: bool = False) -> str:
    lines = []
    for res in results:
        mark = "match" if res.ok else "MISMATCH"
        lines.append(f"[{res.number:2d}] {mark:8s} {res.statement}")
        shown = res.checks if verbose else res.failures
        for c in shown[:8] if not verbose else shown:
            lines.append(f"       {c.subject} {c.cls}: expected {c.expected.describe()}; "
                         f"computed {c.computed.describe()}"
                         + ("" if c.agreement else "; routes disagree"))
        if not verbose and len(res.failures) > 8:
            lines.append(f"       ... {len(res.failures) - 8} more")
    return "\n".join(lines)
