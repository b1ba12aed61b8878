"""Command-line front end.

Exit codes: 0 success, 1 verification or classification mismatch, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from fstruct import __version__
from fstruct.claims import audit_notes, render_table, run_claims
from fstruct.connection import (
    CLASSES, GRID_VALUES, ClassReport, Metric, UnsupportedShape, classify, cross_validate,
    metric_grid, theorem_classify,
)
from fstruct.foperator import check_compatibility, check_f_cubed, check_invariance
from fstruct.library import builtin_f, builtin_ids, parse_quaternion, quat_label, quaternion_samples
from fstruct.registry import SPACE_INFO, SPACES, build_space, parse_space
from fstruct.scalars import EPS
from fstruct.schema import SCHEMA_VERSION, SchemaError, load_f, load_space, render
from fstruct.spaces import verify_assumption1

OK, MISMATCH, INPUT_ERROR = 0, 1, 2
RING_SYMBOL = {"R": "ℝ", "C": "ℂ", "H": "ℍ"}


class InputError(Exception):
    pass


def _emit(text: str) -> None:
    sys.stdout.write(text.rstrip("\n") + "\n")


def _space(args):
    if args.space_file:
        return load_space(args.space_file)
    if not args.space:
        raise InputError("a space name or --space-file is required")
    try:
        return parse_space(args.space)
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc.args[0]) if exc.args else str(exc)) from exc


def _quats(text: str | None) -> dict:
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        key, sep, val = item.partition("=")
        if not sep or key.strip() not in ("h", "h1", "h2"):
            raise InputError(f"bad --quat item {item!r}; use h=..., h1=..., h2=...")
        try:
            out[key.strip()] = parse_quaternion(val)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    return out


# -- list-spaces --------------------------------------------------------------


def cmd_list_spaces(args) -> int:
    rows = []
    for name in SPACES:
        ring, group, param = SPACE_INFO[name]
        S = build_space(name, (4,) if param else ())
        rows.append({
            "name": name, "ring": ring, "group": group,
            "parameters": param,
            "dims": list(S.dims) if not param else None,
            "dims_n4": list(S.dims) if param else None,
            "structures": builtin_ids(S),
        })
    if args.format == "structured":
        _emit(json.dumps({"schema_version": SCHEMA_VERSION, "kind": "spaces", "spaces": rows},
                         indent=2, sort_keys=True))
        return OK
    for r in rows:
        if r["parameters"]:
            dims = f"dims (h,m1,m2,m3) = ((n-3)(n-4)/2+1, 2(n-3), 2, n-3); n=4: {tuple(r['dims_n4'])}"
            head = f"{r['name']}:n  [{r['parameters']}]"
        else:
            dims = f"dims (h,m1,m2,m3) = {tuple(r['dims'])}"
            head = r["name"]
        _emit(f"{head}\n  {r['group']} over {RING_SYMBOL[r['ring']]} ({r['ring']})\n  {dims}\n"
              f"  structures: {', '.join(r['structures'])}")
    return OK


# -- verify -------------------------------------------------------------------


def cmd_verify(args) -> int:
    S = _space(args)
    rep = verify_assumption1(S, args.tolerance)
    if args.format == "structured":
        _emit(render(rep))
    else:
        _emit(f"{rep.space}  dims (h,m1,m2,m3) = {tuple(rep.dims)}  tolerance {rep.tolerance:g}")
        for c in rep.clauses:
            _emit(f"  {c.name:5s} {'pass' if c.passed else 'FAIL'}  residual {c.residual:.3g}")
            if not c.passed:
                for k, v in c.detail.items():
                    _emit(f"        {k}: {v}")
        _emit(f"  commutant dims: {rep.commutant_dims}")
        if not rep.passed:
            _emit(f"failed clauses: {', '.join(rep.failed_clauses)}")
    return OK if rep.passed else MISMATCH


# -- classify -----------------------------------------------------------------


def _structure(args, S):
    if args.f_file:
        return load_f(S, args.f_file)
    if not args.f:
        raise InputError("an f-structure id or --f-file is required")
    try:
        return builtin_f(S, args.f, _quats(args.quat))
    except KeyError as exc:
        raise InputError(exc.args[0]) from exc


def _gates(f, metric, args) -> list[str]:
    tol = args.tolerance
    cube = check_f_cubed(f)
    if cube > tol:
        raise InputError(f"gate f^3 + f = 0 failed (residual {cube:.3g})")
    compat = check_compatibility(f, metric or Metric(1, 1, 1))
    if compat > tol:
        raise InputError(f"gate metric compatibility failed (residual {compat:.3g})")
    warnings = []
    inv = check_invariance(f)
    if inv > tol:
        msg = f"f does not commute with ad(h) (residual {inv:.3g})"
        if args.strict_invariance:
            raise InputError(f"gate invariance failed: {msg}")
        warnings.append(msg)
    return warnings


def _param(v) -> str:
    if isinstance(v, (list, tuple)) and len(v) == 3:
        return quat_label(v)
    return str(v)


def _format_report(rep: ClassReport, warnings, grid_info) -> str:
    lines = [f"space      {rep.space}", f"structure  {rep.structure}"]
    if rep.params:
        lines[-1] += "  (" + ", ".join(f"{k}={_param(v)}" for k, v in rep.params.items()) + ")"
    lines += [f"shape      {rep.shape}"]
    if rep.metric is not None:
        lines.append("metric     (" + ",".join(f"{a:g}" for a in rep.metric) + ")")
    lines.append(f"routes     {rep.route}" + (f" over {grid_info} grid metrics" if grid_info else ""))
    for c in CLASSES:
        v = rep.classes[c]
        if v.at_metric is None:
            lines.append(f"{c + ':':7s}{v.verdict:7s} {v.region.describe()}")
        else:
            extra = f"  residual {v.residual:.3g}" if v.residual is not None else ""
            lines.append(f"{c + ':':7s}{'yes' if v.at_metric else 'no':4s} region {v.region.describe()}{extra}")
    if rep.conditions:
        lines.append("brackets   " + ", ".join(f"{k} {v:.3g}" for k, v in rep.conditions.items()))
    for w in warnings:
        lines.append(f"warning    {w}")
    return "\n".join(lines)


def cmd_classify(args) -> int:
    S = _space(args)
    f = _structure(args, S)
    metric = None
    if args.metric:
        try:
            metric = Metric.parse(args.metric)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    warnings = _gates(f, metric, args)
    tol = args.tolerance
    try:
        if metric is not None:
            rep = classify(f, metric, tol)
            agree, grid_info, extra = rep.route == "both-agree", None, {}
        else:
            rep = theorem_classify(f, None, tol)
            agreement = cross_validate(f, metric_grid(), tol)
            agree = agreement.ok
            rep.route = "both-agree" if agree else "disagree"
            grid_info = agreement.points
            extra = {"grid": list(GRID_VALUES)}
            if args.grid:
                extra["grid_verdicts"] = [
                    {"metric": list(g), **{c: r[c].holds for c in CLASSES}}
                    for g, r in agreement.direct_table.items()
                ]
            if not agree:
                d = agreement.first
                warnings.append(f"routes disagree first at {d.metric} for {d.cls}: "
                                f"direct {d.direct}, theorem {d.theorem}, residual {d.residual:.3g}")
    except UnsupportedShape as exc:
        raise InputError(str(exc)) from exc

    if args.format == "structured":
        _emit(render(rep, warnings=warnings, **extra))
    else:
        _emit(_format_report(rep, warnings, grid_info))
        if args.grid and "grid_verdicts" in extra:
            for row in extra["grid_verdicts"]:
                m = ",".join(f"{a:.4g}" for a in row["metric"])
                _emit(f"  ({m})  " + "  ".join(f"{c}={'yes' if row[c] else 'no'}" for c in CLASSES))
    return OK if agree and rep.chain_ok() else MISMATCH


# -- reproduce-paper ----------------------------------------------------------


def cmd_reproduce(args) -> int:
    results = run_claims()
    notes = audit_notes()
    ok = all(r.ok for r in results)
    if args.format == "structured":
        doc = {
            "schema_version": SCHEMA_VERSION, "kind": "claims", "tolerance": EPS,
            "grid": list(GRID_VALUES),
            "quaternion_samples": [list(h) for h in quaternion_samples()],
            "all_match": ok, "claims": [r.to_dict() for r in results], "audit_notes": notes,
        }
        _emit(json.dumps(doc, indent=2, sort_keys=True))
    else:
        _emit(render_table(results, verbose=args.verbose))
        if notes:
            _emit("audit notes (outside the claim table):")
            for n in notes:
                _emit(f"  - {n}")
        bad = [str(r.number) for r in results if not r.ok]
        _emit(f"{len(results) - len(bad)}/{len(results)} claims match"
              + (f"; mismatched: {', '.join(bad)}" if bad else ""))
    return OK if ok else MISMATCH


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "structured"), default="human")
    common.add_argument("--tolerance", type=float, default=EPS)

    p = argparse.ArgumentParser(prog="fstruct", description="Classify invariant f-structures "
                                "on homogeneous spaces with three isotropy modules.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list-spaces", parents=[common], help="registered spaces")

    v = sub.add_parser("verify", parents=[common], help="audit the module decomposition")
    v.add_argument("space", nargs="?", help="name or name:params, e.g. oriented_flags:5")
    v.add_argument("--space-file")

    c = sub.add_parser("classify", parents=[common], help="classify an f-structure")
    c.add_argument("space", nargs="?")
    c.add_argument("f", nargs="?", help="built-in structure id")
    c.add_argument("--space-file")
    c.add_argument("--f-file")
    mode = c.add_mutually_exclusive_group()
    mode.add_argument("--metric", help="a1,a2,a3 (fractions allowed)")
    mode.add_argument("--grid", action="store_true", help="list direct verdicts on the metric grid")
    mode.add_argument("--region", action="store_true", help="symbolic regions (default)")
    c.add_argument("--quat", help="quaternion parameters, e.g. h1=i,h2=-i or h=0/0.6/0.8")
    c.add_argument("--strict-invariance", action="store_true",
                   help="abort when f does not commute with the isotropy action")

    r = sub.add_parser("reproduce-paper", parents=[common], help="check every worked-example claim")
    r.add_argument("--verbose", action="store_true")
    return p


COMMANDS = {
    "list-spaces": cmd_list_spaces,
    "verify": cmd_verify,
    "classify": cmd_classify,
    "reproduce-paper": cmd_reproduce,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.tolerance <= 0:
        print("fstruct: error: --tolerance must be positive", file=sys.stderr)
        return INPUT_ERROR
    try:
        return COMMANDS[args.command](args)
    except (InputError, SchemaError) as exc:
        print(f"fstruct: error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
