"""Command-line front end.

Exit codes: 0 success, 1 semantic failure, 2 input error, 3 guard refusal.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from .afr.model import (
    AfrModel,
    ModelError,
    add_resource,
    afr_as_system,
    build_afr,
    check_membership,
    disaggregate,
    empty_model,
    merge,
    model_from_json,
    model_to_csv,
    model_to_json,
)
from .bench import exp2_fit_r2, linear_fit_r2, time_build
from .flex import (
    EmptyResourceError,
    HypothesisError,
    ParseError,
    ResourceSet,
    parse_resources,
    read_resources,
    serialize_resources,
    tighten_bounds,
    validate_hypotheses,
)
from .fme import DEFAULT_MAX_NT, GuardExceeded, aggregate_projection_oracle
from .linear import system_equivalent
from .rational import format_rational, parse_rational
from .theorems.checks import CHECKS, DEFAULT_SIZES, run_suite
from .theorems.symbolic import KNOWN_MUTANTS

OK, FAIL, INPUT, GUARD = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _fmt(path: str, override: str | None = None) -> str:
    if override:
        return override
    return "csv" if path.lower().endswith(".csv") else "json"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_resources(path: str, fmt: str | None = None) -> ResourceSet:
    try:
        return parse_resources(_read(path), _fmt(path, fmt))
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_model(path: str) -> AfrModel:
    try:
        return model_from_json(_read(path))
    except ModelError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_profile(path: str) -> list[Fraction]:
    try:
        doc = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("E"), list):
        raise InputError(f'{path}: expected {{"E": [...]}}')
    try:
        return [parse_rational(v) for v in doc["E"]]
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _report_hypotheses(exc: HypothesisError) -> None:
    print(f"{exc.resource_id}: invalid", file=sys.stderr)
    for v in exc.violations:
        print(f"  {v}", file=sys.stderr)


# ------------------------------------------------------------ commands

def cmd_validate(args) -> int:
    fmt = _fmt(args.input, args.format)
    try:
        raw = read_resources(_read(args.input), fmt)
    except ParseError as exc:
        raise InputError(f"{args.input}: {exc}") from None
    all_ok = True
    for r in raw:
        rep = validate_hypotheses(r)
        if rep.ok:
            print(f"{r.id}: ok")
        else:
            all_ok = False
            print(f"{r.id}: {len(rep.violations)} violation(s)")
            for v in rep.violations:
                print(f"  {v}")
    if all_ok and not args.tighten:
        return OK
    if not args.tighten:
        return FAIL
    try:
        repaired = [tighten_bounds(r) for r in raw]
    except EmptyResourceError as exc:
        print(f"cannot repair: {exc}", file=sys.stderr)
        return FAIL
    text = serialize_resources(repaired, _fmt(args.out, args.format) if args.out else fmt)
    _emit(text, args.out)
    return OK


def cmd_build(args) -> int:
    try:
        rs = _load_resources(args.input)
    except HypothesisError as exc:
        _report_hypotheses(exc)
        return FAIL
    threads = args.threads if args.threads else (os.cpu_count() or 1)
    t0 = time.perf_counter()
    model = build_afr(rs, threads=threads, keep_contributions=args.contributions)
    elapsed = time.perf_counter() - t0
    stats = {
        "N": rs.N, "T": rs.T,
        "directions": len(model.masks),
        "inequalities": model.inequality_count,
        "build_seconds": round(elapsed, 6),
    }
    if args.format == "csv":
        _emit(model_to_csv(model), args.out)
        print(json.dumps({"stats": stats}), file=sys.stderr)
    else:
        _emit(model_to_json(model, contributions=args.contributions,
                            stats=None if args.no_stats else stats), args.out)
    return OK


def cmd_empty(args) -> int:
    if args.T < 1:
        raise InputError("--T must be positive")
    _model_out(empty_model(args.T), args.out)
    return OK


def _model_out(model: AfrModel, out: str | None) -> None:
    _emit(model_to_json(model, contributions=model.contributions is not None), out)


def cmd_merge(args) -> int:
    models = [_load_model(p) for p in args.models]
    try:
        acc = models[0]
        for m in models[1:]:
            acc = merge(acc, m)
    except ModelError as exc:
        print(f"merge failed: {exc}", file=sys.stderr)
        return FAIL
    _model_out(acc, args.out)
    return OK


def cmd_add(args) -> int:
    model = _load_model(args.model)
    try:
        rs = _load_resources(args.resources)
    except HypothesisError as exc:
        _report_hypotheses(exc)
        return FAIL
    try:
        for r in rs:
            model = add_resource(model, r)
    except ModelError as exc:
        print(f"add failed: {exc}", file=sys.stderr)
        return FAIL
    _model_out(model, args.out)
    return OK


def cmd_check(args) -> int:
    model = _load_model(args.model)
    E = _load_profile(args.profile)
    if len(E) != model.T:
        raise InputError(f"profile has {len(E)} entries, model horizon is {model.T}")
    res = check_membership(model, E)
    print(json.dumps({"inside": res.inside, "violations": [
        {"S": list(v.subset), "side": v.side, "value": format_rational(v.value),
         "bound": format_rational(v.bound)} for v in res.violations]}, indent=1))
    return OK if res.inside else FAIL


def cmd_disaggregate(args) -> int:
    try:
        rs = _load_resources(args.resources)
    except HypothesisError as exc:
        _report_hypotheses(exc)
        return FAIL
    E = _load_profile(args.profile)
    if len(E) != rs.T:
        raise InputError(f"profile has {len(E)} entries, resource horizon is {rs.T}")
    out = disaggregate(rs, E)
    if not out.feasible:
        print("profile cannot be split among the resources", file=sys.stderr)
        return FAIL
    doc = {"allocations": {rid: [format_rational(v) for v in traj]
                           for rid, traj in out.allocations.items()}}
    _emit(json.dumps(doc, indent=1) + "\n", args.out)
    return OK


def cmd_compare_oracle(args) -> int:
    try:
        rs = _load_resources(args.input)
    except HypothesisError as exc:
        _report_hypotheses(exc)
        return FAIL
    if rs.N * rs.T > args.max_nt:
        print(f"refused: N*T = {rs.N * rs.T} exceeds --max-nt {args.max_nt}", file=sys.stderr)
        return GUARD
    model = _load_model(args.afr) if args.afr else build_afr(rs)
    if model.T != rs.T:
        print(f"model horizon {model.T} differs from resources ({rs.T})", file=sys.stderr)
        return FAIL
    try:
        oracle = aggregate_projection_oracle(rs, max_nt=args.max_nt)
    except GuardExceeded as exc:  # pragma: no cover - checked above
        print(f"refused: {exc}", file=sys.stderr)
        return GUARD
    if rs.T == 0:
        equal = True
    else:
        equal = system_equivalent(afr_as_system(model), oracle)
    print(json.dumps({"N": rs.N, "T": rs.T, "afr_rows": model.inequality_count,
                      "oracle_rows": len(oracle.rows), "equivalent": equal}))
    return OK if equal else FAIL


def _parse_sizes(text: str) -> list[tuple[int, int]]:
    out = []
    for part in text.split(","):
        try:
            n, t = part.lower().split("x")
            out.append((int(n), int(t)))
        except ValueError:
            raise InputError(f"bad size {part!r}; expected NxT, e.g. 3x4") from None
    return out


def cmd_theorems(args) -> int:
    sizes = _parse_sizes(args.sizes) if args.sizes else list(DEFAULT_SIZES)
    checks = args.checks.split(",") if args.checks else list(CHECKS)
    unknown = set(checks) - set(CHECKS)
    if unknown:
        raise InputError(f"unknown checks: {sorted(unknown)}")
    recs = run_suite(args.seeds, sizes, checks, mutant_name=args.mutant)
    failed = [r for r in recs if not r.passed]
    for name in checks:
        mine = [r for r in recs if r.check == name]
        bad = sum(not r.passed for r in mine)
        print(f"{name:18s} {len(mine) - bad}/{len(mine)} pass")
    if args.json:
        Path(args.json).write_text(json.dumps([r.as_dict() for r in recs], indent=1) + "\n")
    return FAIL if failed else OK


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise InputError(f"bad integer list {text!r}") from None


def cmd_bench(args) -> int:
    Ns, Ts = _int_list(args.N), _int_list(args.T)
    rows = []
    print(f"{'N':>6} {'T':>3} {'seconds':>10} {'rows':>7} {'per_dir_us':>11}")
    for T in Ts:
        for N in Ns:
            m = time_build(N, T, repeats=args.repeats, seed=args.seed)
            rows.append(m)
            ok = m.rows == 2 * (2 ** T - 1)
            print(f"{N:>6} {T:>3} {m.seconds:>10.4f} {m.rows:>7} {m.per_direction * 1e6:>11.2f}"
                  + ("" if ok else "  ROW COUNT MISMATCH"))
            if not ok:
                return FAIL
    fits = {}
    for T in Ts:
        sel = [m for m in rows if m.T == T]
        if len(sel) >= 3:
            fits[f"linear_in_N@T={T}"] = linear_fit_r2([m.N for m in sel], [m.seconds for m in sel])
    for N in Ns:
        sel = [m for m in rows if m.N == N]
        if len(sel) >= 3:
            fits[f"c*2^T@N={N}"] = exp2_fit_r2([m.T for m in sel], [m.seconds for m in sel])
    for k, v in fits.items():
        print(f"R^2 {k}: {v:.4f}")
    return OK


# ------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="afrkit", description="Exact aggregate flexibility models.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check resource hypotheses")
    s.add_argument("input")
    s.add_argument("--tighten", action="store_true", help="repair bounds and write the result")
    s.add_argument("--out", help="repaired resource file (default: stdout)")
    s.add_argument("--format", choices=("json", "csv"))
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("build", help="build the aggregate model")
    s.add_argument("input")
    s.add_argument("--out")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--threads", type=int, default=0, help="worker threads (default: all cores)")
    s.add_argument("--contributions", action="store_true", help="store per-resource contributions")
    s.add_argument("--no-stats", action="store_true", help="omit the stats block")
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("empty", help="model of an empty fleet")
    s.add_argument("--T", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_empty)

    s = sub.add_parser("merge", help="add models of disjoint fleets")
    s.add_argument("models", nargs="+")
    s.add_argument("--out")
    s.set_defaults(func=cmd_merge)

    s = sub.add_parser("add", help="add resources to a model")
    s.add_argument("model")
    s.add_argument("resources")
    s.add_argument("--out")
    s.set_defaults(func=cmd_add)

    s = sub.add_parser("check", help="test an aggregate profile against a model")
    s.add_argument("model")
    s.add_argument("profile")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("disaggregate", help="split an aggregate profile among resources")
    s.add_argument("resources")
    s.add_argument("profile")
    s.add_argument("--out")
    s.set_defaults(func=cmd_disaggregate)

    s = sub.add_parser("compare-oracle", help="compare the model with brute-force projection")
    s.add_argument("input")
    s.add_argument("--max-nt", type=int, default=DEFAULT_MAX_NT)
    s.add_argument("--afr", help="compare this model document instead of a fresh build")
    s.set_defaults(func=cmd_compare_oracle)

    s = sub.add_parser("theorems", help="run the redundancy check suites")
    s.add_argument("--seeds", type=int, default=100)
    s.add_argument("--sizes", help="comma-separated NxT list (default: 2x2,2x3,3x3,3x4)")
    s.add_argument("--checks", help="comma-separated subset of checks")
    s.add_argument("--json", help="write the per-(check, seed) report here")
    s.add_argument("--mutant", choices=KNOWN_MUTANTS, help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_theorems)

    s = sub.add_parser("bench", help="time builds on synthetic fleets")
    s.add_argument("--N", default="100,200,400,800")
    s.add_argument("--T", default="10")
    s.add_argument("--repeats", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT if exc.code else OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
