"""Command-line interface: ``ffr <command> ...``.

Exit status is 0 on success, 1 on bad input and 3 when an exact invariant
fails (two routes disagree, a constant-1 inequality is violated, a control
construction misbehaves).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from .errors import BudgetExceededError, FieldError, InvariantViolation, NumericalPrecisionError, PolynomialParseError
from .field import build_field
from .grid import read_pointset, write_pointset
from .harness import (ExperimentConfig, HypothesisViolation, run_sharpness_suite, run_sweep, sample_subset,
                      threshold_search)
from .polynomial import parse_polynomial
from .resultant import bound_ledger, delta_k, energy, nu_profile
from .varieties import (check_variety, construct_isotropic_example, construct_sharp_example,
                        construct_subfield_example, named_variety, zero_set)

EXIT_INPUT = 1
EXIT_INVARIANT = 3


class InvariantFailure(Exception):
    pass


def _emit(args, payload: dict, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        print(text)


def _sizes(spec: str) -> list[int]:
    parts = spec.split(":")
    if len(parts) == 1:
        return [int(parts[0])]
    lo, hi = int(parts[0]), int(parts[1])
    step = int(parts[2]) if len(parts) > 2 else 1
    if step < 1 or hi < lo:
        raise ValueError(f"bad size schedule {spec!r}")
    return list(range(lo, hi + 1, step))


def _int_list(spec: str) -> list[int]:
    return [int(x) for x in spec.split(",") if x.strip()]


# -- commands ------------------------------------------------------------------------

def cmd_field_info(args):
    info = build_field(args.p, args.n).info()
    _emit(args, info, "\n".join(f"{k}: {v}" for k, v in info.items()))


def cmd_variety_check(args):
    field = build_field(args.p, args.n)
    out = check_variety(field, args.d, args.poly)
    lines = [f"polynomial: {out['polynomial']}", f"|V| = {out['size']}"]
    if out["regularity"]:
        r = out["regularity"]
        lines.append(f"c_size = {r['c_size']:.6g}  c_decay = {r['c_decay']:.6g}  argmax m = {r['argmax_m']}  "
                     f"regular = {r['is_regular']}")
    if "linear_factors" in out:
        lines.append("linear factors: " + (", ".join(out["linear_factors"]) or "none"))
    _emit(args, out, "\n".join(lines))


def cmd_make_set(args):
    field = build_field(args.p, args.n)
    if args.construction:
        build = {"sharp": construct_sharp_example, "isotropic": construct_isotropic_example,
                 "subfield": construct_subfield_example}[args.construction]
        E = build(field, args.d)
    else:
        E, _, _ = named_variety(field, args.d, args.variety)
        if args.sample is not None:
            E = sample_subset(E, args.sample, args.seed)
    write_pointset(E, args.out)
    _emit(args, {"out": args.out, "size": len(E)}, f"wrote {len(E)} points to {args.out}")


def cmd_delta(args):
    E = read_pointset(args.set)
    D = delta_k(E, args.k)
    text = (f"|E| = {len(E)}, k = {args.k}\nDelta_k = {list(D.values)}\n"
            f"|Delta_k| = {len(D)}  covers F_q^*: {D.covers_star}  covers F_q: {D.covers_full}")
    _emit(args, D.to_dict(), text)


def cmd_nu(args):
    E = read_pointset(args.set)
    prof = nu_profile(E, args.k)
    bad = prof.bound_violations()
    lines = [f"{'t':>4} {'nu':>12} {'M_t':>14} {'R_t':>14}"]
    for t in range(prof.q):
        mark = "" if prof.admissible[t] else "  (outside decay range)"
        lines.append(f"{t:>4} {prof.counts[t]:>12} {prof.main[t]:>14.4f} {prof.remainder[t]:>14.4f}{mark}")
    lines.append(f"R bound = {prof.remainder_bound:.6g} (alt {prof.remainder_bound_alt:.6g}); "
                 f"brute checked: {prof.brute_checked}")
    payload = prof.to_dict()
    payload["bound_violations"] = bad
    _emit(args, payload, "\n".join(lines))
    if bad:
        raise InvariantFailure(f"remainder bound violated at t = {bad}")


def cmd_energy(args):
    E = read_pointset(args.set)
    val = energy(E, args.k, args.method)
    _emit(args, asdict(val), f"Lambda_{val.k}(E) = {val.value}  [{val.method}]")


def cmd_ledger(args):
    E = read_pointset(args.set)
    Q = parse_polynomial(args.variety_poly, E.field, E.d)
    V = zero_set(Q)
    led = bound_ledger(E, V, args.k, variety_poly=Q, margin=args.margin)
    lines = [f"|E| = {led.size}, q = {led.q}, d = {led.d}, k = {led.k}",
             f"energies: {led.energies}"]
    for r in led.records:
        if not r.applicable:
            lines.append(f"  {r.name:<24} n/a  {r.note}")
            continue
        flag = {True: "PASS", False: "FAIL", None: "    "}[r.passed]
        const = f"{r.constant:.6g}" if r.constant is not None else "-"
        lines.append(f"  {r.name:<24} {flag} left={r.left:.6g} right={r.right:.6g} ratio={const}  {r.note}")
    _emit(args, led.to_dict(), "\n".join(lines))
    if led.failures():
        raise InvariantFailure("ledger rows failed: " + ", ".join(r.name for r in led.failures()))


def cmd_sweep(args):
    cfg = ExperimentConfig(p=args.p, n=args.n, d=args.d, k=args.k, sizes=_sizes(args.sizes),
                           variety=args.variety, trials=args.trials, seed=args.seed, C=args.C,
                           theorem=args.theorem, clamp_to_variety=args.clamp, controls=not args.no_controls,
                           exhaustive=args.exhaustive)
    res = run_sweep(cfg)
    if args.out:
        res.write_csv(args.out)
    else:
        sys.stdout.write(res.to_csv())
    if args.json:
        res.write_json(args.json)
    for row in res.summary["per_size"]:
        print(f"size {row['size']}: {row['covered']}/{row['trials']} covered ({res.summary['target']})",
              file=sys.stderr)
    bad = [c for c in res.controls if c.covers_star or c.covers_full]
    if bad:
        raise InvariantFailure(f"control rows unexpectedly covered: {[c.variety for c in bad]}")


def cmd_sharpness(args):
    cases = run_sharpness_suite(_int_list(args.fields), d=args.d, ks=tuple(_int_list(args.k)))
    payload = [asdict(c) for c in cases]
    lines = []
    for c in cases:
        if c.skipped:
            lines.append(f"SKIP {c.construction:<10} q={c.q:<4} d={c.d}  ({c.skipped})")
        else:
            lines.append(f"{'PASS' if c.passed else 'FAIL'} {c.construction:<10} q={c.q:<4} d={c.d} k={c.k} "
                         f"|E|={c.size} |Delta|={len(c.delta)}  {c.expected}")
    _emit(args, {"cases": payload}, "\n".join(lines))
    if any(c.passed is False for c in cases):
        raise InvariantFailure("sharpness construction failed")


def cmd_threshold(args):
    field = build_field(args.p, args.n)
    V, _, label = named_variety(field, args.d, args.variety)
    res = threshold_search(V, args.k, args.trials, args.seed)
    payload = asdict(res)
    payload["variety"] = label
    if not res.transition:
        text = f"{label}: no transition (coverage fails even at |E| = |V| = {len(V)})"
    else:
        text = (f"{label}: threshold |E| = {res.size} (log_q = {res.log_q_size:.4f}; t1 exponent "
                f"{res.exponent_t1:.4f}" + (f", t2 exponent {res.exponent_t2:.4f}" if res.exponent_t2 else "")
                + f")\n covers at size: {res.covers_at_size}; covers at half ({res.half_size}): {res.covers_at_half}")
    _emit(args, payload, text)


# -- parser ----------------------------------------------------------------------------

def _field_args(p, n_default=1):
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, default=n_default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ffr", description="k-resultant modulus sets over finite fields")
    sub = parser.add_subparsers(dest="command", required=True)

    fld = sub.add_parser("field", help="field information").add_subparsers(dest="action", required=True)
    p = fld.add_parser("info")
    _field_args(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_field_info)

    var = sub.add_parser("variety", help="variety certification").add_subparsers(dest="action", required=True)
    p = var.add_parser("check")
    _field_args(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--poly", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_variety_check)

    p = sub.add_parser("make-set", help="write a point set file")
    _field_args(p)
    p.add_argument("--d", type=int, required=True)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--variety", help="sphere:J | paraboloid | poly:EXPR")
    grp.add_argument("--construction", choices=["sharp", "isotropic", "subfield"])
    p.add_argument("--sample", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_make_set)

    for name, func in (("delta", cmd_delta), ("nu", cmd_nu)):
        p = sub.add_parser(name)
        p.add_argument("--set", required=True)
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("energy")
    p.add_argument("--set", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=["brute", "spectral", "both"], default="both")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("ledger")
    p.add_argument("--set", required=True)
    p.add_argument("--variety-poly", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--margin", type=float, default=4.0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ledger)

    p = sub.add_parser("sweep", help="randomized theorem sweep, CSV on stdout or --out")
    p.add_argument("--theorem", choices=["t1", "t2"], required=True)
    _field_args(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--variety", default="sphere:1")
    p.add_argument("--C", type=float, default=4.0)
    p.add_argument("--sizes", required=True, help="LO:HI:STEP or a single size")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--json", metavar="SUMMARY.json")
    p.add_argument("--clamp", action="store_true", help="clamp sizes above |V| to |V|")
    p.add_argument("--exhaustive", action="store_true", help="also check every subset (|V| <= 20)")
    p.add_argument("--no-controls", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("sharpness")
    p.add_argument("--fields", default="5,9,13,25")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--k", default="2,3")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sharpness)

    p = sub.add_parser("threshold")
    _field_args(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--variety", default="sphere:1")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_threshold)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (InvariantFailure, InvariantViolation, NumericalPrecisionError) as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (FieldError, PolynomialParseError, HypothesisViolation, BudgetExceededError,
            ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
