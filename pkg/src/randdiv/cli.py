"""Command-line entry point.

Exit codes: 0 ok, 1 validation failure, 2 bad arguments, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from randdiv import catalan3d as c3
from randdiv import closed_forms as cf
from randdiv.discrete_model import (
    DEFAULT_ENUM_BUDGET,
    DiscreteConfig,
    EnumerationBudgetExceeded,
    brute_force_admissible,
    convergence_csv,
    count_admissible,
    count_total,
    limit_ratio,
)
from randdiv.engine import BudgetExceeded, EngineOptions, compute_pnk, derivatives_at_zero
from randdiv.engine.pipeline import DEFAULT_TERM_BUDGET
from randdiv.exact_math import PiecewisePoly, format_rational, parse_rational, pw_eval
from randdiv.montecarlo import TrialPlan, estimate, sweep_csv
from randdiv.validation import run_validation

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")


def _options(args) -> EngineOptions:
    return EngineOptions(order=args.order, term_budget=args.term_budget, prune=not args.no_prune)


def render_piecewise(f: PiecewisePoly, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(f.to_json_obj())
    if fmt == "pretty":
        return f.render()
    width = max(len(p.coeffs) for p in f.pieces) or 1
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lo", "hi"] + [f"c{i}" for i in range(width)])
    for a, b, p in f.intervals():
        coeffs = [format_rational(c) for c in p.coeffs]
        coeffs += ["0"] * (width - len(coeffs))
        w.writerow([format_rational(a), format_rational(b)] + coeffs)
    return buf.getvalue().rstrip("\n")


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_exact(args) -> int:
    f = compute_pnk(args.n, args.k, _options(args))
    print(render_piecewise(f, args.format))
    return EXIT_OK


def cmd_eval(args) -> int:
    if not 0 <= args.eps <= 1:
        raise UsageError("--eps must lie in [0, 1]")
    f = compute_pnk(args.n, args.k, _options(args))
    value = pw_eval(f, args.eps)
    if args.format == "json":
        print(json.dumps({"n": args.n, "k": args.k, "eps": format_rational(args.eps),
                          "value": format_rational(value), "decimal": float(value)}))
    else:
        print(format_rational(value))
    return EXIT_OK


def cmd_closed(args) -> int:
    if args.family == "n1":
        f = cf.p_n1(args.n)
        text = render_piecewise(f, args.format)
    else:
        builder = cf.p_2m_2 if args.family == "2m_2" else cf.p_2m1_2
        r = builder(args.m)
        lo, hi = r.valid_range
        if args.format == "json":
            text = json.dumps({"valid_range": [format_rational(lo), format_rational(hi)],
                               "coeffs": [format_rational(c) for c in r.poly.coeffs]})
        else:
            text = f"{r.poly.render()} on ({format_rational(lo)},{format_rational(hi)})"
    print(text)
    return EXIT_OK


def cmd_mc(args) -> int:
    plan = TrialPlan(args.n, args.k, float(args.eps), args.trials, args.seed)
    est = estimate(plan, workers=args.workers)
    exact = None
    if args.exact:
        exact = float(pw_eval(compute_pnk(args.n, args.k), args.eps))
    sys.stdout.write(sweep_csv([(plan, est, exact)]))
    return EXIT_OK


def cmd_discrete(args) -> int:
    if args.r is not None:
        if args.l is None:
            raise UsageError("--r needs --l")
        cfg = DiscreteConfig(args.r, args.n, args.l, args.k)
        out = {"r": cfg.r, "n": cfg.n, "l": cfg.l, "k": cfg.k,
               "admissible": count_admissible(cfg), "total": count_total(cfg.r, cfg.n)}
        if args.brute_force:
            out["brute_force"] = brute_force_admissible(cfg, args.enum_budget)
        print(json.dumps(out))
        return EXIT_OK
    if args.eps is None:
        raise UsageError("give either --r/--l or --eps")
    exact = None
    if args.exact:
        exact = pw_eval(compute_pnk(args.n, args.k), args.eps)
    rows = limit_ratio(args.n, args.k, args.eps, args.r_list)
    sys.stdout.write(convergence_csv(rows, exact))
    return EXIT_OK


def cmd_catalan3d(args) -> int:
    rows = []
    for l in range(args.l_max + 1):
        for m in range(args.m_max + 1):
            for n in range(args.n_max + 1):
                row = {"l": l, "m": m, "n": n, "dp": c3.count_paths_dp(l, m, n),
                       "total": c3.total_words(l, m, n)}
                q1, q2, q12 = c3.reflection_counts(l, m, n)
                row.update(q1=q1, q2=q2, q12=q12)
                row["formula"] = c3.q3d_formula(l, m, n) if m + n < l + 2 else None
                row["general"] = c3.q3d_general(l, m, n) if m <= l and n <= l else None
                if args.words:
                    row["words"] = c3.enumerate_words(l, m, n, budget=args.enum_budget)
                rows.append(row)
    if args.format == "json":
        print(json.dumps(rows))
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: "" if v is None else v for k, v in row.items()})
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_derivs(args) -> int:
    values = derivatives_at_zero(args.n, args.k, args.j_max, args.backend, _options(args))
    if args.format == "json":
        print(json.dumps({"n": args.n, "k": args.k, "backend": args.backend,
                          "derivatives": [format_rational(v) for v in values]}))
    else:
        print(" ".join(format_rational(v) for v in values))
    return EXIT_OK


def cmd_validate(args) -> int:
    def progress(rec):
        if args.verbose:
            print(f"[{'pass' if rec.passed else 'FAIL'}] {rec.check} {rec.params}", file=sys.stderr)
    report = run_validation(args.max_n, args.max_lmn, args.trials, args.seed,
                            options=_options(args), progress=progress)
    text = json.dumps(report.to_dict(), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK if report.passed else EXIT_FAIL


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--order", choices=["ascending", "greedy"], default="ascending")
    p.add_argument("--term-budget", type=int, default=DEFAULT_TERM_BUDGET)
    p.add_argument("--no-prune", action="store_true", help="skip exact feasibility pruning")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="randdiv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="P_{n,k}(eps) as a piecewise polynomial")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--format", choices=["pretty", "json", "csv"], default="pretty")
    _engine_flags(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("eval", help="exact value of P_{n,k} at a rational eps")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")
    _engine_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("closed", help="closed-form results")
    p.add_argument("--family", choices=["n1", "2m_2", "2m1_2"], required=True)
    p.add_argument("--n", type=int, help="point count for the n1 family")
    p.add_argument("--m", type=int, help="index for the k=2 families")
    p.add_argument("--format", choices=["pretty", "json", "csv"], default="pretty")
    p.set_defaults(func=cmd_closed)

    p = sub.add_parser("mc", help="Monte Carlo estimate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--exact", action="store_true", help="add the exact value and z-score")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("discrete", help="balls-in-boxes counts and limit ratios")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=_rational)
    p.add_argument("--r-list", type=_int_list, default=[50, 100, 200, 400])
    p.add_argument("--r", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--brute-force", action="store_true")
    p.add_argument("--exact", action="store_true", help="add the absolute error column")
    p.add_argument("--enum-budget", type=int, default=DEFAULT_ENUM_BUDGET)
    p.set_defaults(func=cmd_discrete)

    p = sub.add_parser("catalan3d", help="table of generalized Catalan numbers")
    p.add_argument("--l-max", type=int, default=4)
    p.add_argument("--m-max", type=int, default=4)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--words", action="store_true", help="also count words by enumeration")
    p.add_argument("--enum-budget", type=int, default=c3.DEFAULT_WORD_BUDGET)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_catalan3d)

    p = sub.add_parser("derivs", help="derivatives of P_{n,k} at eps = 0+")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--j-max", type=int)
    p.add_argument("--backend", choices=["delta", "engine-diff"], default="delta")
    p.add_argument("--format", choices=["text", "json"], default="text")
    _engine_flags(p)
    p.set_defaults(func=cmd_derivs)

    p = sub.add_parser("validate", help="run the cross-validation matrix")
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--max-lmn", type=int, default=8)
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="also write the JSON report to this file")
    p.add_argument("-v", "--verbose", action="store_true")
    _engine_flags(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "j_max", "unset") is None:
        args.j_max = args.n
    if args.command == "closed":
        if args.family == "n1" and args.n is None:
            parser.error("--family n1 needs --n")
        if args.family != "n1" and args.m is None:
            parser.error(f"--family {args.family} needs --m")
    try:
        return args.func(args)
    except (BudgetExceeded, EnumerationBudgetExceeded, c3.BudgetExceeded) as exc:
        budget = getattr(exc, "budget", "budget")
        print(f"error: {budget} exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
