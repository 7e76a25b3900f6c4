"""Cross-validation matrix: every method checked against an independent one."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import ceil, comb
from typing import Any, Callable, Iterator, Optional

from randdiv import catalan3d as c3
from randdiv import closed_forms as cf
from randdiv.discrete_model import (
    DiscreteConfig,
    brute_force_admissible,
    count_admissible,
    limit_ratio,
)
from randdiv.engine import EngineOptions, compute_pnk, derivatives_at_zero
from randdiv.exact_math import PiecewisePoly, UPoly, format_rational, pw_eval
from randdiv.montecarlo import TrialPlan, estimate


def _fmt(v: Any) -> Any:
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, PiecewisePoly):
        return v.to_json_obj()
    if isinstance(v, UPoly):
        return v.render()
    if isinstance(v, (list, tuple)):
        return [_fmt(x) for x in v]
    return v


@dataclass
class CheckRecord:
    check: str
    params: dict
    a: Any
    b: Any
    passed: bool
    runtime: float = 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["a"], d["b"] = _fmt(self.a), _fmt(self.b)
        d["status"] = "pass" if self.passed else "fail"
        del d["passed"]
        return d


@dataclass
class ValidationReport:
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def add(self, check: str, params: dict, fn: Callable[[], tuple[Any, Any, bool]]) -> CheckRecord:
        t0 = time.perf_counter()
        a, b, ok = fn()
        rec = CheckRecord(check, params, a, b, bool(ok), round(time.perf_counter() - t0, 4))
        self.records.append(rec)
        return rec

    def summary(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for r in self.records:
            s = out.setdefault(r.check, {"pass": 0, "fail": 0})
            s["pass" if r.passed else "fail"] += 1
        return out

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "summary": self.summary(),
            "checks": [r.to_dict() for r in self.records],
        }


# --------------------------------------------------------------------------
# shared predicates
# --------------------------------------------------------------------------

def support_end(n: int, k: int) -> Fraction:
    """Largest eps with P_{n,k}(eps) > 0, or 1 when the support is everything."""
    groups = ceil(n / k)
    return Fraction(1) if groups < 2 else Fraction(1, groups - 1)


def nonincreasing(f: PiecewisePoly, samples: int = 16) -> bool:
    for a, b, p in f.intervals():
        d = p.derivative()
        pts = [a + (b - a) * Fraction(i, samples) for i in range(samples + 1)]
        if any(d(x) > 0 for x in pts):
            return False
    return True


def structural_problems(f: PiecewisePoly, n: int, k: int) -> list[str]:
    problems = []
    if pw_eval(f, 0) != 1:
        problems.append("P(0) != 1")
    if not f.is_continuous():
        problems.append("discontinuous at a breakpoint")
    if not nonincreasing(f):
        problems.append("increasing somewhere")
    end = support_end(n, k)
    last_nonzero = max((b for a, b, p in f.intervals() if not p.is_zero()), default=Fraction(0))
    if last_nonzero != end:
        problems.append(f"support ends at {last_nonzero}, expected {end}")
    if any(p.degree > n for p in f.pieces):
        problems.append("piece degree exceeds n")
    return problems


def interior_points(lo: Fraction, hi: Fraction, count: int = 3, grid: int = 100) -> list[Fraction]:
    """``count`` points spread inside (lo, hi), snapped to multiples of 1/grid when possible."""
    out = []
    for i in range(1, count + 1):
        x = lo + (hi - lo) * Fraction(i, count + 1)
        snapped = Fraction(round(x * grid), grid)
        out.append(snapped if lo < snapped < hi and snapped not in out else x)
    return out


def closed_form_targets(max_n: int) -> Iterator[tuple[str, int, int, Fraction, Fraction, UPoly]]:
    """(family, n, k, lo, hi, poly) for every closed form with n <= max_n."""
    for n in range(2, max_n + 1):
        hi = Fraction(1, n - 1)
        yield "k1", n, 1, Fraction(0), hi, cf.p_n1(n).pieces[0]
    for m in range(2, max_n // 2 + 1):
        f = cf.p_2m_2(m)
        yield "even_k2", 2 * m, 2, f.valid_range[0], f.valid_range[1], f.poly
    for m in range(1, (max_n - 1) // 2 + 1):
        f = cf.p_2m1_2(m)
        yield "odd_k2", 2 * m + 1, 2, f.valid_range[0], f.valid_range[1], f.poly


# every case sits inside a range covered by a closed form or the n=3 oracle
MC_CASES = [
    (2, 1, Fraction(1, 2)), (3, 1, Fraction(1, 10)), (4, 1, Fraction(1, 10)), (6, 1, Fraction(1, 20)),
    (8, 1, Fraction(1, 50)), (4, 2, Fraction(3, 5)), (6, 2, Fraction(2, 5)), (8, 2, Fraction(13, 50)),
    (3, 2, Fraction(3, 5)), (5, 2, Fraction(7, 20)), (7, 2, Fraction(13, 50)), (3, 2, Fraction(1, 5)),
]


# --------------------------------------------------------------------------
# the matrix
# --------------------------------------------------------------------------

def run_validation(max_n: int = 8, max_lmn: int = 8, trials: int = 10**6, seed: int = 0,
                   max_word_len: int = 10,
                   options: EngineOptions = EngineOptions(),
                   progress: Optional[Callable[[CheckRecord], None]] = None) -> ValidationReport:
    report = ValidationReport()
    cache: dict[tuple[int, int], PiecewisePoly] = {}

    def pnk(n: int, k: int) -> PiecewisePoly:
        if (n, k) not in cache:
            cache[(n, k)] = compute_pnk(n, k, options)
        return cache[(n, k)]

    def add(check, params, fn):
        rec = report.add(check, params, fn)
        if progress:
            progress(rec)

    # exact families against closed forms
    for n in range(2, max_n + 1):
        add("k1 family vs closed form", {"n": n},
            lambda n=n: (pnk(n, 1), cf.p_n1(n), pnk(n, 1) == cf.p_n1(n)))
    for m in range(2, max_n // 2 + 1):
        def even(m=m):
            f = cf.p_2m_2(m)
            got = pnk(2 * m, 2).restrict(*f.valid_range)
            return got, f.poly, got == [f.poly]
        add("even k2 family vs closed form", {"m": m, "n": 2 * m}, even)
    for m in range(1, (max_n - 1) // 2 + 1):
        def odd(m=m):
            f = cf.p_2m1_2(m)
            got = pnk(2 * m + 1, 2).restrict(*f.valid_range)
            return got, f.poly, got == [f.poly]
        add("odd k2 family vs closed form", {"m": m, "n": 2 * m + 1}, odd)
    if max_n >= 3:
        range_poly = UPoly((1, 0, -3, 2))
        add("n=3 range-distribution oracle", {"n": 3, "k": 2},
            lambda: (pnk(3, 2), range_poly, pnk(3, 2) == PiecewisePoly([0, 1], [range_poly])))

    # derivative backends
    for n in range(2, min(5, max_n) + 1):
        for k in range(1, n):
            def derivs(n=n, k=k):
                a = derivatives_at_zero(n, k, n, "engine-diff", options)
                b = derivatives_at_zero(n, k, n, "delta", options)
                return a, b, a == b
            add("derivative backends agree", {"n": n, "k": k}, derivs)

    # structural invariants on every computed (n, k)
    for n in range(2, max_n + 1):
        for k in range(1, n):
            def structure(n=n, k=k):
                problems = structural_problems(pnk(n, k), n, k)
                return problems, [], not problems
            add("structural invariants", {"n": n, "k": k}, structure)

    # discrete model
    def grid():
        bad = []
        for r in range(1, 9):
            for n in range(0, 7):
                for l in range(1, r + 1):
                    for k in range(1, 4):
                        cfg = DiscreteConfig(r, n, l, k)
                        if count_admissible(cfg) != brute_force_admissible(cfg):
                            bad.append([r, n, l, k])
        return bad, [], not bad
    add("discrete DP vs brute force", {"r<=": 8, "n<=": 6, "k<=": 3}, grid)

    def k1_closed():
        bad = []
        for r in range(1, 51):
            for n in range(0, 9):
                for l in range(1, r + 1):
                    free = r - (n - 1) * (l - 1)
                    want = comb(free, n) if free >= n else 0
                    if count_admissible(DiscreteConfig(r, n, l, 1)) != want:
                        bad.append([r, n, l])
        return bad, [], not bad
    add("discrete k=1 gap-removal closed form", {"r<=": 50, "n<=": 8}, k1_closed)

    for family, n, k, lo, hi, poly in closed_form_targets(max_n):
        for eps in interior_points(lo, hi):
            def conv(n=n, k=k, eps=eps, poly=poly):
                exact = poly(eps)
                (_, _, r100), (_, _, r400) = limit_ratio(n, k, eps, [100, 400])
                e100, e400 = abs(r100 - exact), abs(r400 - exact)
                return float(e100), float(e400), e400 < e100
            add("discrete convergence r=100 -> r=400",
                {"family": family, "n": n, "k": k, "eps": format_rational(eps)}, conv)

    # generalized Catalan numbers
    def words_vs_dp():
        bad = []
        for total in range(0, max_word_len + 1):
            for l in range(total + 1):
                for m in range(total - l + 1):
                    n = total - l - m
                    if c3.enumerate_words(l, m, n, budget=max_word_len) != c3.count_paths_dp(l, m, n):
                        bad.append([l, m, n])
        return bad, [], not bad
    add("words vs lattice DP", {"l+m+n<=": max_word_len}, words_vs_dp)

    def formula_vs_dp():
        bad = []
        for l in range(max_lmn + 1):
            for m in range(max_lmn + 1):
                for n in range(max_lmn + 1):
                    if m + n < l + 2:
                        q = c3.q3d_formula(l, m, n)
                        s = c3.total_words(l, m, n)
                        q1, q2, q12 = c3.reflection_counts(l, m, n)
                        if q != c3.count_paths_dp(l, m, n) or s - q1 - q2 + q12 != q:
                            bad.append([l, m, n])
        return bad, [], not bad
    add("closed form and inclusion-exclusion vs DP", {"l,m,n<=": max_lmn}, formula_vs_dp)

    def classical():
        bad = [m for m in range(1, 13) if c3.q3d_formula(m, m, 0) != cf.catalan(m)]
        return bad, [], not bad
    add("Q(m,m,0) is the classical Catalan number", {"m<=": 12}, classical)

    def general_vs_dp():
        bad = []
        for l in range(max_lmn + 1):
            for m in range(l + 1):
                for n in range(l + 1):
                    if c3.q3d_general(l, m, n) != c3.count_paths_dp(l, m, n):
                        bad.append([l, m, n])
        return bad, [], not bad
    add("general form vs DP on m,n<=l", {"l,m,n<=": max_lmn}, general_vs_dp)

    if max_lmn >= 3:
        add("general form at (3,3,2)", {"l": 3, "m": 3, "n": 2},
            lambda: (c3.q3d_general(3, 3, 2), c3.count_paths_dp(3, 3, 2),
                     c3.q3d_general(3, 3, 2) == c3.count_paths_dp(3, 3, 2)))

        def printed_fails():
            printed = c3.q3d_general(3, 3, 2, printed=True)
            dp = c3.count_paths_dp(3, 3, 2)
            return printed, dp, printed != dp
        add("printed correction form disagrees at (3,3,2)", {"l": 3, "m": 3, "n": 2}, printed_fails)

    # Monte Carlo
    for i, (n, k, eps) in enumerate(MC_CASES):
        if n > max_n:
            continue

        def mc(n=n, k=k, eps=eps, i=i):
            exact = pw_eval(pnk(n, k), eps)
            est = estimate(TrialPlan(n, k, float(eps), trials, seed + i))
            dev = abs(est.p_hat - float(exact))
            return est.p_hat, float(exact), dev <= 4 * est.stderr
        add("Monte Carlo within 4 stderr", {"n": n, "k": k, "eps": format_rational(eps), "trials": trials}, mc)

    return report
