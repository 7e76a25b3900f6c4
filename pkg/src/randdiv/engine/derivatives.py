"""Right derivatives of P_{n,k} at eps = 0.

Two independent routes:

* ``engine-diff`` differentiates the first piece produced by
  :func:`compute_pnk`;
* ``delta`` differentiates the indicator integral directly.  Each
  derivative turns one eps-dependent indicator ``1[g]`` into
  ``g_eps * delta(g)``, and the delta is integrated away by solving
  ``g = 0`` for one of its x-variables.  The surviving integrals are then
  evaluated at eps = 0 with the ordinary elimination integrator.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Optional

from randdiv.engine.forms import AffineForm, build_initial_term
from randdiv.engine.pipeline import BudgetExceeded, EngineOptions, compute_pnk, eliminate
from randdiv.exact_math import MultiPoly

BACKENDS = ("engine-diff", "delta")
DEFAULT_DELTA_BUDGET = 10**6

# frozenset of normalized forms -> Fraction weight
DeltaTerms = dict


def _near_zero(f: AffineForm) -> bool:
    """Truth value of ``1[f]`` for eps in a right neighbourhood of zero."""
    return f.const > 0 or (f.const == 0 and f.eps > 0)


def _settle(forms) -> Optional[frozenset]:
    """Drop x-free forms that hold near eps = 0+; None if one fails."""
    out = set()
    for f in forms:
        if f.is_x_free():
            if not _near_zero(f):
                return None
        else:
            out.add(f)
    return frozenset(out)


def differentiate_once(terms: DeltaTerms, budget: int = DEFAULT_DELTA_BUDGET) -> DeltaTerms:
    out: DeltaTerms = {}
    for forms, weight in terms.items():
        for g in forms:
            if not g.eps or g.is_x_free():
                continue
            v = max(g.variables())
            root = g.solve_for(v)
            w = weight * Fraction(g.eps) / abs(g.x[v])
            settled = _settle(h.substitute(v, root).normalized() for h in forms if h is not g)
            if settled is None:
                continue
            out[settled] = out.get(settled, Fraction(0)) + w
            if len(out) > budget:
                raise BudgetExceeded(f"delta-term budget {budget} exceeded", budget="term-budget",
                                     live_terms=len(out))
    return {k: v for k, v in out.items() if v}


def volume_at_zero(terms: DeltaTerms, n: int, options: EngineOptions = EngineOptions()) -> Fraction:
    """Sum of weight * volume of each form system with eps set to 0."""
    grouped: dict = {}
    for forms, weight in terms.items():
        at_zero = set()
        dead = False
        for f in forms:
            g = AffineForm(f.const, 0, f.x).normalized()
            if g.is_constant():
                if g.const <= 0:
                    dead = True
                    break
                continue
            at_zero.add(g)
        if dead:
            continue
        variables = sorted({v for f in at_zero for v in f.variables()})
        key = (frozenset(at_zero), tuple(variables))
        grouped[key] = grouped.get(key, Fraction(0)) + weight
    total = Fraction(0)
    for (forms, variables), weight in grouped.items():
        if not weight:
            continue
        remaining = eliminate({forms: MultiPoly.const(n + 1, 1)}, variables, options)
        for cons, coeff in remaining.items():
            if cons:
                raise ValueError("leftover constraints after eps = 0 volume evaluation")
            total += weight * coeff.constant_term()
    return total


def derivatives_at_zero(n: int, k: int, j_max: int, backend: str = "delta",
                        options: EngineOptions = EngineOptions()) -> list[Fraction]:
    """Values of d^j P_{n,k} / d eps^j at eps -> 0+, for j = 0..j_max."""
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")
    if j_max < 0 or j_max > n:
        raise ValueError("need 0 <= j_max <= n")
    if k >= n:
        return [Fraction(1)] + [Fraction(0)] * j_max
    if backend == "engine-diff":
        return compute_pnk(n, k, options).pieces[0].derivatives_at(0, j_max)

    start = build_initial_term(n, k)
    terms: DeltaTerms = {start.constraints: Fraction(1)}
    scale = factorial(n)
    out = []
    for j in range(j_max + 1):
        if j:
            terms = differentiate_once(terms, min(options.term_budget, DEFAULT_DELTA_BUDGET))
        out.append(scale * volume_at_zero(terms, n, options))
    return out
