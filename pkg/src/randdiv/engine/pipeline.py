"""Exact P_{n,k}(eps) by iterated symbolic integration."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Optional

from randdiv.engine.feasibility import eps_interval
from randdiv.engine.forms import Term, build_initial_term
from randdiv.engine.integrate import bounds_of, split_and_resolve
from randdiv.exact_math import MultiPoly, PiecewisePoly, UPoly, mpoly_integrate_between

log = logging.getLogger(__name__)

DEFAULT_TERM_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    """Raised when a computation outgrows its configured budget."""

    def __init__(self, message: str, *, budget: str = "term-budget",
                 live_terms: Optional[int] = None, remaining_vars: Optional[int] = None):
        super().__init__(message)
        self.budget = budget
        self.live_terms = live_terms
        self.remaining_vars = remaining_vars


@dataclass(frozen=True)
class EngineOptions:
    order: str = "ascending"  # or "greedy"
    term_budget: int = DEFAULT_TERM_BUDGET
    prune: bool = True

    def __post_init__(self):
        if self.order not in ("ascending", "greedy"):
            raise ValueError(f"unknown elimination order {self.order!r}")
        if self.term_budget < 1:
            raise ValueError("term budget must be positive")


TermMap = dict  # frozenset of constraints -> MultiPoly coefficient


def _choose_var(terms: TermMap, remaining: list[int], order: str) -> int:
    if order == "ascending":
        return remaining[0]
    best = None
    for v in remaining:
        cost = 0
        for cons in terms:
            lowers, uppers, _ = bounds_of(cons, v)
            cost += len(lowers) * len(uppers)
        if best is None or cost < best[0]:
            best = (cost, v)
    return best[1]


def eliminate(terms: TermMap, variables: Iterable[int], options: EngineOptions = EngineOptions()) -> TermMap:
    """Integrate the given x-variables out of every term.

    Terms with identical constraint sets are merged after each round by
    adding their coefficients.
    """
    remaining = list(variables)
    while remaining:
        var = _choose_var(terms, remaining, options.order)
        remaining.remove(var)
        new: TermMap = {}
        for cons, coeff in terms.items():
            nvars = coeff.nvars
            for lo, hi, resolved in split_and_resolve(cons, var, options.prune):
                c2 = mpoly_integrate_between(coeff, var, lo.to_poly(nvars), hi.to_poly(nvars))
                if c2.is_zero():
                    continue
                for key in resolved:
                    prev = new.get(key)
                    new[key] = c2 if prev is None else prev + c2
            if len(new) > options.term_budget:
                raise BudgetExceeded(
                    f"term budget {options.term_budget} exceeded: {len(new)} live terms, "
                    f"{len(remaining) + 1} variables remaining",
                    live_terms=len(new), remaining_vars=len(remaining) + 1)
        terms = {k: v for k, v in new.items() if not v.is_zero()}
        log.debug("eliminated x%d: %d live terms", var + 1, len(terms))
    return terms


def assemble_piecewise(final_terms: Iterable[Term]) -> PiecewisePoly:
    """Sum eps-only terms into a piecewise polynomial on [0, 1]."""
    spans = []
    for t in final_terms:
        for f in t.constraints:
            if not f.is_x_free():
                raise ValueError(f"constraint {f} still mentions an x variable")
        box = eps_interval(t.constraints)
        if box is None:
            continue
        poly = t.coeff.to_upoly(t.coeff.nvars - 1)
        spans.append((box, poly))
    cuts = sorted({Fraction(0), Fraction(1)} | {b for box, _ in spans for b in box})
    pieces = []
    for a, b in zip(cuts, cuts[1:]):
        total = UPoly()
        for (lo, hi), poly in spans:
            if lo <= a and b <= hi:
                total = total + poly
        pieces.append(total)
    return PiecewisePoly(cuts, pieces)


def compute_pnk(n: int, k: int, options: EngineOptions = EngineOptions()) -> PiecewisePoly:
    """P_{n,k}(eps) as an exact piecewise polynomial on [0, 1]."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    if k >= n:
        return PiecewisePoly.constant(1)
    start = build_initial_term(n, k)
    terms = eliminate({start.constraints: start.coeff}, range(n), options)
    scale = factorial(n)
    final = [Term(coeff.scale(scale), cons) for cons, coeff in terms.items()]
    return assemble_piecewise(final)


def differentiate_first_piece(f: PiecewisePoly, j_max: int) -> list[Fraction]:
    return f.pieces[0].derivatives_at(0, j_max)


__all__ = [
    "BudgetExceeded", "EngineOptions", "assemble_piecewise", "compute_pnk",
    "eliminate", "differentiate_first_piece", "MultiPoly",
]
