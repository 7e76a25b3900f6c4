"""Indicator splitting and one-variable integration of terms."""

from __future__ import annotations

from functools import lru_cache

from randdiv.engine.forms import AffineForm, Term
from randdiv.engine.feasibility import resolve_constraints
from randdiv.exact_math import mpoly_integrate_between


class UnboundedVariable(ValueError):
    pass


def bounds_of(constraints, var: int) -> tuple[list[AffineForm], list[AffineForm], list[AffineForm]]:
    """Split constraints into lower bounds, upper bounds (as expressions) and the rest."""
    lowers, uppers, rest = [], [], []
    for f in constraints:
        a = f.x[var]
        if not a:
            rest.append(f)
        elif a > 0:
            lowers.append(f.solve_for(var))
        else:
            uppers.append(f.solve_for(var))
    return lowers, uppers, rest


def _split_constraints(constraints: frozenset, var: int):
    lowers, uppers, rest = bounds_of(constraints, var)
    if not lowers or not uppers:
        side = "below" if not lowers else "above"
        raise UnboundedVariable(f"x{var + 1} is unbounded {side}")
    lowers.sort()
    uppers.sort()
    cases = []
    for j, alpha in enumerate(lowers):
        for i, beta in enumerate(uppers):
            cons = set(rest)
            cons.add((beta - alpha).normalized())
            cons.update((alpha - other).normalized() for q, other in enumerate(lowers) if q != j)
            cons.update((other - beta).normalized() for s, other in enumerate(uppers) if s != i)
            cases.append((alpha, beta, frozenset(cons)))
    return cases


def split_indicator_product(t: Term, var: int) -> list[tuple[AffineForm, AffineForm, Term]]:
    """Expand the product of indicators on ``x_var`` into disjoint bounded cases.

    Each case ``(lower, upper, residual)`` integrates ``x_var`` over
    ``(lower, upper)``; the residual constraints say that this lower bound is
    the largest, this upper bound the smallest, and that the two are ordered.
    """
    return [(lo, hi, Term(t.coeff, cons)) for lo, hi, cons in _split_constraints(t.constraints, var)]


@lru_cache(maxsize=1 << 16)
def split_and_resolve(constraints: frozenset, var: int, prune: bool):
    """Split cases with each residual constraint set already canonicalized."""
    out = []
    for lo, hi, cons in _split_constraints(constraints, var):
        resolved = resolve_constraints(cons, prune)
        if resolved:
            out.append((lo, hi, resolved))
    return tuple(out)


def integrate_out(t: Term, var: int) -> list[Term]:
    """Integrate ``x_var`` out of ``t``; no output term mentions ``x_var``."""
    nvars = t.coeff.nvars
    out = []
    for lo, hi, residual in split_indicator_product(t, var):
        coeff = mpoly_integrate_between(t.coeff, var, lo.to_poly(nvars), hi.to_poly(nvars))
        out.append(Term(coeff, residual.constraints))
    return out
