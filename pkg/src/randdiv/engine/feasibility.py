"""Exact reasoning about systems of strict affine constraints.

All systems here live over the x-variables plus eps, with eps confined to an
open interval ``(lo, hi)``.  Constraints sharing an x-direction ``g`` reduce
to ``g + h_i(eps) > 0``; only the smallest ``h_i`` matters, which is what
:func:`resolve_constraints` exploits to keep terms small.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Optional

from randdiv.engine.forms import AffineForm, Term

Interval = tuple[Fraction, Fraction]
UNIT = (Fraction(0), Fraction(1))

# h(eps) = c + e*eps, as (c, e)
_Line = tuple[Fraction, Fraction]


def tighten(f: AffineForm, lo: Fraction, hi: Fraction) -> Optional[Interval]:
    """Intersect ``(lo, hi)`` with the eps-set of an x-free constraint."""
    c, e = f.const, f.eps
    if not e:
        return (lo, hi) if c > 0 else None
    root = Fraction(-c) / e
    if e > 0:
        lo = max(lo, root)
    else:
        hi = min(hi, root)
    return (lo, hi) if lo < hi else None


def eps_interval(constraints: Iterable[AffineForm], lo: Fraction = UNIT[0],
                 hi: Fraction = UNIT[1]) -> Optional[Interval]:
    """Interval cut out by the x-free members of ``constraints``."""
    box: Optional[Interval] = (Fraction(lo), Fraction(hi))
    for f in constraints:
        if f.is_x_free():
            box = tighten(f, *box)
            if box is None:
                return None
    return box


def _direction(f: AffineForm) -> tuple[tuple[int, ...], _Line]:
    g = 0
    for a in f.x:
        g = gcd(g, int(a))
    return tuple(int(a) // g for a in f.x), (Fraction(f.const, g), Fraction(f.eps, g))


def _at(h: _Line, eps: Fraction) -> Fraction:
    return h[0] + h[1] * eps


def _dominated(h: _Line, others: Iterable[_Line], lo: Fraction, hi: Fraction) -> bool:
    return any(o != h and _at(o, lo) <= _at(h, lo) and _at(o, hi) <= _at(h, hi) for o in others)


def _reduce(forms: Iterable[AffineForm], lo: Fraction, hi: Fraction):
    """Group by direction, drop dominated members, fold opposite pairs into eps.

    Returns ``(groups, lo, hi)`` with ``groups`` mapping direction to a dict
    ``{h: form}``, or ``None`` when infeasible.
    """
    groups: dict[tuple[int, ...], dict[_Line, AffineForm]] = {}
    for f in forms:
        if f.is_x_free():
            box = tighten(f, lo, hi)
            if box is None:
                return None
            lo, hi = box
            continue
        d, h = _direction(f)
        groups.setdefault(d, {})[h] = f
    for d, members in groups.items():
        if len(members) > 1:
            keep = {h: f for h, f in members.items() if not _dominated(h, members, lo, hi)}
            groups[d] = keep
    for d, members in groups.items():
        neg = tuple(-a for a in d)
        if neg <= d or neg not in groups:
            continue
        for h1 in members:
            for h2 in groups[neg]:
                box = tighten(AffineForm(h1[0] + h2[0], h1[1] + h2[1], ()), lo, hi)
                if box is None:
                    return None
                lo, hi = box
    return groups, lo, hi


def eps_projection(constraints: Iterable[AffineForm], lo: Fraction = UNIT[0],
                   hi: Fraction = UNIT[1]) -> Optional[Interval]:
    """Exact projection of the system onto eps by Fourier-Motzkin elimination.

    Returns the open eps-interval on which the x-system is feasible, or
    ``None`` if it is empty.
    """
    state = _reduce(constraints, Fraction(lo), Fraction(hi))
    while state is not None:
        groups, lo, hi = state
        forms = [f for members in groups.values() for f in members.values()]
        if not forms:
            return lo, hi
        nx = forms[0].n
        best = None
        for v in range(nx):
            pos = sum(1 for f in forms if f.x[v] > 0)
            neg = sum(1 for f in forms if f.x[v] < 0)
            if pos + neg == 0:
                continue
            cost = pos * neg - pos - neg
            if best is None or cost < best[0]:
                best = (cost, v)
        v = best[1]
        lowers = [f for f in forms if f.x[v] > 0]
        uppers = [f for f in forms if f.x[v] < 0]
        rest = [f for f in forms if not f.x[v]]
        for f in lowers:
            for g in uppers:
                rest.append((f.scale(-g.x[v]) + g.scale(f.x[v])).normalized())
        state = _reduce(rest, lo, hi)
    return None


def prune_infeasible(t: Term, eps_range: Interval = UNIT) -> bool:
    """False only if ``t``'s constraints are infeasible with eps in ``eps_range``."""
    return eps_projection(t.constraints, *eps_range) is not None


def _crossings(lines: list[_Line], lo: Fraction, hi: Fraction) -> set[Fraction]:
    out = set()
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            (c1, e1), (c2, e2) = lines[i], lines[j]
            if e1 != e2:
                r = (c2 - c1) / (e1 - e2)
                if lo < r < hi:
                    out.add(r)
    return out


@lru_cache(maxsize=1 << 18)
def resolve_constraints(constraints: frozenset, prune: bool = True) -> tuple[frozenset, ...]:
    """Canonical, redundancy-reduced versions of a constraint set.

    The eps-range is split wherever the tightest member of a same-direction
    group changes, so the output is a tuple of constraint sets whose eps
    ranges partition the original one (up to finitely many points).  Every
    output set carries at most one lower and one upper eps bound.  With
    ``prune`` the eps range is further tightened to the exact projection of
    the x-system; infeasible sets disappear.
    """
    if not constraints:
        return (constraints,)
    n = next(iter(constraints)).n
    state = _reduce(constraints, *UNIT)
    if state is None:
        return ()
    groups, lo, hi = state
    cuts = {lo, hi}
    for members in groups.values():
        if len(members) > 1:
            cuts |= _crossings(list(members), lo, hi)
    cuts = sorted(cuts)
    spans: list[tuple[frozenset, Fraction, Fraction]] = []
    for a, b in zip(cuts, cuts[1:]):
        mid = (a + b) / 2
        chosen = frozenset(min(members.items(), key=lambda item: _at(item[0], mid))[1]
                           for members in groups.values())
        if spans and spans[-1][0] == chosen:
            spans[-1] = (chosen, spans[-1][1], b)
        else:
            spans.append((chosen, a, b))
    out = []
    for chosen, a, b in spans:
        sub = _reduce(chosen, a, b)
        if sub is None:
            continue
        _, a2, b2 = sub
        if prune:
            box = eps_projection(chosen, a2, b2)
            if box is None:
                continue
            a2, b2 = box
        cons = set(chosen)
        if a2 > 0:
            cons.add(AffineForm.eps_lower(n, a2))
        if b2 < 1:
            cons.add(AffineForm.eps_upper(n, b2))
        out.append(frozenset(cons))
    return tuple(out)
