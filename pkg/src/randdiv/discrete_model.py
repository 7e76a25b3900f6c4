"""Balls-in-boxes quantization of the interval problem.

The interval is cut into ``r`` boxes, ``n`` indistinguishable balls are
thrown into them, and a placement is admissible when every run of ``l``
consecutive boxes holds at most ``k`` balls.  The ratio of admissible to
all placements tends to P_{n,k}(eps) as ``r`` grows with ``l/r -> eps``.

Admissible placements are counted through the sorted ball positions
``p_1 <= ... <= p_n``: the window condition is equivalent to
``p_{i+k} - p_i >= l`` for every ``i``.  A dynamic program over balls keeps
the last ``k`` positions as state and uses prefix sums for the transition.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Optional

import numpy as np

DEFAULT_ENUM_BUDGET = 10**7
DEFAULT_STATE_BUDGET = 5 * 10**7


class EnumerationBudgetExceeded(RuntimeError):
    budget = "enum-budget"


@dataclass(frozen=True)
class DiscreteConfig:
    r: int
    n: int
    l: int
    k: int

    def __post_init__(self):
        if not 1 <= self.l <= self.r:
            raise ValueError(f"need 1 <= l <= r, got l={self.l}, r={self.r}")
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        if self.k < 1:
            raise ValueError("k must be positive")


def count_total(r: int, n: int) -> int:
    """Number of ways to put n indistinguishable balls in r boxes."""
    if r < 1 or n < 0:
        raise ValueError("need r >= 1 and n >= 0")
    return comb(n + r - 1, r - 1)


def _sorted_tuples(r: int, k: int, dtype) -> np.ndarray:
    """Indicator array over positions (0-based) ``q_1 <= ... <= q_k``."""
    grids = np.indices((r,) * k, sparse=True)
    mask = np.ones((r,) * k, dtype=bool)
    for a, b in zip(grids, grids[1:]):
        mask &= a <= b
    return mask.astype(dtype)


def count_admissible(cfg: DiscreteConfig, state_budget: int = DEFAULT_STATE_BUDGET) -> int:
    """Exact number of admissible placements for ``cfg``."""
    r, n, l, k = cfg.r, cfg.n, cfg.l, cfg.k
    if n <= k:
        return count_total(r, n)
    if r ** k > state_budget:
        raise EnumerationBudgetExceeded(f"state budget {state_budget} exceeded: r^k = {r ** k}")
    # partial counts never exceed the total, so int64 is exact below 2^62
    dtype = np.int64 if count_total(r, n) < 2**62 else object
    f = _sorted_tuples(r, k, dtype)
    c = np.arange(r)
    for _ in range(n - k):
        # new position c needs c >= last position and c >= oldest + l
        cum = np.cumsum(f, axis=0)
        idx = c - l
        valid = idx >= 0
        picked = np.zeros((r,) + f.shape[1:], dtype=dtype)
        picked[valid] = cum[idx[valid]]
        # picked[c, q_2..q_k]; move c to the last axis
        g = np.moveaxis(picked, 0, -1)
        last = np.indices(g.shape, sparse=True)
        order_ok = last[-2] <= last[-1] if k > 1 else None
        if order_ok is not None:
            g = np.where(order_ok, g, 0)
        else:
            g = g.copy()
        f = g.astype(dtype)
    return int(f.sum())


def brute_force_admissible(cfg: DiscreteConfig, budget: int = DEFAULT_ENUM_BUDGET) -> int:
    """Same count by enumerating every placement and scanning every window."""
    r, n, l, k = cfg.r, cfg.n, cfg.l, cfg.k
    total = count_total(r, n)
    if total > budget:
        raise EnumerationBudgetExceeded(f"enumeration budget {budget} exceeded: {total} placements")
    good = 0
    for balls in itertools.combinations_with_replacement(range(r), n):
        boxes = [0] * r
        for b in balls:
            boxes[b] += 1
        if all(sum(boxes[s:s + l]) <= k for s in range(r - l + 1)):
            good += 1
    return good


def window_length(eps: Fraction, r: int) -> int:
    """round-half-up(eps * r), clamped to [1, r]."""
    x = Fraction(eps) * r
    l = int(x + Fraction(1, 2)) if x >= 0 else 0
    return min(max(l, 1), r)


def limit_ratio(n: int, k: int, eps: Fraction, r_list: Iterable[int]) -> list[tuple[int, int, Fraction]]:
    """``(r, l, admissible/total)`` for each r."""
    out = []
    for r in r_list:
        if r < 2:
            raise ValueError("r must be at least 2")
        l = window_length(eps, r)
        cfg = DiscreteConfig(r, n, l, k)
        out.append((r, l, Fraction(count_admissible(cfg), count_total(r, n))))
    return out


def convergence_csv(rows: Iterable[tuple[int, int, Fraction]], exact: Optional[Fraction] = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["r", "l", "ratio_decimal", "ratio_rational"]
    if exact is not None:
        header.append("abs_error")
    w.writerow(header)
    for r, l, ratio in rows:
        row = [r, l, f"{float(ratio):.12g}", f"{ratio.numerator}/{ratio.denominator}"]
        if exact is not None:
            row.append(f"{float(abs(ratio - exact)):.6g}")
        w.writerow(row)
    return buf.getvalue()
