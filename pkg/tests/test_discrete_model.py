from fractions import Fraction as F
from math import comb

import pytest

from randdiv.closed_forms import p_2m_2, p_n1
from randdiv.discrete_model import (
    DiscreteConfig,
    EnumerationBudgetExceeded,
    brute_force_admissible,
    convergence_csv,
    count_admissible,
    count_total,
    limit_ratio,
    window_length,
)
from randdiv.exact_math import pw_eval


@pytest.mark.parametrize("r,n,want", [(3, 2, 6), (1, 5, 1), (5, 3, 35)])
def test_count_total(r, n, want):
    assert count_total(r, n) == want


@pytest.mark.parametrize("cfg,want", [
    (DiscreteConfig(3, 2, 2, 2), 6),
    (DiscreteConfig(3, 2, 2, 1), 1),
    (DiscreteConfig(4, 2, 2, 1), 3),
])
def test_small_counts(cfg, want):
    assert count_admissible(cfg) == want
    assert brute_force_admissible(cfg) == want


def test_vacuous_window():
    assert count_admissible(DiscreteConfig(7, 4, 1, 4)) == count_total(7, 4)


def test_invalid_config():
    with pytest.raises(ValueError):
        DiscreteConfig(3, 2, 4, 1)
    with pytest.raises(ValueError):
        DiscreteConfig(3, 2, 2, 0)


def test_brute_force_budget():
    with pytest.raises(EnumerationBudgetExceeded):
        brute_force_admissible(DiscreteConfig(30, 10, 3, 2), budget=1000)


GRID = [DiscreteConfig(r, n, l, k) for r in range(1, 9) for n in range(0, 7)
        for l in range(1, r + 1) for k in range(1, 4)]


def test_dp_matches_brute_force_on_grid():
    bad = [c for c in GRID if count_admissible(c) != brute_force_admissible(c)]
    assert not bad


@pytest.mark.parametrize("r", [5, 17, 50])
def test_k1_gap_removal(r):
    for n in range(0, 9):
        for l in range(1, r + 1):
            free = r - (n - 1) * (l - 1)
            want = comb(free, n) if free >= n else 0
            assert count_admissible(DiscreteConfig(r, n, l, 1)) == want


def test_monotone_in_l_and_k():
    for r in (6, 9):
        for n in range(0, 6):
            for k in (1, 2, 3):
                counts = [count_admissible(DiscreteConfig(r, n, l, k)) for l in range(1, r + 1)]
                assert counts == sorted(counts, reverse=True)
            for l in range(1, r + 1):
                by_k = [count_admissible(DiscreteConfig(r, n, l, k)) for k in (1, 2, 3, 4)]
                assert by_k == sorted(by_k)


def test_big_counts_stay_exact():
    # totals beyond int64 switch the DP to Python integers
    assert count_total(300, 12) > 2**62
    assert count_admissible(DiscreteConfig(300, 12, 4, 1)) == comb(300 - 11 * 3, 12)


def test_window_length_rounding():
    assert window_length(F(1, 2), 100) == 50
    assert window_length(F(1, 8), 4) == 1   # 0.5 rounds up
    assert window_length(F(3, 8), 4) == 2   # 1.5 rounds up
    assert window_length(F(0), 10) == 1
    assert window_length(F(1), 10) == 10


def test_limit_ratio_n2_k1():
    [(r, l, ratio)] = limit_ratio(2, 1, F(1, 2), [100])
    assert (r, l) == (100, 50)
    assert abs(ratio - F(1, 4)) < F(2, 100)


def test_limit_ratio_eps_zero():
    [(_, l, ratio)] = limit_ratio(3, 3, F(0), [10])
    assert l == 1 and ratio == 1


def test_convergence_towards_even_closed_form():
    target = p_2m_2(2)(F(3, 5))
    assert target == F(512, 10000)
    errs = [abs(x - target) for _, _, x in limit_ratio(4, 2, F(3, 5), [50, 100, 200])]
    assert errs[0] > errs[1] > errs[2]


def test_convergence_k1():
    eps = F(1, 10)
    target = pw_eval(p_n1(4), eps)
    (_, _, a), (_, _, b) = limit_ratio(4, 1, eps, [100, 400])
    assert abs(b - target) < abs(a - target)


def test_csv():
    text = convergence_csv([(10, 5, F(1, 3))], exact=F(1, 4))
    assert text.splitlines() == ["r,l,ratio_decimal,ratio_rational,abs_error",
                                 "10,5,0.333333333333,1/3,0.0833333"]
