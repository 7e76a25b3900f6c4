from fractions import Fraction as F

import pytest

from randdiv.engine import compute_pnk
from randdiv.exact_math import pw_eval
from randdiv.montecarlo import CHUNK, Estimate, TrialPlan, estimate, sweep_csv, trial_succeeds


def test_trial_succeeds_examples():
    assert trial_succeeds([0.1, 0.5, 0.9], 1, 0.3)
    assert not trial_succeeds([0.1, 0.2, 0.9], 1, 0.3)
    assert trial_succeeds([0.1, 0.2, 0.9], 2, 0.3)
    assert trial_succeeds([0.9, 0.1], 2, 0.99)


def test_eps_zero_always_succeeds():
    assert estimate(TrialPlan(5, 1, 0.0, 1000, seed=3)).p_hat == 1.0


def test_deterministic_across_worker_counts():
    plan = TrialPlan(4, 2, 0.3, 3 * CHUNK + 17, seed=99)
    a = estimate(plan)
    b = estimate(plan, workers=4)
    assert a == b
    assert estimate(TrialPlan(4, 2, 0.3, 3 * CHUNK + 17, seed=100)) != a


@pytest.mark.parametrize("n,k,eps", [(2, 1, F(1, 2)), (4, 2, F(3, 5)), (5, 3, F(2, 5))])
def test_agrees_with_exact(n, k, eps):
    exact = float(pw_eval(compute_pnk(n, k), eps))
    est = estimate(TrialPlan(n, k, float(eps), 200_000, seed=7))
    assert abs(est.p_hat - exact) <= 4 * est.stderr


def test_estimate_fields():
    e = Estimate(25, 100)
    assert e.p_hat == 0.25
    lo, hi = e.ci95
    assert lo < 0.25 < hi
    assert hi - 0.25 == pytest.approx(1.96 * (0.25 * 0.75 / 100) ** 0.5)


def test_plan_validation():
    with pytest.raises(ValueError):
        TrialPlan(3, 1, 0.1, 0)
    with pytest.raises(ValueError):
        TrialPlan(3, 1, 1.5, 10)


def test_sweep_csv_columns():
    plan = TrialPlan(2, 1, 0.5, 100)
    text = sweep_csv([(plan, Estimate(25, 100), 0.25)])
    header, row = text.splitlines()
    assert header == "n,k,eps,trials,p_hat,stderr,exact,z"
    assert row.endswith(",0.25,0.0000")
