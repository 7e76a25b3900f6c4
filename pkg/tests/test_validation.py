from fractions import Fraction as F

import pytest

from randdiv import catalan3d
from randdiv.engine import pipeline
from randdiv.exact_math import PiecewisePoly, UPoly
from randdiv.validation import interior_points, run_validation, structural_problems, support_end


def failing(report):
    return {r.check for r in report.records if not r.passed}


def small_run():
    return run_validation(max_n=4, max_lmn=4, trials=20_000)


def test_small_matrix_passes():
    report = small_run()
    assert report.passed, failing(report)


def test_dropping_the_permutation_factor_is_caught(monkeypatch):
    monkeypatch.setattr(pipeline, "factorial", lambda n: 1)
    report = small_run()
    assert "structural invariants" in failing(report)
    assert not report.passed


def test_printed_general_form_is_caught(monkeypatch):
    original = catalan3d.q3d_general
    monkeypatch.setattr(catalan3d, "q3d_general", lambda l, m, n, printed=False: original(l, m, n, printed=True))
    report = small_run()
    assert {"general form vs DP on m,n<=l", "general form at (3,3,2)"} <= failing(report)


@pytest.mark.parametrize("n,k,end", [(5, 1, F(1, 4)), (5, 2, F(1, 2)), (6, 3, F(1)), (7, 3, F(1, 2)), (4, 4, F(1))])
def test_support_end(n, k, end):
    assert support_end(n, k) == end


def test_structural_problems_flags_bad_functions():
    rising = PiecewisePoly([0, 1], [UPoly((1, 1))])
    assert "increasing somewhere" in structural_problems(rising, 2, 1)
    jump = PiecewisePoly([0, F(1, 2), 1], [UPoly((1,)), UPoly((F(1, 2),))])
    assert "discontinuous at a breakpoint" in structural_problems(jump, 2, 1)


def test_interior_points_inside():
    pts = interior_points(F(1, 3), F(1, 2))
    assert len(set(pts)) == 3
    assert all(F(1, 3) < p < F(1, 2) for p in pts)
