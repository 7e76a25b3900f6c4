from fractions import Fraction as F
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randdiv.closed_forms import p_n1
from randdiv.engine import (
    AffineForm,
    BudgetExceeded,
    EngineOptions,
    RegionSpec,
    Term,
    assemble_piecewise,
    build_initial_term,
    compute_pnk,
    derivatives_at_zero,
    eliminate,
    integrate_out,
    prune_infeasible,
    split_indicator_product,
)
from randdiv.engine.feasibility import eps_interval, resolve_constraints
from randdiv.engine.integrate import UnboundedVariable
from randdiv.exact_math import MultiPoly, PiecewisePoly, UPoly, pw_eval
from randdiv.validation import nonincreasing, support_end


def form(n, const=0, eps=0, **xs):
    """form(3, eps=-1, x2=1, x1=-1) -> x2 - x1 - e"""
    x = [0] * n
    for name, c in xs.items():
        x[int(name[1:]) - 1] = c
    return AffineForm(const, eps, x).normalized()


def poly_eps(n, *coeffs):
    return MultiPoly.from_terms(n + 1, {(0,) * n + (i,): c for i, c in enumerate(coeffs) if c})


class TestAffineForm:
    def test_normalization_keeps_sign_and_scale_free(self):
        f = AffineForm(F(2, 3), F(-4, 3), [F(2), 0]).normalized()
        assert (f.const, f.eps, f.x) == (1, -2, (3, 0))
        assert AffineForm(-2, 4, [-6, 0]).normalized() == -f
        assert -f != f

    def test_substitute(self):
        f = form(3, eps=-1, x3=1, x1=-1)          # x3 - x1 - e
        g = f.substitute(2, AffineForm(0, 1, [1, 0, 0]))  # x3 <- x1 + e
        assert g.is_constant() and g.const == 0

    def test_str(self):
        assert str(form(3, eps=-1, x2=1, x1=-1)) == "-x1 + x2 - e"


class TestInitialTerm:
    def test_k1_n3(self):
        t = build_initial_term(3, 1)
        want = {form(3, x1=1), form(3, x2=1, x1=-1), form(3, x3=1, x2=-1), form(3, const=1, x3=-1),
                form(3, eps=-1, x2=1, x1=-1), form(3, eps=-1, x3=1, x2=-1)}
        assert t.constraints == want
        assert t.coeff == MultiPoly.const(4, 1)

    def test_k2_n3_single_window(self):
        t = build_initial_term(3, 2)
        windows = [f for f in t.constraints if f.eps]
        assert windows == [form(3, eps=-1, x3=1, x1=-1)]
        assert len(t.constraints) == 5

    def test_k_at_least_n_orderings_only(self):
        spec = RegionSpec(2, 5)
        assert spec.window_constraints == []
        assert len(spec.constraints) == 3
        assert compute_pnk(2, 5) == PiecewisePoly.constant(1)

    @pytest.mark.parametrize("n,k", [(1, 1), (4, 1), (6, 2), (7, 3)])
    def test_constraint_counts(self, n, k):
        spec = RegionSpec(n, k)
        assert len(spec.ordering_constraints) == n + 1
        assert len(spec.window_constraints) == max(n - k, 0)


class TestSplit:
    def test_single_lower_single_upper(self):
        t = Term(MultiPoly.const(3, 1), {form(2, x1=1), form(2, x2=1, x1=-1)})
        cases = split_indicator_product(t, 0)
        assert len(cases) == 1
        lo, hi, residual = cases[0]
        assert lo.to_poly(3) == MultiPoly.zero(3)
        assert hi.to_poly(3) == MultiPoly.var(3, 1)
        assert residual.constraints == {form(2, x2=1)}

    def test_two_by_two_cases(self):
        # on x2: lower bounds x1 and e, upper bounds x3 and 1
        n = 3
        cons = {form(n, x2=1, x1=-1), form(n, x2=1, eps=-1), form(n, x3=1, x2=-1), form(n, const=1, x2=-1)}
        t = Term(MultiPoly.const(n + 1, 1), cons)
        cases = split_indicator_product(t, 1)
        assert len(cases) == 4
        x1, x3, e, one = (AffineForm.variable(n, 0), AffineForm.variable(n, 2),
                          AffineForm(0, 1, [0] * n), AffineForm.constant(n, 1))
        by_bounds = {(lo.to_poly(n + 1), hi.to_poly(n + 1)): r.constraints for lo, hi, r in cases}
        case11 = by_bounds[(x1.to_poly(n + 1), x3.to_poly(n + 1))]
        assert case11 == {(x1 - e).normalized(), (one - x3).normalized(), (x3 - x1).normalized()}

    def test_unbounded_variable(self):
        t = Term(MultiPoly.const(3, 1), {form(2, x1=1)})
        with pytest.raises(UnboundedVariable):
            split_indicator_product(t, 0)


class TestIntegrateOut:
    def test_plain(self):
        t = Term(MultiPoly.const(3, 1), {form(2, x1=1), form(2, x2=1, x1=-1)})
        [out] = integrate_out(t, 0)
        assert out.coeff == MultiPoly.var(3, 1)
        assert out.constraints == {form(2, x2=1)}

    def test_eps_shifted(self):
        t = Term(MultiPoly.const(3, 1), {form(2, x1=1, eps=-1), form(2, x2=1, x1=-1, eps=-1)})
        [out] = integrate_out(t, 0)
        assert out.coeff == MultiPoly.var(3, 1) - MultiPoly.var(3, 2).scale(2)
        assert out.constraints == {form(2, x2=1, eps=-2)}

    def test_last_variable(self):
        t = Term(MultiPoly.var(3, 1), {form(2, x2=1), form(2, const=1, x2=-1)})
        [out] = integrate_out(t, 1)
        assert out.coeff == MultiPoly.const(3, F(1, 2))
        assert out.constraints == {AffineForm.constant(2, 1)}


class TestAssemble:
    def test_interval_sum(self):
        n = 1
        terms = [Term(poly_eps(n, 0, 0, 1), {form(n, const=1, eps=-2)}), Term(poly_eps(n, 1, -1), set())]
        f = assemble_piecewise(terms)
        assert f.breakpoints == (0, F(1, 2), 1)
        assert f.pieces == (UPoly((1, -1, 1)), UPoly((1, -1)))

    def test_contradiction_dropped(self):
        n = 1
        terms = [Term(poly_eps(n, 5), {form(n, eps=1), form(n, eps=-1)})]
        assert assemble_piecewise(terms) == PiecewisePoly.constant(0)

    def test_rejects_x_constraints(self):
        with pytest.raises(ValueError):
            assemble_piecewise([Term(poly_eps(1, 1), {form(1, x1=1)})])

    def test_k1_n3_two_pieces(self):
        f = compute_pnk(3, 1)
        assert f.breakpoints == (0, F(1, 2), 1)
        assert f == p_n1(3)


class TestPrune:
    def test_opposite_pair(self):
        assert not prune_infeasible(Term(MultiPoly.const(2, 1), {form(1, x1=1), form(1, x1=-1)}))

    def test_feasible_small_eps(self):
        t = Term(MultiPoly.const(3, 1), {form(2, x2=1, eps=-2), form(2, const=1, x2=-1)})
        assert prune_infeasible(t, (F(0), F(1, 2)))

    def test_infeasible_large_eps(self):
        t = Term(MultiPoly.const(3, 1), {form(2, x2=1, eps=-2), form(2, const=1, x2=-1)})
        assert not prune_infeasible(t, (F(1, 2), F(1)))

    def test_needs_full_elimination(self):
        # x1 > e, x2 > x1 + e, x3 > x2 + e, x3 < 1  =>  3e < 1
        cons = {form(3, x1=1, eps=-1), form(3, x2=1, x1=-1, eps=-1), form(3, x3=1, x2=-1, eps=-1),
                form(3, const=1, x3=-1)}
        t = Term(MultiPoly.const(4, 1), cons)
        assert prune_infeasible(t, (F(0), F(1, 3)))
        assert not prune_infeasible(t, (F(1, 3), F(1)))

    def test_resolve_splits_eps_range_where_dominance_changes(self):
        # x1 > e and x1 > 1/2 - e share a direction; the binding one switches at 1/4
        n = 1
        cons = frozenset({form(n, x1=1, eps=-1), form(n, x1=2, eps=2, const=-1), form(n, const=1, x1=-1)})
        out = resolve_constraints(cons)
        assert len(out) == 2
        assert sorted(eps_interval(c) for c in out) == [(0, F(1, 4)), (F(1, 4), 1)]


class TestComputePnk:
    def test_k1_n3(self):
        assert compute_pnk(3, 1) == PiecewisePoly([0, F(1, 2), 1], [UPoly.linear(1, -2) ** 3, UPoly()])

    def test_n4_k2_last_piece(self):
        f = compute_pnk(4, 2)
        assert f.restrict(F(1, 2), 1) == [UPoly.linear(1, -1) ** 4 * 2]

    def test_n3_k2_range_distribution(self):
        assert compute_pnk(3, 2) == PiecewisePoly([0, 1], [UPoly((1, 0, -3, 2))])

    @pytest.mark.parametrize("n", range(2, 9))
    def test_k1_family(self, n):
        assert compute_pnk(n, 1) == p_n1(n)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            compute_pnk(0, 1)
        with pytest.raises(ValueError):
            EngineOptions(order="random")

    def test_budget_reports_live_terms(self):
        with pytest.raises(BudgetExceeded) as info:
            compute_pnk(7, 2, EngineOptions(term_budget=5))
        assert info.value.live_terms > 5
        assert info.value.remaining_vars >= 1
        assert "term budget 5" in str(info.value)

    @pytest.mark.parametrize("n,k", [(5, 2), (6, 2), (6, 3), (7, 3)])
    def test_options_do_not_change_the_result(self, n, k):
        ref = compute_pnk(n, k)
        assert compute_pnk(n, k, EngineOptions(order="greedy")) == ref
        assert compute_pnk(n, k, EngineOptions(prune=False)) == ref


def _raw_pnk(n, k):
    """Reference path: bare integrate_out, no canonicalization, no pruning."""
    terms = [build_initial_term(n, k)]
    for var in range(n):
        terms = [out for t in terms for out in integrate_out(t, var)]
    return assemble_piecewise(Term(t.coeff.scale(factorial(n)), t.constraints) for t in terms)


@pytest.mark.parametrize("n,k", [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)])
def test_raw_integration_agrees(n, k):
    assert _raw_pnk(n, k) == compute_pnk(n, k)


COMPUTED = [(n, k) for n in range(2, 9) for k in range(1, n)]


@pytest.mark.parametrize("n,k", COMPUTED)
def test_structural_invariants(n, k):
    f = compute_pnk(n, k)
    assert pw_eval(f, 0) == 1
    assert f.is_continuous()
    assert nonincreasing(f)
    assert all(p.degree <= n for p in f.pieces)
    end = support_end(n, k)
    last = max(b for a, b, p in f.intervals() if not p.is_zero())
    assert last == end
    if end < 1:
        assert pw_eval(f, end) == 0


# --- splitting soundness against Monte Carlo integration -----------------

coef = st.sampled_from([-1, 0, 1])
extra_forms = st.tuples(st.sampled_from([-1, 0, 1, F(1, 2), F(-1, 2)]), coef, coef, coef)


@settings(max_examples=25, deadline=None)
@given(st.lists(extra_forms, min_size=1, max_size=3),
       st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 1)),
                       st.integers(-3, 3), min_size=1, max_size=4),
       st.sampled_from([F(1, 10), F(1, 3), F(3, 5)]))
def test_split_sound_against_sampling(extras, coeff_terms, eps):
    n = 2
    box = [form(n, x1=1), form(n, const=1, x1=-1), form(n, x2=1), form(n, const=1, x2=-1)]
    cons = set(box)
    for c, e, a1, a2 in extras:
        f = AffineForm(c, e, [a1, a2])
        if not f.is_x_free():
            cons.add(f.normalized())
    coeff = MultiPoly.from_terms(n + 1, coeff_terms)
    terms = eliminate({frozenset(cons): coeff}, [0, 1])
    exact = pw_eval(assemble_piecewise(Term(c, k) for k, c in terms.items()), eps)

    rng = np.random.default_rng(1234)
    pts = rng.random((200_000, 2))
    ok = np.ones(len(pts), dtype=bool)
    for f in cons:
        ok &= float(f.const) + float(f.eps) * float(eps) + pts @ np.array([float(a) for a in f.x]) > 0
    vals = np.zeros(len(pts))
    for (i, j, k), c in coeff_terms.items():
        vals += c * pts[:, 0] ** i * pts[:, 1] ** j * float(eps) ** k
    sample = np.where(ok, vals, 0.0)
    stderr = sample.std() / np.sqrt(len(sample))
    assert abs(sample.mean() - float(exact)) <= 5 * stderr + 1e-9


# --- derivatives ------------------------------------------------------------

class TestDerivatives:
    def test_n2_k1(self):
        assert derivatives_at_zero(2, 1, 2, "delta") == [1, -2, 2]
        assert derivatives_at_zero(2, 1, 2, "engine-diff") == [1, -2, 2]

    def test_trivial_capacity(self):
        assert derivatives_at_zero(3, 3, 3) == [1, 0, 0, 0]
        assert derivatives_at_zero(2, 7, 2, "engine-diff") == [1, 0, 0]

    def test_n3_k2(self):
        assert derivatives_at_zero(3, 2, 3, "delta") == [1, 0, -6, 12]

    @pytest.mark.parametrize("n,k", [(n, k) for n in range(2, 6) for k in range(1, n)])
    def test_backends_agree(self, n, k):
        assert derivatives_at_zero(n, k, n, "delta") == derivatives_at_zero(n, k, n, "engine-diff")

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            derivatives_at_zero(3, 1, 4)
        with pytest.raises(ValueError):
            derivatives_at_zero(3, 1, 2, backend="finite-diff")
