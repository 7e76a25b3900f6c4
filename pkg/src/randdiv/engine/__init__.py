"""Exact P_{n,k}(eps) via iterated integration of indicator products."""

from randdiv.engine.derivatives import derivatives_at_zero
from randdiv.engine.feasibility import eps_projection, prune_infeasible, resolve_constraints
from randdiv.engine.forms import AffineForm, RegionSpec, Term, build_initial_term
from randdiv.engine.integrate import integrate_out, split_indicator_product
from randdiv.engine.pipeline import (
    BudgetExceeded,
    EngineOptions,
    assemble_piecewise,
    compute_pnk,
    eliminate,
)

__all__ = [
    "AffineForm", "BudgetExceeded", "EngineOptions", "RegionSpec", "Term",
    "assemble_piecewise", "build_initial_term", "compute_pnk", "derivatives_at_zero",
    "eliminate", "eps_projection", "integrate_out", "prune_infeasible",
    "resolve_constraints", "split_indicator_product",
]
