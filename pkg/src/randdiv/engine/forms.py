"""Affine constraint forms, terms and the D_{n,k}(eps) region.

A constraint ``f > 0`` is stored as an :class:`AffineForm`
``const + eps_coeff*eps + sum_i x[i]*x_{i+1}``.  Normalized forms are
primitive integer vectors, so two forms describing the same half-space
compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence, Union

from randdiv.exact_math import MultiPoly, format_rational

Number = Union[int, Fraction]


def _to_int_primitive(values: Sequence[Number]) -> tuple[int, ...]:
    den = 1
    for v in values:
        if isinstance(v, Fraction) and v.denominator != 1:
            den = lcm(den, v.denominator)
    ints = [int(v * den) for v in values]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints)


class AffineForm:
    """``const + eps*eps + sum x[i]*x_{i+1}``; immutable."""

    __slots__ = ("const", "eps", "x", "_hash")

    def __init__(self, const: Number, eps: Number, x: Sequence[Number]):
        self.const = const
        self.eps = eps
        self.x = tuple(x)
        self._hash = hash((const, eps, self.x))

    @classmethod
    def zero(cls, n: int) -> AffineForm:
        return cls(0, 0, (0,) * n)

    @classmethod
    def variable(cls, n: int, idx: int) -> AffineForm:
        x = [0] * n
        x[idx] = 1
        return cls(0, 0, x)

    @classmethod
    def constant(cls, n: int, c: Number) -> AffineForm:
        return cls(c, 0, (0,) * n)

    @classmethod
    def eps_lower(cls, n: int, lo: Fraction) -> AffineForm:
        """The constraint ``eps - lo > 0``."""
        return cls(-lo, 1, (0,) * n).normalized()

    @classmethod
    def eps_upper(cls, n: int, hi: Fraction) -> AffineForm:
        """The constraint ``hi - eps > 0``."""
        return cls(hi, -1, (0,) * n).normalized()

    @property
    def n(self) -> int:
        return len(self.x)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, AffineForm):
            return self.const == other.const and self.eps == other.eps and self.x == other.x
        return NotImplemented

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: AffineForm) -> bool:
        return (self.x, self.eps, self.const) < (other.x, other.eps, other.const)

    def __repr__(self) -> str:
        return f"AffineForm({self})"

    def __str__(self) -> str:
        parts: list[tuple[Fraction, str]] = [(Fraction(c), f"x{i + 1}") for i, c in enumerate(self.x) if c]
        if self.eps:
            parts.append((Fraction(self.eps), "e"))
        if self.const or not parts:
            parts.append((Fraction(self.const), ""))
        out = []
        for c, name in parts:
            mag = abs(c)
            body = (name if mag == 1 and name else
                    f"{format_rational(mag)}{name}")
            sign = "-" if c < 0 else "+"
            out.append((sign, body))
        text = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, body in out[1:]:
            text += f" {sign} {body}"
        return text

    # algebra -----------------------------------------------------------
    def __add__(self, other: AffineForm) -> AffineForm:
        return AffineForm(self.const + other.const, self.eps + other.eps,
                          [a + b for a, b in zip(self.x, other.x)])

    def __neg__(self) -> AffineForm:
        return AffineForm(-self.const, -self.eps, [-a for a in self.x])

    def __sub__(self, other: AffineForm) -> AffineForm:
        return AffineForm(self.const - other.const, self.eps - other.eps,
                          [a - b for a, b in zip(self.x, other.x)])

    def scale(self, c: Number) -> AffineForm:
        return AffineForm(self.const * c, self.eps * c, [a * c for a in self.x])

    def normalized(self) -> AffineForm:
        """Primitive integer representative with the same sign."""
        vals = _to_int_primitive((self.const, self.eps) + self.x)
        return AffineForm(vals[0], vals[1], vals[2:])

    def is_x_free(self) -> bool:
        return not any(self.x)

    def is_constant(self) -> bool:
        return not self.eps and not any(self.x)

    def variables(self) -> list[int]:
        return [i for i, a in enumerate(self.x) if a]

    def substitute(self, var: int, expr: AffineForm) -> AffineForm:
        """Replace ``x_var`` by the affine expression ``expr``."""
        a = self.x[var]
        if not a:
            return self
        x = list(self.x)
        x[var] = 0
        return AffineForm(self.const + a * expr.const, self.eps + a * expr.eps,
                          [b + a * c for b, c in zip(x, expr.x)])

    def solve_for(self, var: int) -> AffineForm:
        """The expression ``e`` with ``x_var = e`` on the hyperplane ``self = 0``."""
        a = Fraction(self.x[var])
        if not a:
            raise ValueError(f"form does not involve x{var + 1}")
        x = list(self.x)
        x[var] = 0
        return AffineForm(-self.const / a, -self.eps / a, [-b / a for b in x])

    def eval_eps(self, eps: Number) -> Fraction:
        if not self.is_x_free():
            raise ValueError("form involves x variables")
        return self.const + self.eps * Fraction(eps)

    def to_poly(self, nvars: int) -> MultiPoly:
        """Polynomial over (x_1..x_n, eps); eps is the last variable."""
        if nvars != self.n + 1:
            raise ValueError(f"arity mismatch: form has {self.n} x-variables, polynomial arity {nvars}")
        coeffs = {i: c for i, c in enumerate(self.x) if c}
        if self.eps:
            coeffs[self.n] = self.eps
        return MultiPoly.affine(nvars, self.const, coeffs)


@dataclass(frozen=True)
class Term:
    """``coeff * prod(1[f] for f in constraints)``."""

    coeff: MultiPoly
    constraints: frozenset

    def __post_init__(self):
        object.__setattr__(self, "constraints", frozenset(self.constraints))

    @property
    def n(self) -> int:
        return self.coeff.nvars - 1

    def is_eps_only(self) -> bool:
        return all(f.is_x_free() for f in self.constraints)

    def __str__(self) -> str:
        cons = ", ".join(f"{f} > 0" for f in sorted(self.constraints))
        return f"[{self.coeff!r}] * {{{cons}}}"


@dataclass(frozen=True)
class RegionSpec:
    """The ordered-points region with window capacity ``k``."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("need n >= 1 and k >= 1")

    @property
    def ordering_constraints(self) -> list[AffineForm]:
        n = self.n
        out = [AffineForm.variable(n, 0)]
        for i in range(n - 1):
            out.append(AffineForm.variable(n, i + 1) - AffineForm.variable(n, i))
        out.append(AffineForm.constant(n, 1) - AffineForm.variable(n, n - 1))
        return out

    @property
    def window_constraints(self) -> list[AffineForm]:
        n, k = self.n, self.k
        return [AffineForm(0, -1, [1 if j == i + k else -1 if j == i else 0 for j in range(n)])
                for i in range(n - k)]

    @property
    def constraints(self) -> list[AffineForm]:
        return self.ordering_constraints + self.window_constraints


def build_initial_term(n: int, k: int) -> Term:
    region = RegionSpec(n, k)
    return Term(MultiPoly.const(n + 1, 1), frozenset(f.normalized() for f in region.constraints))


def forms_from(constraints: Iterable[AffineForm]) -> frozenset:
    return frozenset(f.normalized() for f in constraints)
