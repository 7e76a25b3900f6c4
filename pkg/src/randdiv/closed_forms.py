"""Known closed forms for P_{n,k}(eps) and the Catalan coefficients they use."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from randdiv.exact_math import PiecewisePoly, UPoly


@dataclass(frozen=True)
class RangedFormula:
    """A polynomial in eps claimed valid on the open interval ``valid_range``."""

    valid_range: tuple[Fraction, Fraction]
    poly: UPoly

    def __post_init__(self):
        lo, hi = self.valid_range
        if not (0 <= lo < hi <= 1):
            raise ValueError(f"bad range ({lo}, {hi})")

    def __call__(self, eps) -> Fraction:
        return self.poly(eps)


def _binom(a: int, b: int) -> int:
    # math.comb raises on negative arguments; out-of-range means zero here
    if b < 0 or a < 0 or b > a:
        return 0
    return comb(a, b)


def _one_minus(c: int) -> UPoly:
    """1 - c*eps"""
    return UPoly.linear(1, -c)


def p_n1(n: int) -> PiecewisePoly:
    """P_{n,1}: (1 - (n-1) eps)^n up to 1/(n-1), zero afterwards."""
    if n < 2:
        raise ValueError("p_n1 needs n >= 2")
    poly = _one_minus(n - 1) ** n
    if n == 2:
        return PiecewisePoly([0, 1], [poly])
    return PiecewisePoly([0, Fraction(1, n - 1), 1], [poly, UPoly()])


def catalan(m: int) -> int:
    """(1/m) C(2m, m-1), the m-th Catalan number."""
    if m < 1:
        raise ValueError("catalan needs m >= 1")
    num = comb(2 * m, m - 1)
    assert num % m == 0
    return num // m


def p_2m_2(m: int) -> RangedFormula:
    """P_{2m,2} on (1/m, 1/(m-1))."""
    if m < 2:
        raise ValueError("p_2m_2 needs m >= 2")
    poly = _one_minus(m - 1) ** (2 * m) * catalan(m)
    return RangedFormula((Fraction(1, m), Fraction(1, m - 1)), poly)


def p_2m1_2(m: int) -> RangedFormula:
    """P_{2m+1,2} on (1/(m+1), 1/m), three-term form."""
    if m < 1:
        raise ValueError("p_2m1_2 needs m >= 1")
    a, b = _one_minus(m), _one_minus(m - 1)
    poly = UPoly()
    for shift, sign in ((1, 1), (2, -2), (3, 1)):
        c = _binom(2 * m + 1, m + shift)
        if c == 0 or m + 1 - shift < 0:
            continue
        poly = poly + (a ** (m + shift)) * (b ** (m + 1 - shift)) * (sign * c)
    return RangedFormula((Fraction(1, m + 1), Fraction(1, m)), poly)
