"""Exact scalar, polynomial and piecewise-polynomial arithmetic.

Every scalar is a :class:`fractions.Fraction`.  Multivariate polynomials are
sparse maps from exponent vectors to coefficients; internally the exponent
vector is packed into a single integer (``_BITS`` bits per variable) so that
multiplying monomials is one integer addition.

  x0^2 * x1 + 3  ->  {(2, 1): 1, (0, 0): 3}

Univariate polynomials (:class:`UPoly`) hold ascending coefficient tuples and
back the pieces of :class:`PiecewisePoly`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

Rational = Fraction
Number = Union[int, Fraction]

_BITS = 8
_MASK = (1 << _BITS) - 1
MAX_DEGREE = _MASK


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` into a reduced Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    return Fraction(text)


def format_rational(q: Number) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# --------------------------------------------------------------------------
# multivariate polynomials
# --------------------------------------------------------------------------

def _pack(exps: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > MAX_DEGREE:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (_BITS * i)
    return key


def _unpack(key: int, nvars: int) -> tuple[int, ...]:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(nvars))


class MultiPoly:
    """Sparse multivariate polynomial with Fraction coefficients.

    Instances are treated as immutable; all operations return new objects.
    """

    __slots__ = ("nvars", "_data", "_hash")

    def __init__(self, nvars: int, data: Mapping[int, Fraction] | None = None):
        self.nvars = nvars
        self._data = {k: v for k, v in (data or {}).items() if v}
        self._hash = None

    # construction ------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> MultiPoly:
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, value: Number) -> MultiPoly:
        return cls(nvars, {0: Fraction(value)})

    @classmethod
    def var(cls, nvars: int, idx: int) -> MultiPoly:
        if not 0 <= idx < nvars:
            raise ValueError(f"variable index {idx} out of range for arity {nvars}")
        return cls(nvars, {1 << (_BITS * idx): Fraction(1)})

    @classmethod
    def from_terms(cls, nvars: int, terms: Mapping[Sequence[int], Number]) -> MultiPoly:
        data: dict[int, Fraction] = {}
        for exps, c in terms.items():
            if len(exps) != nvars:
                raise ValueError("exponent vector arity mismatch")
            key = _pack(exps)
            data[key] = data.get(key, Fraction(0)) + Fraction(c)
        return cls(nvars, data)

    @classmethod
    def affine(cls, nvars: int, const: Number, coeffs: Mapping[int, Number]) -> MultiPoly:
        data = {0: Fraction(const)} if const else {}
        for idx, c in coeffs.items():
            if c:
                data[1 << (_BITS * idx)] = Fraction(c)
        return cls(nvars, data)

    # inspection --------------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return {_unpack(k, self.nvars): v for k, v in self._data.items()}

    def items(self) -> Iterator[tuple[int, Fraction]]:
        return iter(self._data.items())

    def is_zero(self) -> bool:
        return not self._data

    def __len__(self) -> int:
        return len(self._data)

    def degree_in(self, idx: int) -> int:
        shift = _BITS * idx
        return max(((k >> shift) & _MASK for k in self._data), default=0)

    def involves(self, idx: int) -> bool:
        shift = _BITS * idx
        return any((k >> shift) & _MASK for k in self._data)

    def constant_term(self) -> Fraction:
        return self._data.get(0, Fraction(0))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self._data == other._data
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._data.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"MultiPoly({self.nvars}, {self.terms!r})"

    # arithmetic --------------------------------------------------------
    def _check(self, other: MultiPoly) -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"arity mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other: MultiPoly) -> MultiPoly:
        self._check(other)
        data = dict(self._data)
        for k, v in other._data.items():
            s = data.get(k)
            data[k] = v if s is None else s + v
        return MultiPoly(self.nvars, data)

    def __neg__(self) -> MultiPoly:
        return MultiPoly(self.nvars, {k: -v for k, v in self._data.items()})

    def __sub__(self, other: MultiPoly) -> MultiPoly:
        return self + (-other)

    def scale(self, c: Number) -> MultiPoly:
        c = Fraction(c)
        if not c:
            return MultiPoly(self.nvars)
        return MultiPoly(self.nvars, {k: v * c for k, v in self._data.items()})

    def __mul__(self, other: Union[MultiPoly, Number]) -> MultiPoly:
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check(other)
        data: dict[int, Fraction] = {}
        get = data.get
        for k1, v1 in self._data.items():
            for k2, v2 in other._data.items():
                k = k1 + k2
                s = get(k)
                data[k] = v1 * v2 if s is None else s + v1 * v2
        return MultiPoly(self.nvars, data)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> MultiPoly:
        if e < 0:
            raise ValueError("negative power")
        result = MultiPoly.const(self.nvars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def derivative(self, idx: int) -> MultiPoly:
        shift = _BITS * idx
        unit = 1 << shift
        data = {}
        for k, v in self._data.items():
            a = (k >> shift) & _MASK
            if a:
                data[k - unit] = v * a
        return MultiPoly(self.nvars, data)

    def split_by(self, idx: int) -> dict[int, MultiPoly]:
        """Group monomials by their power of variable ``idx``."""
        shift = _BITS * idx
        groups: dict[int, dict[int, Fraction]] = {}
        for k, v in self._data.items():
            a = (k >> shift) & _MASK
            groups.setdefault(a, {})[k - (a << shift)] = v
        return {a: MultiPoly(self.nvars, d) for a, d in groups.items()}

    def substitute(self, idx: int, value: MultiPoly) -> MultiPoly:
        """Replace variable ``idx`` by the polynomial ``value``."""
        self._check(value)
        result = MultiPoly(self.nvars)
        powers = {0: MultiPoly.const(self.nvars, 1)}
        for a, rest in sorted(self.split_by(idx).items()):
            if a not in powers:
                powers[a] = value ** a
            result = result + rest * powers[a]
        return result

    def evaluate(self, values: Sequence[Number]) -> Fraction:
        if len(values) != self.nvars:
            raise ValueError("arity mismatch in evaluate")
        vals = [Fraction(v) for v in values]
        total = Fraction(0)
        for key, c in self._data.items():
            term = c
            for i in range(self.nvars):
                e = (key >> (_BITS * i)) & _MASK
                if e:
                    term *= vals[i] ** e
            total += term
        return total

    def to_upoly(self, idx: int) -> UPoly:
        """View a polynomial in the single variable ``idx`` as a UPoly."""
        shift = _BITS * idx
        coeffs: dict[int, Fraction] = {}
        for k, v in self._data.items():
            a = (k >> shift) & _MASK
            if k - (a << shift):
                raise ValueError(f"polynomial involves variables other than {idx}")
            coeffs[a] = v
        top = max(coeffs, default=-1)
        return UPoly(tuple(coeffs.get(i, Fraction(0)) for i in range(top + 1)))


def _as_poly(bound, nvars: int) -> MultiPoly:
    if isinstance(bound, MultiPoly):
        return bound
    to_poly = getattr(bound, "to_poly", None)
    if to_poly is None:
        raise TypeError(f"cannot use {type(bound).__name__} as an integration bound")
    return to_poly(nvars)


def mpoly_integrate_between(p: MultiPoly, var: int, lower, upper) -> MultiPoly:
    """Definite integral of ``p`` in ``var`` from ``lower`` to ``upper``.

    The bounds are affine expressions (``MultiPoly`` of degree <= 1, or any
    object with ``to_poly(nvars)``) that must not involve ``var``.
    """
    lo = _as_poly(lower, p.nvars)
    hi = _as_poly(upper, p.nvars)
    if lo.nvars != p.nvars or hi.nvars != p.nvars:
        raise ValueError("arity mismatch between integrand and bounds")
    if lo.involves(var) or hi.involves(var):
        raise ValueError("integration bound involves the integration variable")
    result = MultiPoly(p.nvars)
    lo_pow = {0: MultiPoly.const(p.nvars, 1)}
    hi_pow = {0: MultiPoly.const(p.nvars, 1)}
    for a, rest in sorted(p.split_by(var).items()):
        e = a + 1
        lo_pow[e] = lo_pow[e - 1] * lo if e - 1 in lo_pow else lo ** e
        hi_pow[e] = hi_pow[e - 1] * hi if e - 1 in hi_pow else hi ** e
        diff = hi_pow[e] - lo_pow[e]
        result = result + (rest * diff).scale(Fraction(1, e))
    return result


# --------------------------------------------------------------------------
# univariate polynomials
# --------------------------------------------------------------------------

def _trim(coeffs: Iterable[Number]) -> tuple[Fraction, ...]:
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class UPoly:
    """Univariate polynomial in eps, ascending coefficients, no trailing zeros."""

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def const(cls, c: Number) -> UPoly:
        return cls((Fraction(c),))

    @classmethod
    def linear(cls, c0: Number, c1: Number) -> UPoly:
        """The polynomial c0 + c1*eps."""
        return cls((Fraction(c0), Fraction(c1)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x: Number) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: UPoly) -> UPoly:
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return UPoly(tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                           for i in range(n)))

    def __neg__(self) -> UPoly:
        return UPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: UPoly) -> UPoly:
        return self + (-other)

    def __mul__(self, other: Union[UPoly, Number]) -> UPoly:
        if not isinstance(other, UPoly):
            return UPoly(tuple(c * other for c in self.coeffs))
        if not self.coeffs or not other.coeffs:
            return UPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> UPoly:
        result = UPoly.const(1)
        for _ in range(e):
            result = result * self
        return result

    def derivative(self) -> UPoly:
        return UPoly(tuple(c * i for i, c in enumerate(self.coeffs) if i))

    def derivatives_at(self, x: Number, j_max: int) -> list[Fraction]:
        out = []
        p = self
        for _ in range(j_max + 1):
            out.append(p(x))
            p = p.derivative()
        return out

    def render(self, var: str = "e") -> str:
        if not self.coeffs:
            return "0"
        parts: list[str] = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mag = abs(c)
            if i == 0:
                body = format_rational(mag)
            else:
                mono = var if i == 1 else f"{var}^{i}"
                body = mono if mag == 1 else f"{format_rational(mag)}{mono}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)

    def __str__(self) -> str:
        return self.render()


# --------------------------------------------------------------------------
# piecewise polynomials on [0, 1]
# --------------------------------------------------------------------------

class PiecewisePoly:
    """Univariate piecewise polynomial on [0, 1].

    Piece ``i`` lives on ``[breakpoints[i], breakpoints[i+1])``; the last
    piece also covers ``eps = 1``.  Adjacent equal pieces are merged on
    construction.
    """

    __slots__ = ("breakpoints", "pieces")

    def __init__(self, breakpoints: Sequence[Number], pieces: Sequence[UPoly]):
        bps = [Fraction(b) for b in breakpoints]
        pcs = list(pieces)
        if len(bps) < 2 or bps[0] != 0 or bps[-1] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(pcs) != len(bps) - 1:
            raise ValueError("need exactly one piece per breakpoint interval")
        merged_b = [bps[0]]
        merged_p: list[UPoly] = []
        for b, p in zip(bps[1:], pcs):
            if merged_p and merged_p[-1] == p:
                merged_b[-1] = b
            else:
                merged_p.append(p)
                merged_b.append(b)
        self.breakpoints = tuple(merged_b)
        self.pieces = tuple(merged_p)

    @classmethod
    def constant(cls, c: Number) -> PiecewisePoly:
        return cls([0, 1], [UPoly.const(c)])

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PiecewisePoly):
            return self.breakpoints == other.breakpoints and self.pieces == other.pieces
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.breakpoints, self.pieces))

    def __repr__(self) -> str:
        return f"PiecewisePoly({self.render()!r})"

    def intervals(self) -> Iterator[tuple[Fraction, Fraction, UPoly]]:
        for i, p in enumerate(self.pieces):
            yield self.breakpoints[i], self.breakpoints[i + 1], p

    def piece_index(self, eps: Number) -> int:
        eps = Fraction(eps)
        if eps < 0 or eps > 1:
            raise ValueError(f"eps={eps} outside [0, 1]")
        for i in range(len(self.pieces)):
            if eps < self.breakpoints[i + 1]:
                return i
        return len(self.pieces) - 1

    def piece_at(self, eps: Number) -> UPoly:
        return self.pieces[self.piece_index(eps)]

    def restrict(self, lo: Number, hi: Number) -> list[UPoly]:
        """Distinct pieces meeting the open interval (lo, hi)."""
        lo, hi = Fraction(lo), Fraction(hi)
        return [p for a, b, p in self.intervals() if a < hi and b > lo]

    def is_continuous(self) -> bool:
        return all(self.pieces[i](self.breakpoints[i + 1]) == self.pieces[i + 1](self.breakpoints[i + 1])
                   for i in range(len(self.pieces) - 1))

    def render(self, var: str = "e") -> str:
        return "; ".join(f"{p.render(var)} on [{format_rational(a)},{format_rational(b)}]"
                         for a, b, p in self.intervals())

    def to_json_obj(self) -> dict:
        return {
            "breakpoints": [format_rational(b) for b in self.breakpoints],
            "pieces": [{"coeffs": [format_rational(c) for c in p.coeffs] or ["0"]}
                       for p in self.pieces],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> PiecewisePoly:
        bps = [parse_rational(b) for b in obj["breakpoints"]]
        pieces = [UPoly(tuple(parse_rational(c) for c in piece["coeffs"])) for piece in obj["pieces"]]
        return cls(bps, pieces)

    @classmethod
    def from_json(cls, text: str) -> PiecewisePoly:
        return cls.from_json_obj(json.loads(text))


def pw_eval(f: PiecewisePoly, eps: Number) -> Fraction:
    """Evaluate ``f`` at ``eps`` using the closed-left piece convention."""
    return f.piece_at(eps)(eps)
