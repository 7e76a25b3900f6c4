"""Three-dimensional generalized Catalan numbers Q_{l,m,n}.

Q_{l,m,n} counts words with ``l`` a's, ``m`` b's and ``n`` c's in which
every prefix has #b <= #a and every suffix has #c <= #a.  Reading a word as
a monotone lattice path (a -> +X, b -> +Y, c -> +Z) from the origin to
(l, m, n), the two conditions become ``Y <= X`` and ``n - Z <= l - X`` at
every visited point.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterator, Optional

DEFAULT_WORD_BUDGET = 12
DEFAULT_DP_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    budget = "enum-budget"


def _check_nonneg(*args: int) -> None:
    if any(a < 0 for a in args):
        raise ValueError("letter counts must be nonnegative")


def total_words(l: int, m: int, n: int) -> int:
    """Multinomial (l+m+n)! / (l! m! n!)."""
    _check_nonneg(l, m, n)
    return factorial(l + m + n) // (factorial(l) * factorial(m) * factorial(n))


def _ratio(num: int, *den_args: int) -> int:
    # a negative factorial argument means no path of that kind exists
    if any(d < 0 for d in den_args):
        return 0
    den = 1
    for d in den_args:
        den *= factorial(d)
    q, rem = divmod(num, den)
    if rem:
        raise ArithmeticError(f"non-integral count {num}/{den}")
    return q


def reflection_counts(l: int, m: int, n: int) -> tuple[int, int, int]:
    """Paths crossing plane 1, plane 2, and both: (Q1, Q2, Q12)."""
    _check_nonneg(l, m, n)
    top = factorial(l + m + n)
    q1 = _ratio(top, l + 1, m - 1, n)
    q2 = _ratio(top, l + 1, m, n - 1)
    q12 = _ratio(top, l + 2, m - 1, n - 1)
    return q1, q2, q12


def q3d_formula(l: int, m: int, n: int) -> int:
    """Closed form, valid when m + n < l + 2."""
    _check_nonneg(l, m, n)
    if not m + n < l + 2:
        raise ValueError(f"closed form needs m + n < l + 2, got ({l}, {m}, {n})")
    s = total_words(l, m, n)
    num = (l + 1) * (l + 2) - (m + n) * (l + 2) + m * n
    value = Fraction(s * num, (l + 1) * (l + 2))
    if value.denominator != 1:
        raise ArithmeticError(f"closed form is not integral at ({l}, {m}, {n})")
    return int(value)


def _corrections(l: int, m: int, n: int, printed: bool) -> Fraction:
    d = m + n - l - 2
    top = factorial(l + m + n)
    if printed:
        a, b = (n + 1, n + 1), (n, n + 2)
    else:
        a, b = (l + 1, l + 1), (l, l + 2)
    first = Fraction(top, factorial(d) * factorial(a[0]) * factorial(a[1]))
    second = Fraction(top, factorial(d) * factorial(b[0]) * factorial(b[1]))
    return first - second


def q3d_general(l: int, m: int, n: int, printed: bool = False) -> Fraction | int:
    """Q_{l,m,n} for m, n <= l.

    The correction terms used when ``m + n >= l + 2`` carry ``(l+1)!(l+1)!``
    and ``l!(l+2)!`` in their denominators; this form agrees with
    :func:`count_paths_dp` on the whole checked grid.  ``printed=True``
    evaluates the variant with ``(n+1)!(n+1)!`` and ``n!(n+2)!`` instead,
    which only agrees when ``n == l``; its value is returned as a Fraction
    because it need not be an integer.
    """
    _check_nonneg(l, m, n)
    if m > l or n > l:
        raise ValueError(f"general form needs m, n <= l, got ({l}, {m}, {n})")
    if m + n < l + 2:
        return q3d_formula(l, m, n)
    s = total_words(l, m, n)
    base = Fraction(s) * (1 - Fraction(m + n, l + 1) + Fraction(m * n, (l + 1) * (l + 2)))
    value = base + _corrections(l, m, n, printed)
    if printed:
        return value
    if value.denominator != 1:
        raise ArithmeticError(f"general form is not integral at ({l}, {m}, {n})")
    return int(value)


def count_paths_dp(l: int, m: int, n: int, budget: int = DEFAULT_DP_BUDGET) -> int:
    """Lattice paths (0,0,0) -> (l,m,n) staying in Y <= X and n - Z <= l - X.

    Sweeps X-layers, keeping one (m+1) x (n+1) table at a time.
    """
    _check_nonneg(l, m, n)
    if (l + 1) * (m + 1) * (n + 1) > budget:
        raise BudgetExceeded(f"lattice DP budget {budget} exceeded")

    def ok(x: int, y: int, z: int) -> bool:
        return y <= x and n - z <= l - x

    prev: Optional[list[list[int]]] = None
    for x in range(l + 1):
        cur = [[0] * (n + 1) for _ in range(m + 1)]
        for y in range(m + 1):
            row = cur[y]
            for z in range(n + 1):
                if not ok(x, y, z):
                    continue
                if x == y == z == 0:
                    row[z] = 1
                    continue
                v = 0
                if prev is not None:
                    v += prev[y][z]
                if y:
                    v += cur[y - 1][z]
                if z:
                    v += row[z - 1]
                row[z] = v
        prev = cur
    return prev[m][n]


def iter_words(l: int, m: int, n: int) -> Iterator[str]:
    """All arrangements of the multiset {a^l, b^m, c^n}, lexicographic."""
    counts = {"a": l, "b": m, "c": n}
    total = l + m + n
    word: list[str] = []

    def rec() -> Iterator[str]:
        if len(word) == total:
            yield "".join(word)
            return
        for ch in "abc":
            if counts[ch]:
                counts[ch] -= 1
                word.append(ch)
                yield from rec()
                word.pop()
                counts[ch] += 1

    yield from rec()


def word_ok(word: str) -> bool:
    """Prefix condition #b <= #a and suffix condition #c <= #a."""
    a = b = 0
    for ch in word:
        a += ch == "a"
        b += ch == "b"
        if b > a:
            return False
    a = c = 0
    for ch in reversed(word):
        a += ch == "a"
        c += ch == "c"
        if c > a:
            return False
    return True


def enumerate_words(l: int, m: int, n: int, budget: int = DEFAULT_WORD_BUDGET,
                    return_words: bool = False):
    """Count (and optionally list) the admissible words by brute force."""
    _check_nonneg(l, m, n)
    if l + m + n > budget:
        raise BudgetExceeded(f"word length {l + m + n} exceeds enumeration budget {budget}")
    words = [w for w in iter_words(l, m, n) if word_ok(w)]
    if return_words:
        return len(words), words
    return len(words)
