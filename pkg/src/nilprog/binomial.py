"""Integer-valued polynomials in the binomial basis ``C(n, 0), C(n, 1), ...``.

Coefficients are kept as exact rationals even when the result is integral;
integrality is asserted at conversion time rather than assumed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from gmpy2 import mpq as Q

MAX_DEGREE = 12


def binom(n: int, k: int) -> int:
    """Polynomial binomial coefficient ``n (n-1) ... (n-k+1) / k!``.

    For ``0 <= n < k`` this is ``0``; negative ``n`` follows the polynomial.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    num = 1
    for i in range(k):
        num *= n - i
    return num // math.factorial(k)


def falling_factorial_coeffs(k: int) -> list[int]:
    """Monomial coefficients (index = degree) of ``n (n-1) ... (n-k+1)``."""
    coeffs = [1]
    for i in range(k):
        nxt = [0] * (len(coeffs) + 1)
        for deg, c in enumerate(coeffs):
            nxt[deg + 1] += c
            nxt[deg] -= i * c
        coeffs = nxt
    return coeffs


def _poly_mul(p: Sequence[int], q: Sequence[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


@dataclass(frozen=True)
class BinomialPoly:
    """``sum coeffs[l] * C(n, l)`` with exact rational coefficients."""

    coeffs: Mapping[int, Q] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for l, c in self.coeffs.items():
            if l < 0:
                raise ValueError("binomial index must be non-negative")
            c = Q(c)
            if c:
                clean[int(l)] = c
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def from_list(cls, coeffs: Sequence) -> BinomialPoly:
        return cls({l: c for l, c in enumerate(coeffs)})

    @classmethod
    def from_monomial(cls, coeffs: Sequence) -> BinomialPoly:
        """Convert monomial coefficients (index = degree) to the binomial basis."""
        out: dict[int, Q] = {}
        for d, c in enumerate(coeffs):
            if c:
                for l, b in enumerate(_stirling_row(d)):
                    if b:
                        out[l] = out.get(l, Q(0)) + Q(c) * b
        return cls(out)

    @property
    def degree(self) -> int:
        return max(self.coeffs, default=-1)

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    def __call__(self, n: int) -> Q:
        return evaluate(self, n)

    def __add__(self, other: BinomialPoly) -> BinomialPoly:
        out = dict(self.coeffs)
        for l, c in other.coeffs.items():
            out[l] = out.get(l, Q(0)) + c
        return BinomialPoly(out)

    def __neg__(self) -> BinomialPoly:
        return BinomialPoly({l: -c for l, c in self.coeffs.items()})

    def __sub__(self, other: BinomialPoly) -> BinomialPoly:
        return self + (-other)

    def scale(self, factor) -> BinomialPoly:
        return BinomialPoly({l: Q(factor) * c for l, c in self.coeffs.items()})

    def is_integral(self) -> bool:
        """Integer-valued on the integers iff every binomial coefficient is an integer."""
        return all(c.denominator == 1 for c in self.coeffs.values())

    def to_monomial(self) -> list[Q]:
        out = [Q(0)] * (self.degree + 1)
        for l, c in self.coeffs.items():
            inv = Q(1, math.factorial(l))
            for d, f in enumerate(falling_factorial_coeffs(l)):
                out[d] += c * f * inv
        return out

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for l, c in self.coeffs.items():
            term = "1" if l == 0 else f"C(n,{l})"
            parts.append(f"{c}*{term}" if c != 1 else term)
        return " + ".join(parts).replace("+ -", "- ")


def evaluate(p: BinomialPoly, n: int) -> Q:
    """Exact value of ``p`` at the integer ``n`` (``C(n, l) = 0`` when ``0 <= n < l``)."""
    total = Q(0)
    for l, c in p.coeffs.items():
        total += c * binom(n, l)
    return total


def _stirling_row(d: int) -> list[int]:
    """``[l! S(d, l) for l in 0..d]``: the binomial-basis coefficients of ``n**d``."""
    # S(d, l) by the standard recurrence
    row = [1]
    for m in range(1, d + 1):
        nxt = [0] * (m + 1)
        for l in range(1, m + 1):
            nxt[l] = l * (row[l] if l < len(row) else 0) + row[l - 1]
        row = nxt
    return [math.factorial(l) * s for l, s in enumerate(row)]


def monomial_to_binomial(d: int) -> BinomialPoly:
    """Binomial-basis expansion ``n**d = sum_l b_l C(n, l)``; ``b_0 = 0`` for ``d >= 1``."""
    if not 1 <= d <= MAX_DEGREE:
        raise ValueError(f"degree must be in 1..{MAX_DEGREE}")
    poly = BinomialPoly.from_list(_stirling_row(d))
    if not poly.is_integral() or poly.coeffs.get(0):
        raise ArithmeticError(f"binomial expansion of n^{d} is not integral with b_0 = 0")
    return poly


def binomial_product_expand(indices: Sequence[int]) -> list[int]:
    """Monomial coefficients of ``l_1! ... l_d! * C(n, l_1) ... C(n, l_d)``.

    The result is indexed by degree, monic of degree ``sum(indices)`` and has
    zero constant term.
    """
    indices = list(indices)
    if not indices or any(l < 1 for l in indices):
        raise ValueError("indices must be positive")
    if sum(indices) > MAX_DEGREE:
        raise OverflowError(f"total degree {sum(indices)} exceeds {MAX_DEGREE}")
    coeffs = [1]
    for l in indices:
        coeffs = _poly_mul(coeffs, falling_factorial_coeffs(l))
    assert coeffs[-1] == 1 and coeffs[0] == 0
    return coeffs


def monomial_poly(d: int) -> BinomialPoly:
    """``n**d`` as a :class:`BinomialPoly` (``d = 0`` gives the constant 1)."""
    if d == 0:
        return BinomialPoly({0: 1})
    return monomial_to_binomial(d)


def binomial_poly(l: int) -> BinomialPoly:
    """The single basis polynomial ``C(n, l)``."""
    return BinomialPoly({l: 1})
