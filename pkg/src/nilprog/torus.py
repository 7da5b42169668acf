"""Symbolic torus coordinates.

A :class:`TorusWord` is a lift of one torus coordinate to the reals: a
polynomial of degree at most two in the iterate index ``n`` whose
coefficients are exact rationals plus rational multiples of the formal
parameters ``alpha, a, b, beta`` (and any other names a caller introduces).

Two words name the same torus point when their parameter parts agree exactly
and their parameter-free parts differ by an integer-valued polynomial in
``n``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from gmpy2 import mpq as Q

from .binomial import BinomialPoly

PARAMS = ("alpha", "a", "b", "beta")
MAX_N_DEGREE = 2

_CONST = None  # key used for the parameter-free part


def parse_number(value) -> Q:
    """Exact rational from an int, Fraction, mpq, float (exact binary value) or decimal string."""
    if isinstance(value, str):
        return Q(Fraction(value.strip()))
    if isinstance(value, float):
        return Q(Fraction(value))
    return Q(value)


class TorusWord:
    """Polynomial in ``n`` with coefficients in ``Q + Q*params``; immutable."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, str | None], object] | None = None):
        clean = {}
        for (deg, param), c in (terms or {}).items():
            c = Q(c)
            if c:
                if deg > MAX_N_DEGREE:
                    raise ValueError(f"degree {deg} in n exceeds {MAX_N_DEGREE}")
                clean[(deg, param)] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("TorusWord is immutable")

    # constructors ---------------------------------------------------------
    @classmethod
    def const(cls, value) -> TorusWord:
        return cls({(0, _CONST): parse_number(value)})

    @classmethod
    def param(cls, name: str, coeff=1) -> TorusWord:
        return cls({(0, name): Q(coeff)})

    @classmethod
    def n(cls) -> TorusWord:
        return cls({(1, _CONST): 1})

    @staticmethod
    def lift(value) -> TorusWord:
        return value if isinstance(value, TorusWord) else TorusWord.const(value)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other) -> TorusWord:
        other = TorusWord.lift(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return TorusWord(out)

    __radd__ = __add__

    def __neg__(self) -> TorusWord:
        return TorusWord({k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> TorusWord:
        return self + (-TorusWord.lift(other))

    def __rsub__(self, other) -> TorusWord:
        return TorusWord.lift(other) - self

    def __mul__(self, other) -> TorusWord:
        if not isinstance(other, TorusWord):
            c = parse_number(other)
            return TorusWord({k: c * v for k, v in self.terms.items()})
        if self.has_params() and other.has_params():
            raise ValueError("product of two parameter-dependent words is not linear")
        out: dict = {}
        for (d1, p1), c1 in self.terms.items():
            for (d2, p2), c2 in other.terms.items():
                key = (d1 + d2, p1 if p1 is not None else p2)
                out[key] = out.get(key, 0) + c1 * c2
        return TorusWord(out)

    __rmul__ = __mul__

    def __truediv__(self, k) -> TorusWord:
        inv = 1 / parse_number(k)
        return TorusWord({key: c * inv for key, c in self.terms.items()})

    # inspection -----------------------------------------------------------
    def has_params(self) -> bool:
        return any(p is not None for _, p in self.terms)

    def params(self) -> set[str]:
        return {p for _, p in self.terms if p is not None}

    @property
    def n_degree(self) -> int:
        return max((d for d, _ in self.terms), default=0)

    def coefficient(self, deg: int, param: str | None = None) -> Q:
        return self.terms.get((deg, param), Q(0))

    def is_constant(self) -> bool:
        """No parameters and no dependence on ``n``."""
        return all(key == (0, _CONST) for key in self.terms)

    @property
    def value(self) -> Q:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self.coefficient(0)

    def subs(self, n=None, params: Mapping[str, object] | None = None) -> TorusWord:
        """Substitute an integer (or word) for ``n`` and numbers or words for parameters."""
        params = params or {}
        out = TorusWord()
        for (deg, p), c in self.terms.items():
            if p is not None and p in params:
                base = TorusWord.lift(params[p]) * c
            elif p is None:
                base = TorusWord.const(c)
            else:
                base = TorusWord.param(p, c)
            if deg and n is not None:
                factor = TorusWord.lift(n)
                for _ in range(deg):
                    base = base * factor
            elif deg:
                base = base * TorusWord({(deg, _CONST): 1})
            out = out + base
        return out

    def __call__(self, n: int) -> TorusWord:
        return self.subs(n=n)

    def reduce(self) -> TorusWord:
        """Same torus point with the constant term moved into ``[0, 1)``."""
        c = self.coefficient(0)
        shift = c.numerator // c.denominator
        return self - shift if shift else self

    @property
    def is_reduced(self) -> bool:
        return 0 <= self.coefficient(0) < 1

    def __eq__(self, other):
        if isinstance(other, TorusWord):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items(), key=lambda kv: (kv[0][0], kv[0][1] or ""))))

    def __repr__(self):
        return f"TorusWord({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (deg, p), c in sorted(self.terms.items(), key=lambda kv: (-kv[0][0], kv[0][1] or "")):
            mono = {0: "", 1: "n", 2: "n^2"}[deg]
            sym = "*".join(x for x in (mono, p or "") if x)
            if not sym:
                parts.append(str(c))
            elif c == 1:
                parts.append(sym)
            elif c == -1:
                parts.append(f"-{sym}")
            else:
                parts.append(f"{c}*{sym}")
        return " + ".join(parts).replace("+ -", "- ")


def torus_equal(u, v) -> bool:
    """Equality on the torus for every integer ``n`` and every parameter value."""
    diff = TorusWord.lift(u) - TorusWord.lift(v)
    if diff.has_params():
        return False
    mono = [diff.coefficient(d) for d in range(diff.n_degree + 1)]
    return BinomialPoly.from_monomial(mono).is_integral()


def points_equal(p, q) -> bool:
    return len(p) == len(q) and all(torus_equal(a, b) for a, b in zip(p, q))


def subs_point(point, n=None, params=None) -> tuple[TorusWord, ...]:
    return tuple(TorusWord.lift(c).subs(n=n, params=params) for c in point)


def point(*coords) -> tuple[TorusWord, ...]:
    return tuple(TorusWord.lift(c) for c in coords)


N = TorusWord.n()
ALPHA = TorusWord.param("alpha")
A = TorusWord.param("a")
B = TorusWord.param("b")
BETA = TorusWord.param("beta")
ZERO = TorusWord()
