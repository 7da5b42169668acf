"""Polynomial sequences in a nilpotent group and their normal forms.

A Hall-Petresco sequence of class ``s`` is ``n -> g0 g1^C(n,1) ... gs^C(n,s)``
with ``g_i`` in the ``i``-th lower central term.  It is determined by its
values at ``n = 0..s``, which is what :func:`hp_extract` exploits: the normal
form is solved greedily from those values and, when more values are supplied,
checked against them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence

from gmpy2 import mpq as Q

from .binomial import binom, binomial_product_expand
from .errors import CommutationUnsafe, SpecMismatch, ValidationMismatch, WeightViolation
from .nilgroup import (
    GroupElement,
    NilGroupSpec,
    Unitriangular,
    commutator,
    power,
    random_element,
    rational_str,
    root,
    weight,
)


@dataclass(frozen=True)
class HPSequence:
    """Normal form ``(g0; g1, ..., gs)`` of a polynomial sequence."""

    spec: NilGroupSpec
    base: GroupElement
    coords: tuple[GroupElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if len(self.coords) != self.spec.nclass:
            raise ValueError(f"expected {self.spec.nclass} coefficients, got {len(self.coords)}")
        for g in (self.base, *self.coords):
            if g.spec != self.spec:
                raise SpecMismatch("sequence coefficient from a different group")

    # constructors ---------------------------------------------------------
    @classmethod
    def identity(cls, spec: NilGroupSpec) -> HPSequence:
        e = spec.identity()
        return cls(spec, e, (e,) * spec.nclass)

    @classmethod
    def constant(cls, g: GroupElement) -> HPSequence:
        """``t^Delta``: the constant sequence ``t, t, t, ...``."""
        e = g.spec.identity()
        return cls(g.spec, g, (e,) * g.spec.nclass)

    @classmethod
    def binomial_power(cls, g: GroupElement, k: int) -> HPSequence:
        """``n -> g^C(n, k)``; ``k = 1`` gives ``t* = (1, t, t^2, ...)``."""
        spec = g.spec
        if k == 0:
            return cls.constant(g)
        e = spec.identity()
        coords = [e] * spec.nclass
        coords[k - 1] = g
        return cls(spec, e, tuple(coords))

    @classmethod
    def from_function(cls, fn: Callable[[int], GroupElement], spec: NilGroupSpec,
                      validate: bool = True) -> HPSequence:
        s = spec.nclass
        count = 2 * s + 2 if validate else s + 1
        return hp_extract([fn(n) for n in range(count)], spec)

    @classmethod
    def monomial_power(cls, g: GroupElement, k: int) -> HPSequence:
        """``n -> g^(n^k)``."""
        return cls.from_function(lambda n: power(g, n ** k), g.spec)

    # views ----------------------------------------------------------------
    def __call__(self, n: int) -> GroupElement:
        return hp_eval(self, n)

    @property
    def factors(self) -> tuple[GroupElement, ...]:
        return (self.base,) + self.coords

    def is_hall_petresco(self) -> bool:
        return all(weight(g) >= i for i, g in enumerate(self.coords, start=1))

    def __str__(self) -> str:
        parts = [_fmt(self.base)]
        for i, g in enumerate(self.coords, start=1):
            if not g.is_identity():
                parts.append(f"{_fmt(g)}^C(n,{i})")
        return " * ".join(parts)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "base": self.base.to_json(),
            "coords": [g.to_json() for g in self.coords],
        }

    @classmethod
    def from_dict(cls, data: dict) -> HPSequence:
        spec = NilGroupSpec.from_dict(data["spec"])
        return cls(spec, spec.element(data["base"]), tuple(spec.element(c) for c in data["coords"]))


def _fmt(g: GroupElement) -> str:
    if g.is_identity():
        return "1"
    return "(" + ",".join(rational_str(c) for c in g.coords) + ")"


def hp_eval(phi: HPSequence, n: int) -> GroupElement:
    """``g0 g1^C(n,1) ... gs^C(n,s)`` multiplied in that order."""
    if n < 0:
        raise ValueError("sequences are indexed by n >= 0")
    result = phi.base
    for i, g in enumerate(phi.coords, start=1):
        e = binom(n, i)
        if e and not g.is_identity():
            result = result * power(g, e)
    return result


def hp_extract(values: Sequence[GroupElement], spec: NilGroupSpec | None = None) -> HPSequence:
    """Normal form from the values ``Phi(0..s)``; further values are validated.

    Raises :class:`ValidationMismatch` if a supplied value beyond ``Phi(s)``
    disagrees with the extracted normal form.
    """
    values = list(values)
    spec = spec or values[0].spec
    s = spec.nclass
    if len(values) < s + 1:
        raise ValueError(f"need at least {s + 1} values, got {len(values)}")
    base = values[0]
    coords: list[GroupElement] = []
    for k in range(1, s + 1):
        prefix = base
        for i, g in enumerate(coords, start=1):
            prefix = prefix * power(g, binom(k, i))
        coords.append(prefix.inverse() * values[k])
    phi = HPSequence(spec, base, tuple(coords))
    for n in range(s + 1, len(values)):
        if hp_eval(phi, n) != values[n]:
            raise ValidationMismatch(f"value at n={n} disagrees with the extracted normal form")
    return phi


def _pointwise(phi: HPSequence, psi: HPSequence, op) -> HPSequence:
    if phi.spec != psi.spec:
        raise SpecMismatch("sequences over different groups")
    s = phi.spec.nclass
    values = [op(hp_eval(phi, n), hp_eval(psi, n)) for n in range(2 * s + 2)]
    return hp_extract(values, phi.spec)


def hp_mul(phi: HPSequence, psi: HPSequence) -> HPSequence:
    """Pointwise product, re-extracted and checked on ``n = 0..2s+1``."""
    return _pointwise(phi, psi, lambda a, b: a * b)


def hp_inverse(phi: HPSequence) -> HPSequence:
    s = phi.spec.nclass
    return hp_extract([hp_eval(phi, n).inverse() for n in range(2 * s + 2)], phi.spec)


def hp_commutator(phi: HPSequence, psi: HPSequence) -> HPSequence:
    """Pointwise commutator ``n -> [phi(n), psi(n)]``."""
    return _pointwise(phi, psi, commutator)


def hp_level(phi: HPSequence) -> int:
    """Largest ``d`` with ``phi`` in ``HP(G)_d``; ``0`` if ``phi`` is not in ``HP(G)``."""
    if not phi.is_hall_petresco():
        return 0
    s = phi.spec.nclass
    w_base = weight(phi.base)
    w = [weight(g) for g in phi.coords]
    for d in range(s, 0, -1):
        if w_base >= d and all(x >= d for x in w[:d]):
            return d
    return 0


def hp_level_by_values(phi: HPSequence) -> int:
    """Level read off the values: the minimum weight of ``phi(n)`` on ``0..2s+1``."""
    s = phi.spec.nclass
    lowest = min(weight(hp_eval(phi, n)) for n in range(2 * s + 2))
    return s if lowest == math.inf else min(int(lowest), s)


def random_hp_sequence(spec: NilGroupSpec, rng, level: int = 1, based: bool = True,
                       **kwargs) -> HPSequence:
    """Random element of ``HP(G)_level`` (of ``HP_e`` when ``based`` is false)."""
    s = spec.nclass
    e = spec.identity()
    base = random_element(spec, rng, min_weight=level, **kwargs) if based else e
    coords = []
    for i in range(1, s + 1):
        need = max(i, level)
        coords.append(random_element(spec, rng, min_weight=need, **kwargs) if need <= s else e)
    return HPSequence(spec, base, tuple(coords))


# --------------------------------------------------------------------------
# Multi-index expansions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MultiIndexExpansion:
    """Coefficients ``z_L`` of ``prod_L z_L^(C(n1,l1)...C(nr,lr))`` in lexicographic order."""

    spec: NilGroupSpec
    r: int
    table: dict = field(default_factory=dict)
    ordering: str = "lex"

    def indices(self) -> list[tuple[int, ...]]:
        return sorted(self.table)

    def __getitem__(self, index) -> GroupElement:
        if isinstance(index, int):
            index = (index,)
        return self.table.get(tuple(index), self.spec.identity())

    def nontrivial(self) -> dict:
        return {k: v for k, v in sorted(self.table.items()) if not v.is_identity()}

    def evaluate(self, ns: Sequence[int]) -> GroupElement:
        ns = tuple(ns)
        result = self.spec.identity()
        for idx in self.indices():
            e = 1
            for n, l in zip(ns, idx):
                e *= binom(n, l)
                if not e:
                    break
            if e:
                result = result * power(self.table[idx], e)
        return result

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "r": self.r,
            "ordering": self.ordering,
            "table": [{"index": list(k), "z": v.to_json()} for k, v in sorted(self.table.items())],
        }

    @classmethod
    def from_dict(cls, data: dict) -> MultiIndexExpansion:
        spec = NilGroupSpec.from_dict(data["spec"])
        table = {tuple(e["index"]): spec.element(e["z"]) for e in data["table"]}
        return cls(spec, int(data["r"]), table, data.get("ordering", "lex"))


def grid_expand(fn: Callable[..., GroupElement], spec: NilGroupSpec, r: int = 1,
                validate: bool = True) -> MultiIndexExpansion:
    """Solve for the ``z_L`` of a function on ``Z_+^r`` by a triangular sweep.

    The unknowns are indexed by the grid ``{0..s}^r``.  At the grid point
    ``n`` every factor with ``L <= n`` componentwise appears, and ``z_n`` is the
    last of them in lexicographic order with exponent 1, so sweeping the grid
    by total degree determines each ``z_n`` from values already solved.
    """
    if not 1 <= r <= 3:
        raise ValueError("r must be 1, 2 or 3")
    s = spec.nclass
    grid = list(product(range(s + 1), repeat=r))
    values = {n: fn(*n) for n in grid}
    table: dict = {}
    for n in sorted(grid, key=lambda t: (sum(t), t)):
        prefix = spec.identity()
        for idx in grid:  # lexicographic
            if idx == n or any(a > b for a, b in zip(idx, n)):
                continue
            e = 1
            for a, b in zip(n, idx):
                e *= binom(a, b)
            prefix = prefix * power(table[idx], e)
        table[n] = prefix.inverse() * values[n]
    expansion = MultiIndexExpansion(spec, r, table)
    for idx, z in table.items():
        if weight(z) < sum(idx):
            raise WeightViolation(f"z{list(idx)} has weight {weight(z)} < {sum(idx)}")
    if validate:
        if r == 1:
            extra = [(n,) for n in range(s + 1, 2 * s + 2)]
        else:
            extra = [n for n in product(range(s + 2), repeat=r) if max(n) == s + 1]
        for n in extra:
            if expansion.evaluate(n) != fn(*n):
                raise ValidationMismatch(f"expansion disagrees with the function at {n}")
    return expansion


def dark_expand(factors: Sequence[tuple[GroupElement, object]], r: int = 1,
                spec: NilGroupSpec | None = None, validate: bool = True) -> MultiIndexExpansion:
    """Rewrite ``prod_j g_j^(p_j(n))`` as an ordered product of binomial powers.

    For ``r = 1`` each ``p_j`` is a :class:`BinomialPoly` (or any callable);
    for ``r > 1`` each ``p_j`` is a callable on ``r`` integers.  Raises
    :class:`WeightViolation` when an extracted ``z_L`` has weight below
    ``sum(L)``, which happens exactly when some ``deg p_j`` exceeds
    ``weight(g_j)``.
    """
    factors = list(factors)
    if spec is None:
        if not factors:
            raise ValueError("empty factor list needs a spec")
        spec = factors[0][0].spec

    def exponent(p, ns):
        value = p(*ns)
        value = Q(value)
        if value.denominator != 1:
            raise ValueError(f"exponent {value} at {ns} is not an integer")
        return int(value)

    def phi(*ns):
        result = spec.identity()
        for g, p in factors:
            result = result * power(g, exponent(p, ns))
        return result

    return grid_expand(phi, spec, r, validate=validate)


# --------------------------------------------------------------------------
# Power decompositions
# --------------------------------------------------------------------------

def power_decompose(z: GroupElement, indices: Sequence[int]) -> list[GroupElement]:
    """``[w_d, ..., w_l]`` with ``z^(C(n,l1)...C(n,ld)) = w_l^(n^l) ... w_d^(n^d)``.

    ``w = root(z, l1!...ld!)`` and ``w_j = w^(a_j)`` where ``a_j`` are the
    monomial coefficients of ``l1!...ld! C(n,l1)...C(n,ld)``.  Requires ``z``
    in ``G_l`` with ``l = l1 + ... + ld``.  All ``w_j`` are powers of ``w``,
    so the order of the factors on the right is immaterial.
    """
    indices = list(indices)
    d = len(indices)
    if d < 1:
        raise ValueError("power decomposition needs at least one index")
    l = sum(indices)
    if weight(z) < l:
        raise CommutationUnsafe(f"weight {weight(z)} of z is below {l}")
    w = root(z, math.prod(math.factorial(i) for i in indices))
    a = binomial_product_expand(indices)
    return [power(w, a[j]) for j in range(d, l + 1)]


def power_decompose_value(ws: Sequence[GroupElement], d: int, n: int) -> GroupElement:
    """``w_l^(n^l) ... w_d^(n^d)`` for the output of :func:`power_decompose`."""
    result = ws[0].spec.identity()
    for j in range(d + len(ws) - 1, d - 1, -1):
        result = result * power(ws[j - d], n ** j)
    return result


# --------------------------------------------------------------------------
# Lattice splittings in the matrix model
# --------------------------------------------------------------------------

def _truncate(g: GroupElement, d: int) -> GroupElement:
    spec = g.spec
    return GroupElement(spec, tuple(c if w < d else Q(0) for c, w in zip(g.coords, spec.weights)))


def in_GdGamma(g: GroupElement, d: int) -> bool:
    """``g`` lies in ``G_d Gamma`` iff its entries on superdiagonals ``< d`` are integers."""
    return all(c.denominator == 1 for c, w in zip(g.coords, g.spec.weights) if w < d)


def split_GdGamma(g: GroupElement, d: int) -> tuple[GroupElement, GroupElement]:
    """``(h, gamma)`` with ``g = h * gamma``, ``h`` in ``G_d`` and ``gamma`` integral.

    Entries of a product on superdiagonals below ``d`` depend only on the
    factors' entries there, so ``gamma`` is ``g`` with the higher entries zeroed.
    """
    if not isinstance(g.spec, Unitriangular):
        raise TypeError("lattice splitting is only available in the matrix model")
    if not in_GdGamma(g, d):
        raise ValueError(f"element is not in G_{d} Gamma")
    gamma = _truncate(g, d)
    return g * gamma.inverse(), gamma


@dataclass(frozen=True)
class LatticeSplit:
    psi: HPSequence
    theta: HPSequence
    level: int


def lattice_decompose(phi: HPSequence, d: int) -> LatticeSplit:
    """Split ``phi`` in ``(G_d Gamma)^Z+ ∩ HP(G)`` as ``psi * theta``.

    ``theta = gamma * gamma_1^C(n,1) ... gamma_(d-1)^C(n,d-1)`` collects the
    lattice parts of the base and of the coefficients below ``d``; ``psi`` is
    the pointwise quotient and must land in ``HP(G)_d``.
    """
    spec = phi.spec
    if not isinstance(spec, Unitriangular):
        raise TypeError("lattice splitting is only available in the matrix model")
    s = spec.nclass
    if not 1 <= d <= s:
        raise ValueError("d out of range")
    for g in phi.factors:
        if not in_GdGamma(g, d):
            raise ValueError(f"sequence does not take values in G_{d} Gamma")
    e = spec.identity()
    _, gamma = split_GdGamma(phi.base, d)
    lattice_coords = []
    for m, g in enumerate(phi.coords, start=1):
        lattice_coords.append(split_GdGamma(g, d)[1] if m < d else e)
    theta = HPSequence(spec, gamma, tuple(lattice_coords))
    psi = hp_mul(phi, hp_inverse(theta))
    level = hp_level(psi)
    if level < d:
        raise AssertionError(f"quotient has level {level} < {d}")
    for n in range(2 * s + 2):
        if any(c.denominator != 1 for c in hp_eval(theta, n).coords):
            raise AssertionError(f"lattice factor leaves Gamma at n={n}")
    return LatticeSplit(psi, theta, level)


def random_GdGamma_sequence(spec: Unitriangular, rng, d: int, bound: int = 3) -> HPSequence:
    """Random ``phi`` in ``HP(G)`` whose coefficients lie in ``G_d Gamma``."""

    def coefficient(min_w):
        coords = []
        for w in spec.weights:
            if w < min_w:
                coords.append(Q(0))
            elif w < d:
                coords.append(Q(rng.randint(-bound, bound)))
            else:
                coords.append(Q(rng.randint(-bound, bound), rng.choice((1, 2, 3))))
        return GroupElement(spec, tuple(coords))

    s = spec.nclass
    return HPSequence(spec, coefficient(1), tuple(coefficient(i) for i in range(1, s + 1)))

