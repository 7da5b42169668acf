"""Concrete nilsystems on tori and on the Heisenberg nilmanifold.

Points are tuples of :class:`~nilprog.torus.TorusWord` lifts.  Systems are
affine-polynomial maps with a registered closed form for the ``n``-th iterate,
checked against stepwise iteration.  Maps between tori act on lifts; the
halving in ``h`` is applied to the lift as produced by the dynamics.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from gmpy2 import mpq as Q

from .errors import ClosedFormMismatch, DomainViolation
from .nilgroup import GroupElement, unitriangular
from .torus import (ALPHA, BETA, N, TorusWord, parse_number, points_equal,
                    subs_point, torus_equal)

CHECK_RANGE = 50

Point = tuple  # tuple[TorusWord, ...]


# --------------------------------------------------------------------------
# The group Z x T x T with (k,x,y)(k',x',y') = (k+k', x+x', y+y'+2kx')
# --------------------------------------------------------------------------

def example_group_mul(p, q):
    """``(k, x, y) * (k', x', y') = (k + k', x + x', y + y' + 2 k x')``."""
    k, x, y = p
    k2, x2, y2 = q
    if not (isinstance(k, int) and isinstance(k2, int)):
        raise TypeError("first coordinates must be integers")
    x, y, x2, y2 = (TorusWord.lift(c) for c in (x, y, x2, y2))
    return (k + k2, x + x2, y + y2 + x2 * (2 * k))


def example_group_inverse(p):
    k, x, y = p
    x, y = TorusWord.lift(x), TorusWord.lift(y)
    return (-k, -x, -y + x * (2 * k))


def example_group_commutator(p, q):
    """``p q p^-1 q^-1``."""
    return example_group_mul(example_group_mul(p, q),
                             example_group_mul(example_group_inverse(p), example_group_inverse(q)))


def example_group_equal(p, q) -> bool:
    return p[0] == q[0] and points_equal(p[1:], q[1:])


def example_translate(t, point):
    """Left translation of the coset ``(0, x, y) Gamma`` by ``t``, renormalised to ``k = 0``."""
    k, x, y = example_group_mul(t, (0,) + tuple(point))
    # right multiplication by (-k, 0, 0) in Gamma leaves x, y unchanged
    return (x, y)


# --------------------------------------------------------------------------
# Systems
# --------------------------------------------------------------------------

def _t_step(p, prm):
    x, y = p
    a = prm["alpha"]
    return (x + a, y + x * 2 + a)


def _t_inverse(p, prm):
    x, y = p
    a = prm["alpha"]
    return (x - a, y - x * 2 + a)


def _t_closed(p, n, prm):
    x, y = p
    a = prm["alpha"]
    return (x + a * n, y + x * 2 * n + a * n * n)


def _s_step(p, prm):
    x, y = p
    a, b = prm["alpha"], prm["beta"]
    return (x + a, y + x * 2 + a + b)


def _s_inverse(p, prm):
    x, y = p
    a, b = prm["alpha"], prm["beta"]
    return (x - a, y - x * 2 + a - b)


def _s_closed(p, n, prm):
    x, y = p
    a, b = prm["alpha"], prm["beta"]
    return (x + a * n, y + x * 2 * n + a * n * n + b * n)


def _u_step(p, prm):
    return _s_step(p[:2], prm) + (p[2] + prm["beta"],)


def _u_inverse(p, prm):
    return _s_inverse(p[:2], prm) + (p[2] - prm["beta"],)


def _u_closed(p, n, prm):
    return _s_closed(p[:2], n, prm) + (p[2] + prm["beta"] * n,)


def _rot_step(p, prm):
    return tuple(c + prm[f"v{i}"] for i, c in enumerate(p))


def _rot_inverse(p, prm):
    return tuple(c - prm[f"v{i}"] for i, c in enumerate(p))


def _rot_closed(p, n, prm):
    return tuple(c + prm[f"v{i}"] * n for i, c in enumerate(p))


_KINDS: dict[str, tuple[Callable, Callable, Callable]] = {
    "T": (_t_step, _t_inverse, _t_closed),
    "S": (_s_step, _s_inverse, _s_closed),
    "U": (_u_step, _u_inverse, _u_closed),
    "rotation": (_rot_step, _rot_inverse, _rot_closed),
}


@dataclass(frozen=True)
class TorusSystem:
    """An invertible map of a torus with a closed form for its iterates.

    ``kind`` selects a registered rule, or is ``"product"`` for a coordinatewise
    product of ``parts``.  ``power`` composes the rule with itself.
    """

    name: str
    dim: int
    kind: str
    params: tuple = ()
    power: int = 1
    parts: tuple = ()

    @property
    def param_map(self) -> dict:
        return dict(self.params)

    def _split(self, point):
        out, i = [], 0
        for part in self.parts:
            out.append(tuple(point[i:i + part.dim]))
            i += part.dim
        return out

    def _check(self, point):
        if len(point) != self.dim:
            raise ValueError(f"{self.name} acts on {self.dim} coordinates, got {len(point)}")
        return tuple(TorusWord.lift(c) for c in point)

    def step(self, point) -> Point:
        point = self._check(point)
        if self.kind == "product":
            return sum((part.step(p) for part, p in zip(self.parts, self._split(point))), ())
        rule = _KINDS[self.kind][0]
        for _ in range(self.power):
            point = rule(point, self.param_map)
        return point

    def inverse_step(self, point) -> Point:
        point = self._check(point)
        if self.kind == "product":
            return sum((part.inverse_step(p) for part, p in zip(self.parts, self._split(point))), ())
        rule = _KINDS[self.kind][1]
        for _ in range(self.power):
            point = rule(point, self.param_map)
        return point

    def closed_form(self, point, n) -> Point:
        """``n``-th iterate from the registered formula; ``n`` is an integer or a word."""
        point = self._check(point)
        if self.kind == "product":
            return sum((part.closed_form(p, n) for part, p in zip(self.parts, self._split(point))), ())
        n = TorusWord.lift(n) * self.power
        return _KINDS[self.kind][2](point, n, self.param_map)

    def iterate(self, point, n: int) -> Point:
        """Stepwise ``n``-th iterate; negative ``n`` uses the inverse."""
        point = self._check(point)
        move = self.step if n >= 0 else self.inverse_step
        for _ in range(abs(n)):
            point = move(point)
        return point

    def substitute(self, values: Mapping[str, object]) -> TorusSystem:
        """Same system with numbers (or words) put in for the formal parameters."""
        params = tuple((k, TorusWord.lift(v).subs(params=values)) for k, v in self.params)
        parts = tuple(p.substitute(values) for p in self.parts)
        return TorusSystem(self.name, self.dim, self.kind, params, self.power, parts)

    def __pow__(self, k: int) -> TorusSystem:
        if k < 1:
            raise ValueError("power must be positive")
        if k == 1:
            return self
        if self.kind == "product":
            parts = tuple(p ** k for p in self.parts)
            return TorusSystem(f"({self.name})^{k}", self.dim, "product", (), 1, parts)
        return TorusSystem(f"{self.name}^{k}", self.dim, self.kind, self.params, self.power * k)

    def __mul__(self, other: TorusSystem) -> TorusSystem:
        return product_system(self, other)


def T_system(alpha=ALPHA) -> TorusSystem:
    """``(x, y) -> (x + alpha, y + 2x + alpha)``."""
    return TorusSystem("T", 2, "T", (("alpha", TorusWord.lift(alpha)),))


def S_system(beta=BETA, alpha=ALPHA) -> TorusSystem:
    """``(x, y) -> (x + alpha, y + 2x + alpha + beta)``."""
    return TorusSystem(f"S[{beta}]", 2, "S", (("alpha", TorusWord.lift(alpha)), ("beta", TorusWord.lift(beta))))


def U_system(beta=BETA, alpha=ALPHA) -> TorusSystem:
    """``(x, y, z) -> (x + alpha, y + 2x + alpha + beta, z + beta)``."""
    return TorusSystem(f"U[{beta}]", 3, "U", (("alpha", TorusWord.lift(alpha)), ("beta", TorusWord.lift(beta))))


def rotation(*vector, name: str | None = None) -> TorusSystem:
    params = tuple((f"v{i}", TorusWord.lift(v)) for i, v in enumerate(vector))
    label = name or "rot(" + ", ".join(str(TorusWord.lift(v)) for v in vector) + ")"
    return TorusSystem(label, len(vector), "rotation", params)


def TZ_system(alpha=ALPHA) -> TorusSystem:
    """``x -> x + alpha`` on the circle."""
    return rotation(alpha, name="T_Z")


def R_system(c, alpha=ALPHA) -> TorusSystem:
    """``(x, y) -> (x + alpha, y + c)``."""
    return rotation(alpha, c, name=f"R[{c}]")


def product_system(*systems: TorusSystem) -> TorusSystem:
    parts: list = []
    for s in systems:
        parts.extend(s.parts if s.kind == "product" else [s])
    name = " x ".join(s.name for s in parts)
    return TorusSystem(name, sum(s.dim for s in parts), "product", (), 1, tuple(parts))


def progression_system(sys: TorusSystem, l: int, generator: str = "tau") -> TorusSystem:
    """``tau_l = T x T^2 x ... x T^l`` or ``sigma_l = T x ... x T`` (``l`` factors)."""
    if l < 1:
        raise ValueError("l must be at least 1")
    if generator == "tau":
        return product_system(*(sys ** j for j in range(1, l + 1)))
    if generator == "sigma":
        return product_system(*([sys] * l))
    raise ValueError(f"unknown generator {generator!r}")


def verify_closed_form(sys: TorusSystem, x0, upto: int = CHECK_RANGE) -> None:
    """Raise :class:`ClosedFormMismatch` unless stepwise and closed-form iterates agree on ``0..upto``."""
    point = tuple(TorusWord.lift(c) for c in x0)
    current = point
    for n in range(upto + 1):
        expected = sys.closed_form(point, n)
        if not points_equal(current, expected):
            raise ClosedFormMismatch(f"{sys.name} at n={n}: stepwise {current} vs closed form {expected}")
        current = sys.step(current)


def iterate_closed_form(sys: TorusSystem, x0, n=N, verify: bool = True) -> Point:
    """``n``-th iterate of ``x0``: symbolic for ``n = N``, substituted for integer ``n``."""
    if verify:
        verify_closed_form(sys, x0)
    return sys.closed_form(x0, n)


def progression_orbit(sys: TorusSystem, x, l: int, n, generator: str = "tau") -> Point:
    """``(tau_l)^n`` or ``(sigma_l)^n`` applied to the diagonal point ``(x, ..., x)``."""
    prog = progression_system(sys, l, generator)
    diag = tuple(x) * l
    return prog.closed_form(diag, n)


# --------------------------------------------------------------------------
# Maps
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusMap:
    """Map between tori acting on lifts, with an optional domain constraint."""

    name: str
    source_dim: int
    target_dim: int
    rule: Callable
    domain: Callable | None = None
    domain_text: str = ""

    def in_domain(self, point) -> bool:
        return self.domain is None or bool(self.domain(point))

    def __call__(self, point) -> Point:
        point = tuple(TorusWord.lift(c) for c in point)
        if len(point) != self.source_dim:
            raise ValueError(f"{self.name} expects {self.source_dim} coordinates")
        if not self.in_domain(point):
            raise DomainViolation(f"{self.name}: {tuple(map(str, point))} violates {self.domain_text}")
        return tuple(self.rule(point))


def identity_map(dim: int) -> TorusMap:
    return TorusMap("id", dim, dim, lambda p: p)


def h_map() -> TorusMap:
    """``(x, y, z, w) -> (x, y, (4y - w)/2)`` on ``z = 2x``."""
    return TorusMap("h", 4, 3, lambda p: (p[0], p[1], (p[1] * 4 - p[3]) / 2),
                    domain=lambda p: torus_equal(p[2], p[0] * 2), domain_text="z = 2x")


def h_inverse_map() -> TorusMap:
    """``(x, y, z) -> (x, y, 2x, 4y - 2z)``."""
    return TorusMap("h^-1", 3, 4, lambda p: (p[0], p[1], p[0] * 2, p[1] * 4 - p[2] * 2))


def g_map(a=TorusWord.param("a"), b=TorusWord.param("b")) -> TorusMap:
    """``(x, y, z, w) -> (x - a, y - b, z - a, w - b)``."""
    a, b = TorusWord.lift(a), TorusWord.lift(b)
    return TorusMap("g", 4, 4, lambda p: (p[0] - a, p[1] - b, p[2] - a, p[3] - b))


def pi_map() -> TorusMap:
    """``(x, y) -> x``."""
    return TorusMap("pi", 2, 1, lambda p: (p[0],))


# --------------------------------------------------------------------------
# Intertwining
# --------------------------------------------------------------------------

@dataclass
class IntertwiningResult:
    holds: bool
    mode: str
    checked: int
    witness: dict | None = None

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {"holds": self.holds, "mode": self.mode, "checked": self.checked, "witness": self.witness}


def _witness(n, lhs, rhs) -> dict:
    return {"n": str(n), "lhs": [str(c) for c in lhs], "rhs": [str(c) for c in rhs]}


def check_intertwining(fmap: TorusMap, sys_a: TorusSystem, sys_b: TorusSystem, x0,
                       mode: str = "symbolic", nmax: int = 100,
                       params: Mapping[str, object] | None = None) -> IntertwiningResult:
    """Check ``fmap(A^n x0) = B^n fmap(x0)``.

    ``symbolic`` compares closed forms as identities in ``n`` and the formal
    parameters.  ``numeric`` substitutes exact rationals for the parameters and
    iterates both systems stepwise for ``n`` in ``[-nmax, nmax]``.
    """
    x0 = tuple(TorusWord.lift(c) for c in x0)
    if mode == "symbolic":
        verify_closed_form(sys_a, x0)
        start = fmap(x0)
        verify_closed_form(sys_b, start)
        lhs = fmap(sys_a.closed_form(x0, N))
        rhs = sys_b.closed_form(start, N)
        if points_equal(lhs, rhs):
            return IntertwiningResult(True, mode, 1)
        return IntertwiningResult(False, mode, 1, _witness("n", lhs, rhs))
    if mode != "numeric":
        raise ValueError(f"unknown mode {mode!r}")
    values = {k: parse_number(v) for k, v in (params or {}).items()}
    a, b = sys_a.substitute(values), sys_b.substitute(values)
    point = subs_point(x0, params=values)
    leftover = {p for c in point for p in c.params()} | {p for _, w in a.params for p in w.params()}
    if leftover:
        raise ValueError(f"no value supplied for {sorted(leftover)}")
    mapped = _substituted_map(fmap, values)
    start = mapped(point)
    checked = 0
    for direction in (1, -1):
        pa, pb = point, start
        for n in range(0 if direction == 1 else 1, nmax + 1):
            if n:
                pa = a.step(pa) if direction == 1 else a.inverse_step(pa)
                pb = b.step(pb) if direction == 1 else b.inverse_step(pb)
            lhs = mapped(pa)
            checked += 1
            if not points_equal(lhs, pb):
                return IntertwiningResult(False, mode, checked, _witness(direction * n, lhs, pb))
    return IntertwiningResult(True, mode, checked)


def _substituted_map(fmap: TorusMap, values) -> TorusMap:
    rule = fmap.rule
    return TorusMap(fmap.name, fmap.source_dim, fmap.target_dim,
                    lambda p: subs_point(rule(p), params=values), fmap.domain, fmap.domain_text)


# --------------------------------------------------------------------------
# Factors
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HeisenbergNilsystem:
    """Left translation by ``t`` on ``U(3, R) / U(3, Z)``.

    Points are coset representatives with entries reduced to ``[0, 1)``.
    """

    t: GroupElement

    def __post_init__(self):
        if self.t.spec != unitriangular(3):
            raise ValueError("t must lie in U(3)")

    @staticmethod
    def reduce(g: GroupElement) -> GroupElement:
        """Representative of ``g Gamma`` with all entries in ``[0, 1)``."""
        spec = g.spec
        a, b, c = (spec.entry(g.coords, i, j) for i, j in ((1, 2), (2, 3), (1, 3)))
        ka, kb = int(math.floor(a)), int(math.floor(b))
        # g * [[1, -ka, k], [0, 1, -kb]] has corner c - a*kb + k
        c = c - a * kb
        c = c - int(math.floor(c))
        return spec.element(spec.from_matrix([[1, a - ka, c], [0, 1, b - kb], [0, 0, 1]]))

    def step(self, g: GroupElement) -> GroupElement:
        return self.reduce(self.t * g)


@dataclass(frozen=True)
class Factor:
    source: object
    factor: object
    projection: Callable
    description: str = ""

    def check(self, samples: Sequence) -> bool:
        """``projection(step(p)) = factor.step(projection(p))`` on every sample."""
        for p in samples:
            lhs = self.projection(self.source.step(p))
            rhs = self.factor.step(self.projection(p))
            if not points_equal(lhs, rhs):
                return False
        return True


def _heisenberg_projection(g: GroupElement) -> Point:
    spec = g.spec
    return (TorusWord.const(spec.entry(g.coords, 1, 2)), TorusWord.const(spec.entry(g.coords, 2, 3)))


def factor_project(system, d: int) -> Factor:
    """Maximal ``d``-step factor of a registered model, with its projection.

    ``system`` is ``"example41"`` (the skew product ``T`` of class 2), a
    :class:`TorusSystem` of kind ``T``, or a :class:`HeisenbergNilsystem`.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    if system == "example41":
        system = T_system()
    if isinstance(system, TorusSystem) and system.kind == "T" and system.power == 1:
        if d >= 2:
            return Factor(system, system, lambda p: tuple(p), "identity factor")
        alpha = system.param_map["alpha"]
        return Factor(system, TZ_system(alpha), pi_map(), "circle rotation by alpha, pi(x, y) = x")
    if isinstance(system, HeisenbergNilsystem):
        if d >= 2:
            return Factor(system, system, lambda g: g, "identity factor")
        spec = system.t.spec
        t = system.t.coords
        rot = rotation(spec.entry(t, 1, 2), spec.entry(t, 2, 3), name="heisenberg-abelianisation")
        return Factor(system, rot, _heisenberg_projection, "2-torus rotation by the (1,2), (2,3) entries of t")
    raise ValueError(f"unsupported system {system!r}")


# --------------------------------------------------------------------------
# Occupancy
# --------------------------------------------------------------------------

_SCALE = 1 << 64
_MASK = _SCALE - 1


@dataclass(frozen=True)
class OccupancyReport:
    system: str
    grid: int
    samples: int
    occupied: int
    fraction: float
    params: dict = field(default_factory=dict)
    dim: int = 2

    def to_dict(self) -> dict:
        return {"system": self.system, "grid": self.grid, "samples": self.samples,
                "occupied": self.occupied, "fraction": self.fraction,
                "params": dict(self.params), "dim": self.dim}


def _fixed_point(q: Q) -> int:
    """``frac(q)`` as a 64-bit fixed-point integer (round to nearest)."""
    frac = q - math.floor(q)
    return int(math.floor(frac * _SCALE + Q(1, 2))) & _MASK


def _numeric_coefficients(word: TorusWord, values: Mapping[str, Q]) -> list[int]:
    coeffs = []
    for deg in range(word.n_degree + 1):
        total = Q(0)
        for (d, p), c in word.terms.items():
            if d != deg:
                continue
            if p is None:
                total += c
            elif p in values:
                total += c * values[p]
            else:
                raise ValueError(f"no value supplied for parameter {p!r}")
        coeffs.append(_fixed_point(total))
    return coeffs


def _fixed_orbit(coords: Sequence[list[int]], start: int, stop: int) -> np.ndarray:
    """Fixed-point orbit coordinates for ``n`` in ``[start, stop)``; wraparound is mod 1."""
    n = np.arange(start, stop, dtype=np.uint64)
    out = np.zeros((len(coords), stop - start), dtype=np.uint64)
    with np.errstate(over="ignore"):
        for i, coeffs in enumerate(coords):
            acc = np.zeros_like(n)
            power = np.ones_like(n)
            for c in coeffs:
                acc += np.uint64(c) * power
                power *= n
            out[i] = acc
    return out


def _to_unit(fixed: np.ndarray) -> np.ndarray:
    return (fixed >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def orbit_fixed(sys: TorusSystem, x0, params: Mapping[str, object], n_samples: int, start: int = 0):
    values = {k: parse_number(v) for k, v in params.items()}
    closed = sys.closed_form(tuple(TorusWord.lift(c) for c in x0), N)
    coords = [_numeric_coefficients(w, values) for w in closed]
    return _fixed_orbit(coords, start, start + n_samples)


def orbit_samples(sys: TorusSystem, x0, params: Mapping[str, object], n_samples: int) -> np.ndarray:
    """``(n_samples, dim)`` array of orbit points in ``[0, 1)``, starting at ``n = 0``."""
    return _to_unit(orbit_fixed(sys, x0, params, n_samples)).T


def occupancy(sys: TorusSystem, x0, params: Mapping[str, object], n_samples: int, grid: int,
              shards: int = 1) -> OccupancyReport:
    """Fraction of the ``grid^dim`` cells visited by the orbit segment ``n = 0..N-1``.

    The orbit is evaluated from the closed form in 64-bit fixed point, so a
    sharded run visits exactly the same cells as the sequential one.
    """
    if n_samples < 1 or grid < 2 or shards < 1:
        raise ValueError("need N >= 1, grid >= 2, shards >= 1")
    bounds = np.linspace(0, n_samples, shards + 1).astype(int)
    visited = None
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if hi <= lo:
            continue
        fixed = orbit_fixed(sys, x0, params, int(hi - lo), start=int(lo))
        cells = np.minimum((_to_unit(fixed) * grid).astype(np.int64), grid - 1)
        flat = np.zeros(fixed.shape[1], dtype=np.int64)
        for row in cells:
            flat = flat * grid + row
        part = np.unique(flat)
        visited = part if visited is None else np.union1d(visited, part)
    occupied = int(visited.size)
    total = grid ** sys.dim
    return OccupancyReport(sys.name, grid, n_samples, occupied, occupied / total,
                           {k: str(v) for k, v in sorted(params.items())}, sys.dim)


def write_orbit_csv(path, sys: TorusSystem, x0, params: Mapping[str, object], n_samples: int) -> None:
    samples = orbit_samples(sys, x0, params, n_samples)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n"] + [f"coord{i + 1}" for i in range(sys.dim)])
        for n, row in enumerate(samples):
            writer.writerow([n] + [repr(float(v)) for v in row])
