"""Exact arithmetic in finitely generated rational nilpotent groups.

Two interchangeable models are provided:

* :class:`FreeNilpotent` -- the free nilpotent group of rank ``r`` and class
  ``s``, with elements stored in logarithmic coordinates against a Hall basis
  (standard bracketings of Lyndon words).  The group law is the
  Baker-Campbell-Hausdorff series truncated at the class.
* :class:`Unitriangular` -- upper unitriangular ``m x m`` rational matrices,
  with elements stored as their strictly-upper entries ordered by
  superdiagonal.

Both models are graded: coordinates are listed with non-decreasing weight, and
an element lies in the ``k``-th term of the lower central series exactly when
every coordinate of weight ``< k`` vanishes.
"""
from __future__ import annotations

import json
import math
from functools import lru_cache
from typing import Iterable, Sequence

from gmpy2 import mpq as Q

from .errors import DimensionOverflow, SpecMismatch

INFINITY = math.inf

MAX_RANK = 4
MAX_CLASS = 6
MAX_DIM = 64

# Bernoulli numbers B_2, B_4, B_6 (enough for class <= 7).
_BERNOULLI_EVEN = {2: Q(1, 6), 4: Q(-1, 30), 6: Q(1, 42)}

_ZERO = Q(0)

Coords = tuple  # tuple[mpq, ...]


def to_rational(value) -> Q:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are rejected."""
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a Fraction or a 'p/q' string")
    return Q(value)


def rational_str(q: Q) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# --------------------------------------------------------------------------
# Lyndon words and the Hall basis
# --------------------------------------------------------------------------

def lyndon_words(rank: int, max_len: int) -> list[tuple[int, ...]]:
    """All Lyndon words over ``0..rank-1`` of length ``<= max_len``, in lex order (Duval)."""
    words = []
    w = [-1]
    while w:
        w[-1] += 1
        words.append(tuple(w))
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == rank - 1:
            w.pop()
    return words


def witt_count(rank: int, k: int) -> int:
    """Dimension of the degree-``k`` part of the free Lie algebra on ``rank`` letters."""
    total = 0
    for d in range(1, k + 1):
        if k % d == 0:
            total += _mobius(d) * rank ** (k // d)
    return total // k


def _mobius(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def _standard_factorization(word, lyndon_set):
    for cut in range(1, len(word)):
        if word[cut:] in lyndon_set:
            return word[:cut], word[cut:]
    raise AssertionError(f"{word} has no Lyndon suffix")


def _tensor_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for u, a in p.items():
        for v, b in q.items():
            key = u + v
            out[key] = out.get(key, 0) + a * b
    return {k: c for k, c in out.items() if c}


def _tensor_bracket(p: dict, q: dict) -> dict:
    out = _tensor_mul(p, q)
    for k, c in _tensor_mul(q, p).items():
        out[k] = out.get(k, 0) - c
    return {k: c for k, c in out.items() if c}


class _LieEmbedding:
    """Hall basis elements written out in the free associative algebra."""

    def __init__(self, rank: int, nclass: int):
        words = sorted(lyndon_words(rank, nclass), key=lambda w: (len(w), w))
        lyndon_set = set(words)
        self.words = words
        self.polys: dict[tuple, dict] = {}
        self.labels: dict[tuple, str] = {}
        for w in words:
            if len(w) == 1:
                self.polys[w] = {w: 1}
                self.labels[w] = f"x{w[0] + 1}"
            else:
                u, v = _standard_factorization(w, lyndon_set)
                self.polys[w] = _tensor_bracket(self.polys[u], self.polys[v])
                self.labels[w] = f"[{self.labels[u]},{self.labels[v]}]"
            # Triangularity: the bracketing of w is w plus lexicographically larger words.
            poly = self.polys[w]
            assert poly.get(w) == 1 and all(x >= w for x in poly), w
        self.by_degree: dict[int, list[tuple]] = {}
        for w in words:
            self.by_degree.setdefault(len(w), []).append(w)

    def decompose(self, lie_poly: dict, degree: int) -> dict[tuple, Q]:
        """Coordinates of a homogeneous Lie polynomial in the Hall basis."""
        rest = dict(lie_poly)
        coeffs = {}
        for w in self.by_degree.get(degree, []):
            c = rest.get(w, 0)
            if c:
                coeffs[w] = Q(c)
                for k, v in self.polys[w].items():
                    rest[k] = rest.get(k, 0) - c * v
        if any(rest.values()):
            raise AssertionError("element is not a Lie polynomial of the expected degree")
        return coeffs


# --------------------------------------------------------------------------
# Group presentations
# --------------------------------------------------------------------------

class NilGroupSpec:
    """Common interface of the two coordinate models.

    Subclasses provide ``_mul``, ``log_coords``, ``exp_coords`` and
    ``bracket``; everything else is shared.
    """

    model: str
    nclass: int
    labels: tuple[str, ...]
    weights: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.weights)

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        return self is other or (isinstance(other, NilGroupSpec) and self._key() == other._key())

    def __hash__(self):
        return hash(self._key())

    # element construction -------------------------------------------------
    def identity(self) -> GroupElement:
        return GroupElement(self, (Q(0),) * self.dim)

    def element(self, coords: Iterable) -> GroupElement:
        coords = tuple(to_rational(c) for c in coords)
        if len(coords) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(coords)}")
        return GroupElement(self, coords)

    def basis_element(self, index: int, value=1) -> GroupElement:
        coords = [Q(0)] * self.dim
        coords[index] = to_rational(value)
        return GroupElement(self, tuple(coords))

    def from_log(self, vector: Sequence) -> GroupElement:
        return GroupElement(self, self.exp_coords(tuple(to_rational(c) for c in vector)))

    def index_of_weight(self, k: int) -> list[int]:
        return [i for i, w in enumerate(self.weights) if w == k]

    # coordinate-level operations -----------------------------------------
    def _scale_log(self, coords: Coords, factor) -> Coords:
        return self.exp_coords(tuple(factor * c for c in self.log_coords(coords)))

    def _inverse(self, coords: Coords) -> Coords:
        return self._scale_log(coords, -1)

    def _weight(self, coords: Coords):
        for c, w in zip(coords, self.weights):
            if c:
                return w
        return INFINITY

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @staticmethod
    def from_json(text: str) -> NilGroupSpec:
        return NilGroupSpec.from_dict(json.loads(text))

    @staticmethod
    def from_dict(data: dict) -> NilGroupSpec:
        model = data.get("model")
        if model == "unitriangular":
            return unitriangular(int(data["dimension"]))
        if model == "free":
            return FreeNilpotent.from_dict(data)
        raise ValueError(f"unknown model {model!r}")


class FreeNilpotent(NilGroupSpec):
    """Free nilpotent group in logarithmic Hall-basis coordinates."""

    model = "free"

    def __init__(self, rank: int, nclass: int, labels, weights, brackets: dict):
        self.rank = rank
        self.nclass = nclass
        self.labels = tuple(labels)
        self.weights = tuple(weights)
        # brackets[(i, j)] for i < j -> tuple of (k, coefficient)
        self.brackets = {k: tuple(v) for k, v in brackets.items() if v}
        self._check_invariants()
        # rows[i] lists (j, terms of [e_i, e_j]) over the nonzero brackets only
        rows: list[list] = [[] for _ in range(self.dim)]
        for (i, j), terms in sorted(self.brackets.items()):
            rows[i].append((j, tuple((k, Q(c)) for k, c in terms)))
            rows[j].append((i, tuple((k, -Q(c)) for k, c in terms)))
        self._rows = [tuple(r) for r in rows]

    def _check_invariants(self):
        if any(a > b for a, b in zip(self.weights, self.weights[1:])):
            raise ValueError("weights must be non-decreasing along the basis")
        if self.weights and (self.weights[0] < 1 or self.weights[-1] > self.nclass):
            raise ValueError("weights must lie in 1..class")
        for (i, j), terms in self.brackets.items():
            if not i < j:
                raise ValueError("bracket table keys must satisfy i < j")
            target = self.weights[i] + self.weights[j]
            for k, _ in terms:
                if self.weights[k] != target:
                    raise ValueError(f"bracket ({i},{j}) leaves the weight grading")

    def _key(self):
        return ("free", self.rank, self.nclass, self.labels, self.weights,
                tuple(sorted(self.brackets.items())))

    def __repr__(self):
        return f"FreeNilpotent(rank={self.rank}, class={self.nclass}, dim={self.dim})"

    def generator(self, i: int) -> GroupElement:
        """The ``i``-th free generator (1-based)."""
        return self.basis_element(i - 1)

    def log_coords(self, coords: Coords) -> Coords:
        return coords

    def exp_coords(self, vector: Coords) -> Coords:
        return vector

    def _scale_log(self, coords, factor):
        return tuple(factor * c for c in coords)

    def _inverse(self, coords):
        return tuple(-c for c in coords)

    def bracket(self, u: Coords, v: Coords) -> Coords:
        out = [_ZERO] * self.dim
        rows = self._rows
        for i, a in enumerate(u):
            if not a:
                continue
            for j, terms in rows[i]:
                b = v[j]
                if b:
                    ab = a * b
                    for k, c in terms:
                        out[k] += ab * c
        return tuple(out)

    def _mul(self, x: Coords, y: Coords) -> Coords:
        s = self.nclass
        xpy = tuple(a + b for a, b in zip(x, y))
        if s == 1:
            return xpy
        xmy = tuple(a - b for a, b in zip(x, y))
        br = self.bracket
        zs = [None, xpy]
        nested: dict = {(): xpy}

        def nest(ks):
            # [Z_{k1}, [Z_{k2}, ... [Z_{km}, X + Y]]]
            val = nested.get(ks)
            if val is None:
                val = br(zs[ks[0]], nest(ks[1:]))
                nested[ks] = val
            return val

        for n in range(1, s):
            acc = [Q(1, 2) * c for c in br(xmy, zs[n])]
            for p in range(1, n // 2 + 1):
                coef = _BERNOULLI_EVEN[2 * p] / math.factorial(2 * p)
                for ks in _compositions(n, 2 * p):
                    term = nest(ks)
                    for idx, c in enumerate(term):
                        if c:
                            acc[idx] += coef * c
            zs.append(tuple(c / (n + 1) for c in acc))
        out = list(xpy)
        for z in zs[2:]:
            for idx, c in enumerate(z):
                if c:
                    out[idx] += c
        return tuple(out)

    def to_dict(self) -> dict:
        return {
            "model": "free",
            "rank": self.rank,
            "class": self.nclass,
            "basis": [{"label": lab, "weight": w} for lab, w in zip(self.labels, self.weights)],
            "brackets": [
                {"pair": [i, j], "terms": [[k, rational_str(c)] for k, c in terms]}
                for (i, j), terms in sorted(self.brackets.items())
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> FreeNilpotent:
        basis = data["basis"]
        brackets = {
            tuple(entry["pair"]): tuple((int(k), Q(c)) for k, c in entry["terms"])
            for entry in data["brackets"]
        }
        return cls(int(data["rank"]), int(data["class"]),
                   [b["label"] for b in basis], [int(b["weight"]) for b in basis], brackets)


@lru_cache(maxsize=None)
def _compositions(n: int, parts: int) -> tuple[tuple[int, ...], ...]:
    if parts == 1:
        return ((n,),) if n >= 1 else ()
    out = []
    for first in range(1, n - parts + 2):
        for rest in _compositions(n - first, parts - 1):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def hall_basis(rank: int, nclass: int, max_dim: int = MAX_DIM) -> FreeNilpotent:
    """Free nilpotent group of the given rank and class over the rationals."""
    if not 1 <= rank <= MAX_RANK:
        raise ValueError(f"rank must be in 1..{MAX_RANK}")
    if not 1 <= nclass <= MAX_CLASS:
        raise ValueError(f"class must be in 1..{MAX_CLASS}")
    size = sum(witt_count(rank, k) for k in range(1, nclass + 1))
    if size > max_dim:
        raise DimensionOverflow(f"basis size {size} exceeds cap {max_dim}")
    emb = _LieEmbedding(rank, nclass)
    index = {w: i for i, w in enumerate(emb.words)}
    brackets = {}
    for i, u in enumerate(emb.words):
        for j in range(i + 1, len(emb.words)):
            v = emb.words[j]
            deg = len(u) + len(v)
            if deg > nclass:
                continue
            coeffs = emb.decompose(_tensor_bracket(emb.polys[u], emb.polys[v]), deg)
            if coeffs:
                brackets[(i, j)] = tuple(sorted((index[w], c) for w, c in coeffs.items()))
    return FreeNilpotent(rank, nclass, [emb.labels[w] for w in emb.words],
                         [len(w) for w in emb.words], brackets)


class Unitriangular(NilGroupSpec):
    """Upper unitriangular ``m x m`` matrices with rational entries."""

    model = "unitriangular"

    def __init__(self, m: int):
        if m < 2:
            raise ValueError("dimension must be at least 2")
        if m - 1 > MAX_CLASS:
            raise DimensionOverflow(f"class {m - 1} exceeds cap {MAX_CLASS}")
        self.m = m
        self.nclass = m - 1
        self.positions = tuple((i, i + k) for k in range(1, m) for i in range(m - k))
        self.index = {p: n for n, p in enumerate(self.positions)}
        self.labels = tuple(f"e{i + 1}{j + 1}" for i, j in self.positions)
        self.weights = tuple(j - i for i, j in self.positions)

    def _key(self):
        return ("unitriangular", self.m)

    def __repr__(self):
        return f"Unitriangular({self.m})"

    def to_dict(self) -> dict:
        return {"model": "unitriangular", "dimension": self.m}

    def E(self, i: int, j: int, value=1) -> GroupElement:
        """Elementary matrix ``I + value * e_ij`` (1-based indices, ``i < j``)."""
        return self.basis_element(self.index[(i - 1, j - 1)], value)

    def entry(self, coords: Coords, i: int, j: int) -> Q:
        return coords[self.index[(i - 1, j - 1)]]

    def to_matrix(self, coords: Coords) -> list[list[Q]]:
        mat = [[Q(int(r == c)) for c in range(self.m)] for r in range(self.m)]
        for (i, j), c in zip(self.positions, coords):
            mat[i][j] = c
        return mat

    def from_matrix(self, mat) -> Coords:
        for r in range(self.m):
            for c in range(r + 1):
                if mat[r][c] != (1 if r == c else 0):
                    raise ValueError("matrix is not upper unitriangular")
        return tuple(Q(mat[i][j]) for i, j in self.positions)

    def _mul(self, x: Coords, y: Coords) -> Coords:
        a = self.to_matrix(x)
        b = self.to_matrix(y)
        out = []
        for i, j in self.positions:
            total = a[i][j] + b[i][j]
            for k in range(i + 1, j):
                total += a[i][k] * b[k][j]
            out.append(total)
        return tuple(out)

    def _nil_mul(self, a: Coords, b: Coords) -> Coords:
        # product of strictly upper triangular matrices
        out = []
        for i, j in self.positions:
            total = Q(0)
            for k in range(i + 1, j):
                total += a[self.index[(i, k)]] * b[self.index[(k, j)]]
            out.append(total)
        return tuple(out)

    def log_coords(self, coords: Coords) -> Coords:
        result = [Q(0)] * len(coords)
        power = coords
        k = 1
        while any(power):
            sign = 1 if k % 2 else -1
            for n, c in enumerate(power):
                result[n] += Q(sign, k) * c
            power = self._nil_mul(power, coords)
            k += 1
        return tuple(result)

    def exp_coords(self, vector: Coords) -> Coords:
        result = [Q(0)] * len(vector)
        power = vector
        k = 1
        while any(power):
            inv = Q(1, math.factorial(k))
            for n, c in enumerate(power):
                result[n] += inv * c
            power = self._nil_mul(power, vector)
            k += 1
        return tuple(result)

    def bracket(self, u: Coords, v: Coords) -> Coords:
        return tuple(p - q for p, q in zip(self._nil_mul(u, v), self._nil_mul(v, u)))


@lru_cache(maxsize=None)
def unitriangular(m: int) -> Unitriangular:
    return Unitriangular(m)


# --------------------------------------------------------------------------
# Elements
# --------------------------------------------------------------------------

class GroupElement:
    """Immutable group element: a spec plus an exact coordinate tuple."""

    __slots__ = ("spec", "coords")

    def __init__(self, spec: NilGroupSpec, coords: Coords):
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, name, value):
        raise AttributeError("GroupElement is immutable")

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.coords == other.coords and self.spec == other.spec

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        body = ", ".join(rational_str(c) for c in self.coords)
        return f"<{self.spec.model} ({body})>"

    def __mul__(self, other: GroupElement) -> GroupElement:
        return mul(self, other)

    def __pow__(self, n: int) -> GroupElement:
        return power(self, n)

    def inverse(self) -> GroupElement:
        return GroupElement(self.spec, self.spec._inverse(self.coords))

    def is_identity(self) -> bool:
        return not any(self.coords)

    @property
    def log(self) -> Coords:
        return self.spec.log_coords(self.coords)

    def to_json(self) -> list[str]:
        return [rational_str(c) for c in self.coords]


def _check_same(a: GroupElement, b: GroupElement):
    if a.spec is not b.spec and a.spec != b.spec:
        raise SpecMismatch(f"{a.spec!r} vs {b.spec!r}")


def mul(a: GroupElement, b: GroupElement) -> GroupElement:
    _check_same(a, b)
    return GroupElement(a.spec, a.spec._mul(a.coords, b.coords))


def product_of(elements: Iterable[GroupElement], spec: NilGroupSpec | None = None) -> GroupElement:
    """Ordered product; ``spec`` is required when ``elements`` may be empty."""
    result = None
    for e in elements:
        result = e if result is None else mul(result, e)
    if result is None:
        if spec is None:
            raise ValueError("empty product needs a spec")
        return spec.identity()
    return result


def inverse(a: GroupElement) -> GroupElement:
    return a.inverse()


def power(a: GroupElement, n: int) -> GroupElement:
    if not isinstance(n, int):
        raise TypeError("power takes an integer exponent; use root() for fractional powers")
    if n == 0:
        return a.spec.identity()
    if n == 1:
        return a
    return GroupElement(a.spec, a.spec._scale_log(a.coords, n))


def root(a: GroupElement, m: int) -> GroupElement:
    """The unique ``b`` with ``b**m == a`` (torsion-free divisible group)."""
    if not isinstance(m, int) or m < 1:
        raise ValueError("root index must be a positive integer")
    return GroupElement(a.spec, a.spec._scale_log(a.coords, Q(1, m)))


def commutator(a: GroupElement, b: GroupElement) -> GroupElement:
    """``[a, b] = a b a^-1 b^-1``."""
    _check_same(a, b)
    return a * b * a.inverse() * b.inverse()


def nested_commutator(elements: Sequence[GroupElement]) -> GroupElement:
    """Left-normed ``[...[[x1, x2], x3], ..., xk]``."""
    result = elements[0]
    for e in elements[1:]:
        result = commutator(result, e)
    return result


def weight(a: GroupElement):
    """Largest ``k`` with ``a`` in ``G_k``; ``INFINITY`` for the identity."""
    return a.spec._weight(a.coords)


# --------------------------------------------------------------------------
# Cross-model map for the Heisenberg group
# --------------------------------------------------------------------------

def heisenberg_to_matrix(a: GroupElement) -> GroupElement:
    """Free rank-2 class-2 element to ``Unitriangular(3)``.

    ``x1 -> E12``, ``x2 -> E23``, ``[x1,x2] -> E13``.  Log coordinates
    ``(p, q, r)`` exponentiate to the matrix with corner ``r + pq/2``.
    """
    if a.spec != hall_basis(2, 2):
        raise SpecMismatch("expected the rank-2 class-2 free nilpotent group")
    p, q, r = a.coords
    u3 = unitriangular(3)
    return GroupElement(u3, (p, q, r + p * q / 2))


def matrix_to_heisenberg(a: GroupElement) -> GroupElement:
    if a.spec != unitriangular(3):
        raise SpecMismatch("expected Unitriangular(3)")
    p, q, c = a.coords
    return GroupElement(hall_basis(2, 2), (p, q, c - p * q / 2))


def random_element(spec: NilGroupSpec, rng, *, min_weight: int = 1, num: int = 3,
                   dens: Sequence[int] = (1, 2, 3)) -> GroupElement:
    """Element with small random rational coordinates on weights ``>= min_weight``."""
    coords = []
    for w in spec.weights:
        if w < min_weight:
            coords.append(Q(0))
        else:
            coords.append(Q(rng.randint(-num, num), rng.choice(dens)))
    return GroupElement(spec, tuple(coords))


def lattice_element(spec: Unitriangular, rng, bound: int = 3) -> GroupElement:
    """Integer-entry unitriangular matrix (an element of the standard lattice)."""
    return GroupElement(spec, tuple(Q(rng.randint(-bound, bound)) for _ in spec.positions))


def is_lattice(a: GroupElement) -> bool:
    if not isinstance(a.spec, Unitriangular):
        raise TypeError("the lattice is only modelled in the matrix model")
    return all(c.denominator == 1 for c in a.coords)


__all__ = [
    "INFINITY", "MAX_RANK", "MAX_CLASS", "MAX_DIM", "NilGroupSpec", "FreeNilpotent",
    "Unitriangular", "GroupElement", "hall_basis", "unitriangular", "lyndon_words",
    "witt_count", "mul", "product_of", "inverse", "power", "root", "commutator",
    "nested_commutator", "weight", "heisenberg_to_matrix", "matrix_to_heisenberg",
    "random_element", "lattice_element", "is_lattice", "to_rational", "rational_str",
]
