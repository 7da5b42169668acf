"""Membership in subgroups generated by truncated polynomial sequences.

A sequence is projected to its values at ``n = 1..l`` and each value to
logarithmic coordinates, giving a vector in the Lie algebra of ``G^l``.  In the
divisible models used here the subgroup generated by a family of elements has
rational hull ``exp(L)``, where ``L`` is the rational Lie subalgebra generated by
their logarithms, and the ``k``-th lower central term of that hull is
``exp(L_k)``.  Membership therefore reduces to exact linear algebra.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from gmpy2 import mpq as Q

from .errors import DepthExceeded, SpecMismatch
from .hallpetresco import HPSequence, hp_commutator, hp_eval
from .nilgroup import NilGroupSpec, power, rational_str

MAX_TRUNCATION = 8


def sequence_vector(phi: HPSequence, truncation: int) -> tuple:
    """Logarithms of ``phi(1), ..., phi(l)`` concatenated."""
    spec = phi.spec
    out: list = []
    for n in range(1, truncation + 1):
        out.extend(spec.log_coords(hp_eval(phi, n).coords))
    return tuple(out)


def _blockwise_bracket(spec: NilGroupSpec, truncation: int):
    dim = spec.dim

    def bracket(u, v):
        out: list = []
        for b in range(truncation):
            sl = slice(b * dim, (b + 1) * dim)
            out.extend(spec.bracket(u[sl], v[sl]))
        return tuple(out)

    return bracket


class _Echelon:
    """Row-echelon basis that remembers each row as a combination of labelled inputs."""

    def __init__(self):
        self.rows: dict[int, tuple[list, dict]] = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec, combo=None):
        vec = list(vec)
        combo = dict(combo or {})
        for p in sorted(self.rows):
            c = vec[p]
            if c:
                row, row_combo = self.rows[p]
                for i in range(p, len(vec)):
                    if row[i]:
                        vec[i] -= c * row[i]
                for lab, k in row_combo.items():
                    combo[lab] = combo.get(lab, Q(0)) - c * k
        return vec, {k: v for k, v in combo.items() if v}

    def add(self, vec, label) -> bool:
        rest, combo = self.reduce(vec, {label: Q(1)})
        pivot = next((i for i, c in enumerate(rest) if c), None)
        if pivot is None:
            return False
        inv = 1 / rest[pivot]
        self.rows[pivot] = ([c * inv for c in rest], {k: v * inv for k, v in combo.items()})
        return True

    def express(self, vec):
        """``None`` if ``vec`` is outside the span, else its coefficients on the inputs."""
        rest, combo = self.reduce(vec)
        if any(rest):
            return None
        return {k: -v for k, v in combo.items()}


def lie_closure(vectors: Sequence, labels: Sequence[str], bracket, depth: int):
    """Spanning elements ``[(label, vector)]`` of the Lie algebra generated by ``vectors``."""
    span = _Echelon()
    elements = []
    frontier = []
    for lab, v in zip(labels, vectors):
        if span.add(v, lab):
            elements.append((lab, v))
            frontier.append((lab, v))
    gens = list(zip(labels, vectors))
    rounds = 0
    while frontier:
        if rounds >= depth:
            raise DepthExceeded(f"closure still growing after {depth} rounds")
        rounds += 1
        new = []
        for (ga, gv), (fa, fv) in product(gens, frontier):
            lab = f"[{ga},{fa}]"
            w = bracket(gv, fv)
            if any(w) and span.add(w, lab):
                new.append((lab, w))
        elements.extend(new)
        frontier = new
    return elements


def lower_central_term(elements, bracket, step: int):
    """Spanning elements of ``L_step`` where ``L_1 = span(elements)`` and ``L_(k+1) = [L_1, L_k]``."""
    current = elements
    for _ in range(step - 1):
        span = _Echelon()
        nxt = []
        for (xa, xv), (ca, cv) in product(elements, current):
            w = bracket(xv, cv)
            lab = f"[{xa},{ca}]"
            if any(w) and span.add(w, lab):
                nxt.append((lab, w))
        current = nxt
    return current


@dataclass
class SpanCheck:
    """Outcome of :func:`filtration_span_check`.

    ``witnesses[i]`` writes candidate ``i`` as a rational combination of the
    labelled spanning elements, i.e. its logarithm in the generated Lie
    algebra; ``failing`` is the index of the first candidate outside it.
    """

    holds: bool
    dimension: int
    witnesses: list = field(default_factory=list)
    failing: int | None = None

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "dimension": self.dimension,
            "failing": self.failing,
            "witnesses": [{k: rational_str(v) for k, v in sorted(w.items())} for w in self.witnesses],
        }


def filtration_span_check(generators: Sequence[HPSequence], candidates: Sequence[HPSequence],
                          truncation: int, step: int = 1, depth: int | None = None,
                          labels: Sequence[str] | None = None) -> SpanCheck:
    """Decide whether every candidate lies in the ``step``-th lower central term
    of the group generated by ``generators``, after truncation to ``n = 1..l``.
    """
    if not 1 <= truncation <= MAX_TRUNCATION:
        raise ValueError(f"truncation must be in 1..{MAX_TRUNCATION}")
    if step < 1:
        raise ValueError("step must be positive")
    seqs = list(generators) + list(candidates)
    if not seqs:
        return SpanCheck(True, 0)
    spec = seqs[0].spec
    if any(p.spec != spec for p in seqs):
        raise SpecMismatch("sequences over different groups")
    if depth is None:
        depth = 2 * spec.nclass
    labels = list(labels) if labels is not None else [f"g{i}" for i in range(len(generators))]
    bracket = _blockwise_bracket(spec, truncation)
    vectors = [sequence_vector(g, truncation) for g in generators]
    elements = lie_closure(vectors, labels, bracket, depth)
    if step > 1:
        elements = lower_central_term(elements, bracket, step)
    span = _Echelon()
    for lab, v in elements:
        span.add(v, lab)
    witnesses = []
    for i, cand in enumerate(candidates):
        coeffs = span.express(sequence_vector(cand, truncation))
        if coeffs is None:
            return SpanCheck(False, len(span), witnesses, i)
        witnesses.append(coeffs)
    return SpanCheck(True, len(span), witnesses)


# --------------------------------------------------------------------------
# Generating families
# --------------------------------------------------------------------------

def power_generators(spec: NilGroupSpec, d: int) -> list[HPSequence]:
    """``n -> e^(n^k)`` for basis elements ``e`` of weight ``>= k`` and ``k = d..s``.

    Rational powers of these generate the group ``A_d`` spanned by all
    ``(g^(n^k))`` with ``g`` in ``G_k``.
    """
    out = []
    for k in range(d, spec.nclass + 1):
        for i, w in enumerate(spec.weights):
            if w >= k:
                out.append(HPSequence.monomial_power(spec.basis_element(i), k))
    return out


def hpe_generators(spec: NilGroupSpec) -> list[HPSequence]:
    """``n -> e^C(n,k)`` for basis elements ``e`` of weight ``>= k``; these generate ``HP_e(G)``."""
    out = []
    for k in range(1, spec.nclass + 1):
        for i, w in enumerate(spec.weights):
            if w >= k:
                out.append(HPSequence.binomial_power(spec.basis_element(i), k))
    return out


def monomial_generators(spec: NilGroupSpec, k: int, min_weight: int) -> list[HPSequence]:
    """``n -> e^(n^k)`` for basis elements ``e`` of weight ``>= min_weight``."""
    return [HPSequence.monomial_power(spec.basis_element(i), k)
            for i, w in enumerate(spec.weights) if w >= min_weight]


def commutator_candidates(generators: Sequence[HPSequence], max_length: int | None = None,
                          min_length: int = 2) -> list[HPSequence]:
    """Left-normed sequence commutators ``[...[g_i1, g_i2], ..., g_ik]`` of the generators.

    In a nilpotent group these (for ``k >= m``) generate the ``m``-th lower
    central term of the group generated by ``generators``.
    """
    if not generators:
        return []
    s = generators[0].spec.nclass
    max_length = s if max_length is None else max_length
    out = []
    layer = list(generators)
    for length in range(2, max_length + 1):
        layer = [hp_commutator(c, g) for c in layer for g in generators]
        layer = [c for c in layer if not all(x.is_identity() for x in c.factors)]
        if length >= min_length:
            out.extend(layer)
        if not layer:
            break
    return out


def scaled(phi: HPSequence, k: int) -> HPSequence:
    """The pointwise power ``n -> phi(n)^k`` (used to build non-generator candidates)."""
    return HPSequence.from_function(lambda n: power(hp_eval(phi, n), k), phi.spec)
