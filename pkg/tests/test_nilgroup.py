from fractions import Fraction

import pytest
from hypothesis import given, strategies as st
from gmpy2 import mpq as Q

from nilprog import errors
from nilprog.nilgroup import (INFINITY, GroupElement, NilGroupSpec, commutator, hall_basis,
                              heisenberg_to_matrix, inverse, lyndon_words, matrix_to_heisenberg,
                              nested_commutator, power, product_of, random_element, root,
                              to_rational, unitriangular, weight, witt_count)

from oracles import (free_group_series, mat_inv_unitriangular, mat_mul, unitriangular_matrix)

SHAPES = [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4), (2, 5)]

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=4)


def element_strategy(spec):
    return st.lists(rationals, min_size=spec.dim, max_size=spec.dim).map(spec.element)


def free_elements(shape, count):
    spec = hall_basis(*shape)
    return st.tuples(*[element_strategy(spec)] * count)


# --- Hall basis ------------------------------------------------------------

@pytest.mark.parametrize("rank,nclass", [(2, 6), (3, 4), (4, 3), (2, 5)])
def test_basis_dimensions_match_witt_formula(rank, nclass):
    spec = hall_basis(rank, nclass)
    for k in range(1, nclass + 1):
        assert spec.weights.count(k) == witt_count(rank, k)


def test_witt_counts_against_necklace_enumeration():
    # aperiodic necklaces of length k over r letters, counted by brute force
    from itertools import product
    for r in (2, 3):
        for k in range(1, 6):
            words = set()
            for w in product(range(r), repeat=k):
                rots = [w[i:] + w[:i] for i in range(k)]
                if len(set(rots)) == k:
                    words.add(min(rots))
            assert len(words) == witt_count(r, k) == len([w for w in lyndon_words(r, k) if len(w) == k])


def test_heisenberg_labels_and_weights():
    spec = hall_basis(2, 2)
    assert spec.labels == ("x1", "x2", "[x1,x2]")
    assert spec.weights == (1, 1, 2)
    assert hall_basis(2, 3).labels[3:] == ("[x1,[x1,x2]]", "[[x1,x2],x2]")


def test_dimension_cap():
    with pytest.raises(errors.DimensionOverflow):
        hall_basis(4, 4)
    with pytest.raises(ValueError):
        hall_basis(2, 7)


# --- group law -------------------------------------------------------------

def test_heisenberg_bch_example():
    spec = hall_basis(2, 2)
    a, b = spec.element([1, 0, 0]), spec.element([0, 1, 0])
    assert (a * b).coords == (1, 1, Q(1, 2))
    assert commutator(a, b).coords == (0, 0, 1)


@pytest.mark.parametrize("shape", SHAPES)
def test_group_law_matches_tensor_algebra(shape, rng):
    spec = hall_basis(*shape)
    from oracles import t_mul
    for _ in range(6):
        a, b = random_element(spec, rng), random_element(spec, rng)
        lhs = free_group_series(spec, (a * b).coords)
        rhs = t_mul(free_group_series(spec, a.coords), free_group_series(spec, b.coords), spec.nclass)
        assert lhs == rhs


@given(free_elements((3, 3), 3))
def test_associativity(triple):
    a, b, c = triple
    assert (a * b) * c == a * (b * c)


@given(free_elements((2, 4), 2))
def test_inverse_and_identity(pair):
    a, b = pair
    e = a.spec.identity()
    assert a * a.inverse() == e == a.inverse() * a
    assert a * e == a == e * a
    assert (a * b).inverse() == b.inverse() * a.inverse()


@given(free_elements((2, 3), 1), st.integers(-6, 6), st.integers(-6, 6))
def test_power_law(single, m, n):
    (a,) = single
    assert power(a, m) * power(a, n) == power(a, m + n)
    assert power(power(a, m), n) == power(a, m * n)


def test_power_matches_repeated_multiplication(rng):
    spec = hall_basis(3, 3)
    a = random_element(spec, rng)
    acc = spec.identity()
    for n in range(6):
        assert power(a, n) == acc
        acc = acc * a
    assert power(a, -3) == inverse(a) * inverse(a) * inverse(a)


@pytest.mark.parametrize("spec", [hall_basis(2, 4), unitriangular(4)], ids=repr)
def test_root(spec, rng):
    a = random_element(spec, rng)
    for m in (2, 3, 5):
        assert power(root(a, m), m) == a
    u3 = unitriangular(3)
    assert root(u3.E(1, 3), 2) == u3.E(1, 3, Q(1, 2))


# --- weights ----------------------------------------------------------------

def test_weight_examples():
    spec = hall_basis(2, 3)
    x1, x2 = spec.generator(1), spec.generator(2)
    assert weight(spec.identity()) == INFINITY
    assert weight(x1) == 1
    assert weight(commutator(x1, x2)) == 2
    assert weight(nested_commutator([x1, x2, x1])) == 3
    assert nested_commutator([x1, x1, x2]).is_identity()
    assert nested_commutator([x1, x2, x2, x1]).is_identity()


@given(free_elements((2, 4), 2))
def test_commutator_weight_is_superadditive(pair):
    a, b = pair
    c = commutator(a, b)
    assert weight(c) >= min(weight(a) + weight(b), 5)


# --- matrix model ------------------------------------------------------------

@pytest.mark.parametrize("m", [3, 4, 5])
def test_unitriangular_matches_matrix_product(m, rng):
    spec = unitriangular(m)
    for _ in range(5):
        a, b = random_element(spec, rng), random_element(spec, rng)
        ma, mb = unitriangular_matrix(spec, a.coords), unitriangular_matrix(spec, b.coords)
        assert unitriangular_matrix(spec, (a * b).coords) == mat_mul(ma, mb)
        assert unitriangular_matrix(spec, a.inverse().coords) == mat_inv_unitriangular(ma)


def test_unitriangular_commutator_example():
    u3 = unitriangular(3)
    assert commutator(u3.E(1, 2), u3.E(2, 3)) == u3.E(1, 3)
    assert weight(u3.E(1, 3)) == 2


@pytest.mark.parametrize("m", [3, 4])
def test_log_exp_roundtrip(m, rng):
    spec = unitriangular(m)
    a = random_element(spec, rng)
    assert spec.exp_coords(spec.log_coords(a.coords)) == a.coords
    assert spec.from_log(spec.log_coords(a.coords)) == a


@given(free_elements((2, 2), 2))
def test_heisenberg_isomorphism(pair):
    a, b = pair
    assert heisenberg_to_matrix(a * b) == heisenberg_to_matrix(a) * heisenberg_to_matrix(b)
    assert matrix_to_heisenberg(heisenberg_to_matrix(a)) == a


# --- misc -----------------------------------------------------------------------

def test_spec_mismatch():
    a = hall_basis(2, 2).identity()
    b = unitriangular(3).identity()
    with pytest.raises(errors.SpecMismatch):
        a * b
    with pytest.raises(errors.SpecMismatch):
        product_of([a, b])


def test_floats_rejected():
    with pytest.raises(TypeError):
        to_rational(0.5)
    assert to_rational("3/4") == Fraction(3, 4)


@pytest.mark.parametrize("spec", [hall_basis(2, 3), unitriangular(4)], ids=repr)
def test_spec_json_roundtrip(spec, rng):
    again = NilGroupSpec.from_json(spec.to_json())
    assert again == spec
    a, b = random_element(spec, rng), random_element(spec, rng)
    assert again.element(a.to_json()) * again.element(b.to_json()) == again.element((a * b).to_json())


def test_elements_are_immutable():
    a = hall_basis(2, 2).identity()
    with pytest.raises(AttributeError):
        a.coords = ()
    assert isinstance(a, GroupElement)
