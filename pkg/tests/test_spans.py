import pytest

from nilprog import errors
from nilprog.hallpetresco import HPSequence
from nilprog.nilgroup import commutator, hall_basis, unitriangular
from nilprog.spans import (commutator_candidates, filtration_span_check, hpe_generators,
                           monomial_generators, power_generators, scaled)

HEISENBERG = [hall_basis(2, 2), unitriangular(3)]


@pytest.mark.parametrize("spec", HEISENBERG, ids=repr)
@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_derived_subgroup_of_A1_is_A2(spec, l):
    a1, a2 = power_generators(spec, 1), power_generators(spec, 2)
    forward = filtration_span_check(a1, a2, l, step=2)
    backward = filtration_span_check(a2, commutator_candidates(a1), l)
    assert forward and backward
    # by hand: both sides are the line spanned by n -> z^(n^2)
    assert forward.dimension == 1


@pytest.mark.parametrize("spec", HEISENBERG, ids=repr)
@pytest.mark.parametrize("l", [2, 3])
def test_derived_subgroup_of_hpe_is_squares(spec, l):
    hpe, squares = hpe_generators(spec), monomial_generators(spec, 2, 2)
    assert filtration_span_check(hpe, squares, l, step=2)
    assert filtration_span_check(squares, commutator_candidates(hpe), l)


@pytest.mark.parametrize("l", [2, 3])
def test_class_three_inclusions(l):
    spec = hall_basis(2, 3)
    for d in (2, 3):
        gens = power_generators(spec, 1)
        assert filtration_span_check(gens, power_generators(spec, d), l, step=d)


def test_commutator_of_linear_sequences_in_squares():
    spec = unitriangular(3)
    a, b = spec.E(1, 2), spec.E(2, 3)
    comm = commutator_candidates([HPSequence.binomial_power(a, 1), HPSequence.binomial_power(b, 1)])
    squares = [HPSequence.monomial_power(commutator(a, b), 2)]
    check = filtration_span_check(squares, comm, 4)
    assert check and len(check.witnesses) == len(comm)


def test_generator_is_its_own_witness():
    spec = hall_basis(2, 2)
    gens = power_generators(spec, 1)
    check = filtration_span_check(gens, gens[:1], 3, labels=[f"g{i}" for i in range(len(gens))])
    assert check.holds and check.witnesses[0] == {"g0": 1}


def test_negative_cases():
    spec = hall_basis(2, 2)
    a2 = power_generators(spec, 2)
    linear = HPSequence.binomial_power(spec.generator(1), 1)
    check = filtration_span_check(a2, [linear], 3)
    assert not check and check.failing == 0
    # n -> z^n is in the group generated by z^(n^2) only when truncated to n = 1
    z = commutator(spec.generator(1), spec.generator(2))
    squares = monomial_generators(spec, 2, 2)
    central_linear = HPSequence.binomial_power(z, 1)
    assert filtration_span_check(squares, [central_linear], 1)
    assert not filtration_span_check(squares, [central_linear], 2)
    assert filtration_span_check(squares, [scaled(squares[0], 3)], 4)


def test_depth_and_argument_errors():
    spec = hall_basis(2, 3)
    linear = [HPSequence.binomial_power(spec.generator(i), 1) for i in (1, 2)]
    assert filtration_span_check(linear, [], 3, depth=3)
    with pytest.raises(errors.DepthExceeded):
        filtration_span_check(linear, [], 3, depth=1)
    with pytest.raises(ValueError):
        filtration_span_check(power_generators(spec, 1), [], 9)
    with pytest.raises(errors.SpecMismatch):
        filtration_span_check(power_generators(spec, 1), power_generators(hall_basis(2, 2), 1), 2)


def test_report_is_serialisable():
    import json
    spec = unitriangular(3)
    check = filtration_span_check(power_generators(spec, 1), power_generators(spec, 2), 3, step=2)
    assert json.loads(json.dumps(check.to_dict()))["holds"] is True
