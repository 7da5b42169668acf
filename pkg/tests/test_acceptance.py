"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line (shown even without ``-s``)
with the measured runtime against its budget.
"""
import math
import random
import time
from contextlib import contextmanager

import pytest

from nilprog.binomial import BinomialPoly, evaluate, monomial_to_binomial
from nilprog.config import SuiteConfig
from nilprog.hallpetresco import dark_expand, hp_eval, hp_mul, random_hp_sequence
from nilprog.nilgroup import commutator, hall_basis, power, random_element, unitriangular, weight
from nilprog.nilsystem import (R_system, S_system, T_system, U_system, check_intertwining, g_map,
                               h_map, iterate_closed_form, occupancy, product_system)
from nilprog.spans import (commutator_candidates, filtration_span_check, hpe_generators,
                           monomial_generators, power_generators)
from nilprog.suites import run_suite, strip_timing
from nilprog.torus import ALPHA, BETA, N, TorusWord

SEED = 20240601
HEISENBERG = (hall_basis(2, 2), unitriangular(3))


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def run(number: int, title: str, budget: float):
        start = time.perf_counter()
        outcome = {"ok": False}
        try:
            yield outcome
        finally:
            elapsed = time.perf_counter() - start
            ok = outcome["ok"] and elapsed < budget
            with capsys.disabled():
                print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} "
                      f"({elapsed:.2f}s, budget {budget:g}s)")
        assert outcome["ok"], f"criterion {number} failed"
        assert elapsed < budget, f"criterion {number} took {elapsed:.2f}s > {budget}s"
    return run


def test_c01_closed_form(criterion):
    with criterion(1, "(S_b x S_b^2)^n(0) closed form", 1.0) as out:
        sb = S_system()
        got = iterate_closed_form(product_system(sb, sb ** 2), (0, 0, 0, 0))
        expected = (N * ALPHA, N * N * ALPHA + N * BETA, 2 * N * ALPHA, 4 * N * N * ALPHA + 2 * N * BETA)
        out["ok"] = got == expected


def test_c02_intertwining(criterion):
    with criterion(2, "intertwining of h and g, symbolic and numeric", 1.0) as out:
        a, b = TorusWord.param("a"), TorusWord.param("b")
        sb, s2a, t = S_system(), S_system(2 * a), T_system()
        cases = [
            (h_map(), product_system(sb, sb ** 2), U_system(), (0, 0, 0, 0)),
            (g_map(), product_system(t, t ** 2), product_system(s2a, s2a ** 2), (a, b, a, b)),
        ]
        choices = [
            {"alpha": "1/3", "beta": "2/7", "a": "5/11", "b": "3/13"},
            {"alpha": "-7/5", "beta": "1/2", "a": "1/9", "b": "4/3"},
            {"alpha": "22/7", "beta": "-13/8", "a": "-2/3", "b": "17/19"},
        ]
        ok = True
        for fmap, sys_a, sys_b, x0 in cases:
            ok &= check_intertwining(fmap, sys_a, sys_b, x0).holds
            for params in choices:
                result = check_intertwining(fmap, sys_a, sys_b, x0, "numeric", 100, params)
                ok &= result.holds and result.checked == 201
        out["ok"] = ok


def test_c03_hp_closure(criterion):
    with criterion(3, "hp_mul matches pointwise products on 1000 pairs", 30.0) as out:
        rng = random.Random(SEED)
        shapes = [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4)]
        matches = 0
        for i in range(1000):
            spec = hall_basis(*shapes[i % len(shapes)])
            phi, psi = random_hp_sequence(spec, rng), random_hp_sequence(spec, rng)
            prod = hp_mul(phi, psi)
            s = spec.nclass
            if all(hp_eval(prod, n) == hp_eval(phi, n) * hp_eval(psi, n) for n in range(2 * s + 2)):
                matches += 1
        out["ok"] = matches == 1000


def test_c04_dark_weight(criterion):
    with criterion(4, "dark_expand z_l has weight >= l on 500 instances", 30.0) as out:
        rng = random.Random(SEED + 4)
        shapes = [(2, 2), (2, 3), (2, 4), (3, 3), (3, 4)]
        ok = True
        for i in range(500):
            spec = hall_basis(*shapes[i % len(shapes)])
            factors = []
            for _ in range(rng.randint(1, 3)):
                w = rng.randint(1, spec.nclass)
                poly = BinomialPoly.from_list([rng.randint(-2, 2) for _ in range(w + 1)])
                factors.append((random_element(spec, rng, min_weight=w), poly))
            expansion = dark_expand(factors)
            ok &= all(weight(z) >= l for (l,), z in expansion.table.items())
        out["ok"] = ok


def test_c05_commutator_filtration(criterion):
    with criterion(5, "[A1, A1] = A2 in the Heisenberg model, l <= 4", 10.0) as out:
        ok = True
        for spec in HEISENBERG:
            a1, a2 = power_generators(spec, 1), power_generators(spec, 2)
            for l in range(1, 5):
                ok &= filtration_span_check(a1, a2, l, step=2).holds
                ok &= filtration_span_check(a2, commutator_candidates(a1), l).holds
        out["ok"] = ok


def test_c06_hpe_generators(criterion):
    with criterion(6, "[HP_e, HP_e] = <g^(n^2) : g in G_2>, l in {2, 3}", 10.0) as out:
        ok = True
        for spec in HEISENBERG:
            hpe, squares = hpe_generators(spec), monomial_generators(spec, 2, 2)
            for l in (2, 3):
                ok &= filtration_span_check(hpe, squares, l, step=2).holds
                ok &= filtration_span_check(squares, commutator_candidates(hpe), l).holds
        out["ok"] = ok


def test_c07_commutator_powers(criterion):
    with criterion(7, "[[x1^a, x2^b], y^c] = [[x1, x2], y]^(abc) on [-3, 3]^3", 5.0) as out:
        spec = hall_basis(3, 3)
        x1, x2, y = (spec.generator(i) for i in (1, 2, 3))
        base = commutator(commutator(x1, x2), y)
        ok = True
        for n1 in range(-3, 4):
            for n2 in range(-3, 4):
                inner = commutator(power(x1, n1), power(x2, n2))
                for n3 in range(-3, 4):
                    ok &= commutator(inner, power(y, n3)) == power(base, n1 * n2 * n3)
        out["ok"] = ok


def test_c08_binomial_algebra(criterion):
    with criterion(8, "n^d in the binomial basis, d <= 12", 1.0) as out:
        ok = True
        for d in range(1, 13):
            poly = monomial_to_binomial(d)
            ok &= poly.is_integral() and 0 not in poly.coeffs
            ok &= all(evaluate(poly, n) == n ** d for n in range(d + 4))
            ok &= poly.to_monomial() == [int(k == d) for k in range(d + 1)]
        three = monomial_to_binomial(3)
        ok &= [three.coeffs[l] for l in (1, 2, 3)] == [1, 6, 6]
        out["ok"] = ok


def test_c09_occupancy(criterion):
    with criterion(9, "R_2a occupancy >= 0.99 (independent), <= 0.1 (a = alpha)", 10.0) as out:
        a = TorusWord.param("a")
        alpha = repr(math.sqrt(2) - 1)
        rot = R_system(2 * a)
        dense = occupancy(rot, (0, 0), {"alpha": alpha, "a": repr(math.sqrt(3) / 2)}, 10 ** 6, 100)
        thin = occupancy(rot, (0, 0), {"alpha": alpha, "a": alpha}, 10 ** 6, 100)
        out["ok"] = dense.fraction >= 0.99 and thin.fraction <= 0.1


def test_c10_determinism(criterion, tmp_path):
    with criterion(10, "identical config and seed give identical reports", 120.0) as out:
        cfg = SuiteConfig(suite="all", seed=SEED)
        first = run_suite(cfg.with_(out=str(tmp_path / "one.json")))
        second = run_suite(cfg.with_(out=str(tmp_path / "two.json")))
        same_files = strip_timing((tmp_path / "one.json").read_text()) == \
            strip_timing((tmp_path / "two.json").read_text())
        out["ok"] = same_files and first.deterministic_json() == second.deterministic_json()
