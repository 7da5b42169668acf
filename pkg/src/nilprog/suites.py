"""Verification suites: named checks, deterministic reports and their explanations."""
from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from gmpy2 import mpq as Q

from .binomial import BinomialPoly, monomial_to_binomial
from .config import SuiteConfig
from .errors import NilprogError
from .hallpetresco import (dark_expand, hp_commutator, hp_eval, hp_level, hp_mul,
                           lattice_decompose, random_GdGamma_sequence, random_hp_sequence)
from .nilgroup import (commutator, hall_basis, heisenberg_to_matrix, power, random_element,
                       unitriangular, weight, witt_count)
from .nilsystem import (HeisenbergNilsystem, R_system, S_system, T_system, TZ_system, U_system,
                        check_intertwining, example_group_commutator, example_group_equal,
                        example_translate, factor_project, g_map, h_inverse_map, h_map,
                        iterate_closed_form, occupancy, product_system, progression_orbit)
from .spans import (commutator_candidates, filtration_span_check, hpe_generators,
                    monomial_generators, power_generators)
from .torus import ALPHA, BETA, N, TorusWord, points_equal, torus_equal

RATIONAL_CHOICES = (
    {"alpha": "1/3", "beta": "2/7", "a": "5/11", "b": "3/13"},
    {"alpha": "-7/5", "beta": "1/2", "a": "1/9", "b": "4/3"},
    {"alpha": "22/7", "beta": "-13/8", "a": "-2/3", "b": "17/19"},
)


@dataclass
class CheckRecord:
    name: str
    status: str
    witness: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "witness": self.witness}


@dataclass
class SuiteReport:
    suite: str
    config: dict
    checks: list[CheckRecord]
    started: str = ""

    @property
    def summary(self) -> dict:
        out = {"pass": 0, "fail": 0, "error": 0}
        for c in self.checks:
            out[c.status] += 1
        out["total"] = len(self.checks)
        return out

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    def deterministic_dict(self) -> dict:
        return {"suite": self.suite, "config": self.config,
                "checks": [c.to_dict() for c in self.checks], "summary": self.summary}

    def to_dict(self) -> dict:
        out = self.deterministic_dict()
        out["timing"] = {"started": self.started,
                         "seconds": {c.name: round(c.elapsed, 6) for c in self.checks}}
        return out

    def deterministic_json(self) -> str:
        return json.dumps(self.deterministic_dict(), indent=2, sort_keys=True)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def strip_timing(report_json: str) -> str:
    """Canonical form of a written report with the timing field removed."""
    data = json.loads(report_json)
    data.pop("timing", None)
    return json.dumps(data, indent=2, sort_keys=True)


# --------------------------------------------------------------------------
# Checks.  Each returns (passed, witness).
# --------------------------------------------------------------------------

def _free_specs(cfg: SuiteConfig):
    return [hall_basis(r, s) for r, s in cfg.free_shapes()]


def check_witt_dimensions(cfg, rng):
    table = {}
    for r in range(1, cfg.max_rank + 1):
        for s in range(1, cfg.max_class + 1):
            dims = [witt_count(r, k) for k in range(1, s + 1)]
            if sum(dims) > 64:
                continue
            spec = hall_basis(r, s)
            got = [spec.weights.count(k) for k in range(1, s + 1)]
            table[f"{r},{s}"] = got
            if got != dims:
                return False, {"rank": r, "class": s, "basis": got, "witt": dims}
    return True, {"dimensions": table}


def check_bch_associativity(cfg, rng):
    count = 0
    for spec in _free_specs(cfg):
        for _ in range(cfg.bch_samples):
            a, b, c = (random_element(spec, rng) for _ in range(3))
            if (a * b) * c != a * (b * c):
                return False, {"spec": repr(spec), "a": a.to_json(), "b": b.to_json(), "c": c.to_json()}
            count += 1
    return True, {"triples": count}


def check_model_agreement(cfg, rng):
    spec = hall_basis(2, 2)
    for _ in range(max(cfg.bch_samples, 1)):
        a, b = random_element(spec, rng), random_element(spec, rng)
        if heisenberg_to_matrix(a * b) != heisenberg_to_matrix(a) * heisenberg_to_matrix(b):
            return False, {"a": a.to_json(), "b": b.to_json()}
    return True, {"pairs": max(cfg.bch_samples, 1)}


def check_binomial_roundtrip(cfg, rng):
    rows = {}
    for d in range(1, 13):
        poly = monomial_to_binomial(d)
        mono = [Q(int(k == d)) for k in range(d + 1)]
        if poly.to_monomial() != mono or not poly.is_integral() or 0 in poly.coeffs:
            return False, {"degree": d, "expansion": str(poly)}
        rows[d] = [int(poly.coeffs.get(l, 0)) for l in range(1, d + 1)]
    ok = rows[3] == [1, 6, 6]
    return ok, {"n^3": rows[3], "n^12 leading": rows[12][-1]}


def check_commutator_power(cfg, rng):
    spec = hall_basis(3, 3)
    triples = [(spec.generator(1), spec.generator(2), spec.generator(3))]
    triples.append(tuple(random_element(spec, rng) for _ in range(3)))
    count = 0
    for x1, x2, y in triples:
        base = commutator(commutator(x1, x2), y)
        for n1 in range(-3, 4):
            for n2 in range(-3, 4):
                inner = commutator(power(x1, n1), power(x2, n2))
                for n3 in range(-3, 4):
                    if commutator(inner, power(y, n3)) != power(base, n1 * n2 * n3):
                        return False, {"n": [n1, n2, n3]}
                    count += 1
    return True, {"grid_points": count}


def check_hp_closure(cfg, rng):
    specs = _free_specs(cfg)
    for i in range(cfg.hp_samples):
        spec = specs[i % len(specs)]
        phi, psi = random_hp_sequence(spec, rng), random_hp_sequence(spec, rng)
        prod = hp_mul(phi, psi)
        for n in range(2 * spec.nclass + 2):
            if hp_eval(prod, n) != hp_eval(phi, n) * hp_eval(psi, n):
                return False, {"sample": i, "n": n, "phi": phi.to_dict(), "psi": psi.to_dict()}
    return True, {"pairs": cfg.hp_samples}


def check_hp_commutator_level(cfg, rng):
    specs = _free_specs(cfg)
    count = 0
    for i in range(max(cfg.hp_samples // 10, 1)):
        spec = specs[i % len(specs)]
        s = spec.nclass
        li, lj = rng.randint(1, s), rng.randint(1, s)
        phi = random_hp_sequence(spec, rng, level=li)
        psi = random_hp_sequence(spec, rng, level=lj)
        level = hp_level(hp_commutator(phi, psi))
        if level < min(li + lj, s):
            return False, {"sample": i, "levels": [li, lj], "commutator_level": level}
        count += 1
    return True, {"pairs": count}


def _random_integer_poly(rng, degree: int) -> BinomialPoly:
    return BinomialPoly.from_list([rng.randint(-2, 2) for _ in range(degree + 1)])


def check_dark_weight(cfg, rng):
    specs = _free_specs(cfg)
    checked = 0
    for i in range(cfg.dark_samples):
        spec = specs[i % len(specs)]
        factors = []
        for _ in range(rng.randint(1, 3)):
            w = rng.randint(1, spec.nclass)
            factors.append((random_element(spec, rng, min_weight=w), _random_integer_poly(rng, w)))
        expansion = dark_expand(factors)
        for (l,), z in expansion.nontrivial().items():
            if weight(z) < l:
                return False, {"sample": i, "index": l, "weight": weight(z)}
            checked += 1
    return True, {"instances": cfg.dark_samples, "coefficients": checked}


def _in_derived(gens, candidates, truncation) -> bool:
    return filtration_span_check(gens, candidates, truncation, step=2).holds


def check_filtration(cfg, rng):
    out = {}
    for spec in (hall_basis(2, 2), unitriangular(3)):
        a1, a2 = power_generators(spec, 1), power_generators(spec, 2)
        for l in range(1, cfg.truncation + 1):
            forward = _in_derived(a1, a2, l)
            backward = filtration_span_check(a2, commutator_candidates(a1), l).holds
            key = f"{spec!r}/l={l}"
            out[key] = {"a2_in_derived": forward, "derived_in_a2": backward}
            if not (forward and backward):
                return False, {key: out[key]}
    return True, out


def check_thm14(cfg, rng):
    out = {}
    for spec in (hall_basis(2, 2), unitriangular(3)):
        hpe = hpe_generators(spec)
        squares = monomial_generators(spec, 2, 2)
        for l in (2, 3):
            first = _in_derived(hpe, squares, l)
            second = filtration_span_check(squares, commutator_candidates(hpe), l).holds
            out[f"{spec!r}/l={l}"] = {"squares_in_derived": first, "derived_in_squares": second}
            if not (first and second):
                return False, out
    return True, out


def check_lattice_decompose(cfg, rng):
    count = 0
    for m in (3, 4):
        spec = unitriangular(m)
        for d in range(1, spec.nclass + 1):
            for _ in range(5):
                phi = random_GdGamma_sequence(spec, rng, d)
                split = lattice_decompose(phi, d)
                for n in range(2 * spec.nclass + 2):
                    if hp_eval(split.psi, n) * hp_eval(split.theta, n) != hp_eval(phi, n):
                        return False, {"m": m, "d": d, "n": n}
                count += 1
    return True, {"sequences": count}


def _expected_orbit():
    return (N * ALPHA, N * N * ALPHA + N * BETA, 2 * N * ALPHA, 4 * N * N * ALPHA + 2 * N * BETA)


def check_closed_form(cfg, rng):
    sb = S_system()
    got = iterate_closed_form(product_system(sb, sb ** 2), (0, 0, 0, 0))
    ok = got == _expected_orbit()
    t_orbit = iterate_closed_form(T_system(), (0, 0))
    ok = ok and t_orbit == (N * ALPHA, N * N * ALPHA)
    return ok, {"orbit": [str(c) for c in got], "T": [str(c) for c in t_orbit]}


def _intertwining_cases():
    a, b = TorusWord.param("a"), TorusWord.param("b")
    sb, s2a = S_system(), S_system(2 * a)
    t = T_system()
    return {
        "h": (h_map(), product_system(sb, sb ** 2), U_system(), (0, 0, 0, 0)),
        "g": (g_map(), product_system(t, t ** 2), product_system(s2a, s2a ** 2), (a, b, a, b)),
    }


def _check_intertwine(name, cfg):
    fmap, sa, sb, x0 = _intertwining_cases()[name]
    results = {"symbolic": check_intertwining(fmap, sa, sb, x0).to_dict()}
    for i, prm in enumerate(RATIONAL_CHOICES):
        results[f"numeric{i}"] = check_intertwining(fmap, sa, sb, x0, "numeric", cfg.nmax, prm).to_dict()
    return all(r["holds"] for r in results.values()), results


def check_intertwine_h(cfg, rng):
    return _check_intertwine("h", cfg)


def check_intertwine_g(cfg, rng):
    return _check_intertwine("g", cfg)


def check_h_bijection(cfg, rng):
    h, hinv = h_map(), h_inverse_map()
    for i in range(50):
        x, y, w = (Q(rng.randint(-20, 20), rng.randint(1, 12)) for _ in range(3))
        p = (x, y, 2 * x + rng.randint(-2, 2), w)
        q = (x, y, w)
        if not points_equal(hinv(h(p)), p) or h(hinv(q)) != tuple(TorusWord.lift(c) for c in q):
            return False, {"sample": i, "point": [str(c) for c in p]}
    return True, {"points": 50}


def check_factor_example41(cfg, rng):
    a, b = TorusWord.param("a"), TorusWord.param("b")
    samples = [(a, b)] + [(Q(rng.randint(0, 99), 100), Q(rng.randint(0, 99), 100)) for _ in range(20)]
    factor = factor_project("example41", 1)
    full = factor_project("example41", 2)
    t = (1, ALPHA, ALPHA)
    derived = all(points_equal(example_translate(t, p), T_system().step(p)) for p in samples)
    comm = example_group_commutator((1, 0, 0), (0, a, 0))
    ok = factor.check(samples) and full.check(samples) and derived
    ok = ok and example_group_equal(comm, (0, 0, 2 * a))
    return ok, {"factor": factor.description, "samples": len(samples), "translation_matches_T": derived}


def check_factor_heisenberg(cfg, rng):
    spec = unitriangular(3)
    t = spec.element(spec.from_matrix([[1, Q(1, 3), Q(2, 7)], [0, 1, Q(5, 4)], [0, 0, 1]]))
    system = HeisenbergNilsystem(t)
    points = [system.reduce(random_element(spec, rng))]
    for _ in range(30):
        points.append(system.step(points[-1]))
    factor = factor_project(system, 1)
    return factor.check(points), {"factor": factor.description, "points": len(points)}


def check_progression(cfg, rng):
    a, b = TorusWord.param("a"), TorusWord.param("b")
    got = progression_orbit(T_system(), (a, b), 2, N)
    expected = (a + N * ALPHA, b + N * N * ALPHA + 2 * N * a, a + 2 * N * ALPHA, b + 4 * N * N * ALPHA + 4 * N * a)
    ok = got == expected
    x = TorusWord.param("x")
    for n in list(range(-10, 11)) + [N]:
        first, second = progression_orbit(TZ_system(), (x,), 2, n)
        ok = ok and torus_equal(second, 2 * first - x)
    return ok, {"tau2": [str(c) for c in got]}


def _occupancy(cfg, a_value, n=None):
    params = {"alpha": cfg.alpha, "a": a_value}
    return occupancy(R_system(2 * TorusWord.param("a")), (0, 0), params, n or cfg.occupancy_n, cfg.grid)


def check_occupancy_independent(cfg, rng):
    report = _occupancy(cfg, cfg.a)
    return report.fraction >= float(cfg.independent_min), report.to_dict()


def check_occupancy_dependent(cfg, rng):
    report = _occupancy(cfg, cfg.dependent_a)
    return report.fraction <= float(cfg.dependent_max), report.to_dict()


def check_occupancy_sharding(cfg, rng):
    params = {"alpha": cfg.alpha, "a": cfg.a}
    system = R_system(2 * TorusWord.param("a"))
    n = min(cfg.occupancy_n, 200_000)
    single = occupancy(system, (0, 0), params, n, cfg.grid)
    sharded = occupancy(system, (0, 0), params, n, cfg.grid, shards=4)
    return single == sharded, {"samples": n, "occupied": single.occupied}


SUITE_CHECKS: dict[str, list[tuple[str, Callable]]] = {
    "algebra": [
        ("witt-dimensions", check_witt_dimensions),
        ("bch-associativity", check_bch_associativity),
        ("model-agreement", check_model_agreement),
        ("binomial-roundtrip", check_binomial_roundtrip),
        ("commutator-power", check_commutator_power),
    ],
    "hallpetresco": [
        ("hp-closure", check_hp_closure),
        ("hp-commutator-level", check_hp_commutator_level),
        ("dark-weight", check_dark_weight),
        ("filtration-a1-a2", check_filtration),
        ("hpe-derived-squares", check_thm14),
        ("lattice-split", check_lattice_decompose),
    ],
    "example41": [
        ("closed-form", check_closed_form),
        ("intertwine-h", check_intertwine_h),
        ("intertwine-g", check_intertwine_g),
        ("h-bijection", check_h_bijection),
        ("factor-example41", check_factor_example41),
        ("factor-heisenberg", check_factor_heisenberg),
        ("progression-diagonal", check_progression),
    ],
    "occupancy": [
        ("occupancy-independent", check_occupancy_independent),
        ("occupancy-dependent", check_occupancy_dependent),
        ("occupancy-sharding", check_occupancy_sharding),
    ],
}


def checks_for(suite: str) -> list[tuple[str, Callable]]:
    if suite == "all":
        return [c for name in ("algebra", "hallpetresco", "example41", "occupancy") for c in SUITE_CHECKS[name]]
    return list(SUITE_CHECKS[suite])


def run_check(name: str, fn: Callable, cfg: SuiteConfig) -> CheckRecord:
    rng = random.Random(f"{cfg.seed}:{name}")
    start = time.perf_counter()
    try:
        ok, witness = fn(cfg, rng)
        status = "pass" if ok else "fail"
    except (NilprogError, ArithmeticError, ValueError, TypeError) as exc:
        status, witness = "error", {"error": f"{type(exc).__name__}: {exc}"}
    return CheckRecord(name, status, _jsonable(witness), time.perf_counter() - start)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return str(obj)


def run_suite(config: SuiteConfig, write: bool = True) -> SuiteReport:
    """Run every check of ``config.suite`` in a fixed order; write JSON to ``config.out``."""
    config.validate()
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    records = [run_check(name, fn, config) for name, fn in checks_for(config.suite)]
    # the output path says where the report goes, not what was run
    inputs = {k: v for k, v in config.to_dict().items() if k != "out"}
    report = SuiteReport(config.suite, inputs, records, started)
    if write and config.out:
        Path(config.out).write_text(report.to_json() + "\n")
    return report


# --------------------------------------------------------------------------
# Explanations
# --------------------------------------------------------------------------

EXPLANATIONS: dict[str, tuple[str, str]] = {
    "witt-dimensions": (
        "The free nilpotent group of rank r and class s has rank-k lower central quotients of "
        "dimension (1/k) sum_{d|k} mu(d) r^(k/d).",
        "Count Lyndon words of each length in the generated Hall basis and compare with the "
        "Moebius-inversion formula."),
    "bch-associativity": (
        "Group law given by the truncated Baker-Campbell-Hausdorff series in Hall coordinates.",
        "(ab)c = a(bc) exactly on seeded random rational triples."),
    "model-agreement": (
        "Free rank-2 class-2 group is the Heisenberg group: x1 -> E12, x2 -> E23, [x1,x2] -> E13.",
        "Product in Hall coordinates mapped to U(3) equals the matrix product of the images."),
    "binomial-roundtrip": (
        "n^d = sum_l l! S(d,l) C(n,l) with integer coefficients and no constant term.",
        "Convert back to monomials and compare; n^3 -> [1, 6, 6]."),
    "commutator-power": (
        "In a group of class 3, [[x1^n1, x2^n2], y^n3] = [[x1, x2], y]^(n1 n2 n3).",
        "Exact comparison over n_i in [-3, 3] in the free group of rank 3 and class 3."),
    "hp-closure": (
        "Sequences n -> g0 g1^C(n,1) ... gs^C(n,s) with g_i in G_i form a group under pointwise "
        "multiplication.",
        "Normal form of the product compared with pointwise products at n = 0..2s+1."),
    "hp-commutator-level": (
        "Commutators of sequences taking values in G_i and G_j take values in G_(i+j).",
        "Level of the commutator normal form on seeded random pairs."),
    "dark-weight": (
        "A product of polynomial powers g_j^(p_j(n)) with deg p_j <= weight(g_j) rewrites as "
        "z_0 z_1^C(n,1) ... z_L^C(n,L) with z_l in G_l.",
        "Triangular extraction of z_l from values on 0..s, validated on s+1..2s+1, then weight of "
        "each z_l."),
    "filtration-a1-a2": (
        "The commutator subgroup of the group generated by sequences (g^(n^k)) with g in G_k, k >= 1, "
        "is the group generated by those with k >= 2.",
        "Exact rank computations in the Lie algebra of G^l for truncations l = 1..4, both "
        "inclusions, in the free and matrix Heisenberg models."),
    "hpe-derived-squares": (
        "The commutator subgroup of the based Hall-Petresco group truncated to length l is generated "
        "by (g^(n^2))_(1<=n<=l) with g in G_2.",
        "Both inclusions by exact rank computations for l = 2, 3 in the Heisenberg models."),
    "lattice-split": (
        "A polynomial sequence with coefficients in G_d Gamma splits as a sequence in HP(G)_d times "
        "a lattice-valued polynomial sequence.",
        "Check the level of the quotient, integrality of the lattice part and the product."),
    "closed-form": (
        "(S_beta x S_beta^2)^n(0,0,0,0) = (n alpha, n^2 alpha + n beta, 2n alpha, "
        "4n^2 alpha + 2n beta) and T^n(0,0) = (n alpha, n^2 alpha).",
        "Symbolic closed form compared term by term, after checking it against stepwise "
        "iteration for n = 0..50."),
    "intertwine-h": (
        "h(x,y,z,w) = (x, y, (4y - w)/2) on z = 2x carries S_beta x S_beta^2 orbits of 0 to "
        "U_beta orbits of 0.",
        "Polynomial identity in n, alpha, beta; then exact rationals for three parameter choices "
        "and n in [-100, 100]."),
    "intertwine-g": (
        "g(x,y,z,w) = (x-a, y-b, z-a, w-b) carries T x T^2 orbits of (a,b,a,b) to "
        "S_2a x S_2a^2 orbits of 0.",
        "Polynomial identity in n, alpha, a, b; then exact rationals for three parameter choices "
        "and n in [-100, 100]."),
    "h-bijection": (
        "(x,y,z) -> (x, y, 2x, 4y - 2z) inverts h on z = 2x.",
        "Compose both ways on seeded rational points."),
    "factor-example41": (
        "The 1-step factor of the skew product T(x,y) = (x + alpha, y + 2x + alpha) is the circle "
        "rotation by alpha through (x,y) -> x.",
        "pi(T p) = T_Z(pi p) on sampled points, and T agrees with translation by (1, alpha, alpha) "
        "in Z x T x T."),
    "factor-heisenberg": (
        "The 1-step factor of a Heisenberg nilsystem is the rotation of T^2 by the (1,2) and (2,3) "
        "entries of the translation element.",
        "Projection commutes with the dynamics on a 30-step exact orbit."),
    "progression-diagonal": (
        "(T x T^2)^n(a,b,a,b) = (a,b,a,b) + (n alpha, n^2 alpha + 2na, 2n alpha, 4n^2 alpha + 4na); "
        "T_Z progression orbits lie on {(x+z, x+2z)}.",
        "Symbolic comparison and the relation second = 2 first - x."),
    "occupancy-independent": (
        "For rationally independent alpha, a the R_2a orbit of (0,0) is dense in T^2.",
        "Fraction of grid cells visited by 10^6 iterates in 64-bit fixed point; threshold 0.99."),
    "occupancy-dependent": (
        "For a = alpha the R_2a orbit of (0,0) lies on a line y = 2x + const.",
        "Same occupancy measurement; threshold 0.1."),
    "occupancy-sharding": (
        "Occupancy computed from closed forms does not depend on how the orbit is split.",
        "Sequential and four-shard visited-cell sets compared."),
}


def explain(check: str) -> str:
    if check not in EXPLANATIONS:
        raise KeyError(f"unknown check {check!r}; known: {', '.join(sorted(EXPLANATIONS))}")
    statement, oracle = EXPLANATIONS[check]
    return f"{check}\n  statement: {statement}\n  oracle: {oracle}\n"
