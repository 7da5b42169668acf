"""Independent reference computations used by the tests.

Nothing here calls the group law, the structure constants or the normal-form
code under test.
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import product


# --- truncated free associative algebra -----------------------------------

def t_mul(p: dict, q: dict, degree: int) -> dict:
    out: dict = {}
    for u, a in p.items():
        for v, b in q.items():
            if len(u) + len(v) <= degree:
                out[u + v] = out.get(u + v, 0) + a * b
    return {k: c for k, c in out.items() if c}


def t_add(p: dict, q: dict, scale=1) -> dict:
    out = dict(p)
    for k, c in q.items():
        out[k] = out.get(k, 0) + scale * c
    return {k: c for k, c in out.items() if c}


def t_exp(x: dict, degree: int) -> dict:
    """``exp(x)`` for ``x`` without constant term, truncated at ``degree``."""
    result = {(): Fraction(1)}
    term = {(): Fraction(1)}
    for k in range(1, degree + 1):
        term = {w: c / k for w, c in t_mul(term, x, degree).items()}
        result = t_add(result, term)
    return result


def parse_bracket(label: str):
    """``"[x1,[x1,x2]]"`` -> nested tuples of generator indices."""
    label = label.strip()
    if label.startswith("x"):
        return int(label[1:]) - 1
    assert label[0] == "[" and label[-1] == "]"
    body, depth = label[1:-1], 0
    for i, ch in enumerate(body):
        depth += ch == "["
        depth -= ch == "]"
        if ch == "," and depth == 0:
            return (parse_bracket(body[:i]), parse_bracket(body[i + 1:]))
    raise ValueError(label)


def bracket_poly(tree) -> dict:
    if isinstance(tree, int):
        return {(tree,): Fraction(1)}
    a, b = bracket_poly(tree[0]), bracket_poly(tree[1])
    big = 10 ** 6
    return t_add(t_mul(a, b, big), t_mul(b, a, big), -1)


def free_group_series(spec, coords) -> dict:
    """Image of a free-nilpotent element ``exp(sum c_i H_i)`` in the truncated tensor algebra."""
    x: dict = {}
    for label, c in zip(spec.labels, coords):
        if c:
            x = t_add(x, bracket_poly(parse_bracket(label)), Fraction(c))
    return t_exp(x, spec.nclass)


# --- matrices -------------------------------------------------------------

def unitriangular_matrix(spec, coords):
    m = spec.m
    mat = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    for label, c in zip(spec.labels, coords):
        i, j = int(label[1]) - 1, int(label[2]) - 1
        mat[i][j] = Fraction(c)
    return mat


def mat_mul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def mat_inv_unitriangular(a):
    n = len(a)
    nil = [[a[i][j] - (i == j) for j in range(n)] for i in range(n)]
    # (I + N)^-1 = I - N + N^2 - ...
    result = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    term = [row[:] for row in result]
    for k in range(1, n):
        term = mat_mul(term, nil)
        sign = -1 if k % 2 else 1
        result = [[result[i][j] + sign * term[i][j] for j in range(n)] for i in range(n)]
    return result


# --- binomial expansions by solving a Vandermonde-type system -------------

def binomial_coefficients_by_solving(values: list) -> list:
    """``b_l`` with ``sum_l b_l C(n, l) = values[n]`` for ``n = 0..len-1`` (forward differences)."""
    diffs = [Fraction(v) for v in values]
    out = []
    while diffs:
        out.append(diffs[0])
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
    return out


def brute_binomial(n: int, k: int) -> int:
    if k < 0:
        return 0
    if 0 <= n < k:
        return 0
    return math.prod(range(n - k + 1, n + 1)) // math.factorial(k) if n >= 0 else \
        math.prod(n - i for i in range(k)) // math.factorial(k)


def grid(lo: int, hi: int, r: int):
    return product(range(lo, hi + 1), repeat=r)
