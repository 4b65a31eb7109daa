import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ddcalc import catalog, ddcore, funcs
from ddcalc.errors import DomainError, PreconditionError
from ddcalc.quad import DiffSpec, directional_derivative, partial_derivative

LOG2 = math.log(2)

# 40-digit mpmath quadratures of the defining integrals
FROZEN_M = [
    ((0, 0, 0), (1.0, 2.0, 3.0), 1, 0.26162407188227392),
    ((1, 0, 1), (1.0, 0.7, 2.5), 1, 0.030046718452036274),
    ((2, 1), (1.0, 1.7), 2, 0.05269345764702954),
]

pos = st.floats(0.3, 4.0)


def _alphas(max_order, max_p):
    for p in range(1, max_p + 1):
        for alpha in itertools.product(range(max_order + 1), repeat=p + 1):
            if sum(alpha) <= max_order:
                yield alpha


# -- modified logarithms ------------------------------------------------------------


def test_mod_log_examples():
    assert funcs.mod_log(0, 2.0) == pytest.approx(LOG2, rel=1e-15)
    assert funcs.mod_log(0, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert funcs.mod_log(1, 2.0) == pytest.approx(1 - LOG2, rel=1e-14)
    assert funcs.mod_log(2, 3.0) == pytest.approx(0.13732653608351371, rel=1e-14)
    with pytest.raises(DomainError):
        funcs.mod_log(1, 0.0)


@pytest.mark.parametrize("m", range(6))
def test_mod_log_continuous_across_series_switch(m):
    r = 0.1 if m <= 2 else 0.5
    for side in (1.0, -1.0):
        inner = funcs.mod_log(m, 1 + side * r * (1 - 1e-12))
        outer = funcs.mod_log(m, 1 + side * r * (1 + 1e-12))
        assert inner == pytest.approx(outer, rel=1e-11)


@given(st.integers(0, 4), st.floats(0.2, 5.0))
def test_mod_log_is_signed_divided_difference(m, s):
    ref = (-1) ** m * ddcore.dd_confluent(ddcore.NodeSystem.from_entries([(1.0, m + 1), (s, 1)]),
                                          catalog.log_fn())
    assert funcs.mod_log(m, s) == pytest.approx(ref, rel=1e-10, abs=1e-13)
    assert funcs.h_func((m, 0), (s,), 0) == pytest.approx(funcs.mod_log(m, s), rel=1e-10,
                                                          abs=1e-13)


# -- M and H ------------------------------------------------------------------------


def test_m_and_h_examples():
    assert funcs.m_func((0, 0), (1.0, 2.0), 0) == pytest.approx(LOG2, rel=1e-15)
    assert funcs.h_func((0, 0), (2.0,), 0) == pytest.approx(LOG2, rel=1e-15)
    assert funcs.h_func((0, 0, 0), (2.0, 3.0), 0) == pytest.approx(LOG2 - math.log(3) / 2,
                                                                 rel=1e-14)


@pytest.mark.parametrize("alpha, s, m, expected", FROZEN_M)
def test_m_func_frozen(alpha, s, m, expected):
    assert funcs.m_func(alpha, s, m) == pytest.approx(expected, rel=1e-13)


def test_m_func_argument_checks():
    with pytest.raises(DomainError):
        funcs.m_func((0, 0), (1.0, 2.0), 2)  # m above |alpha| + p - 1
    with pytest.raises(DomainError):
        funcs.m_func((0,), (1.0,), 0)  # p = 0
    with pytest.raises(DomainError):
        funcs.m_func((0, 0), (1.0, -2.0), 0)
    with pytest.raises(DomainError):
        funcs.m_func((0, 0), (1.0, 2.0, 3.0), 0)


@pytest.mark.parametrize("alpha", list(_alphas(2, 2)))
def test_h_matches_quadrature(alpha, rng):
    p = len(alpha) - 1
    for m in range(sum(alpha) + p):
        s = rng.uniform(0.3, 4.0, p)
        h = funcs.h_func(alpha, s, m)
        qa, _ = funcs.h_integral(alpha, s, m, form="a")
        qb, _ = funcs.h_integral(alpha, s, m, form="b")
        assert h == pytest.approx(qa, rel=1e-6, abs=1e-6)
        assert qa == pytest.approx(qb, rel=1e-6, abs=1e-6)


@given(st.lists(pos, min_size=3, max_size=3), st.sampled_from([0.5, 2.0]),
       st.sampled_from(list(_alphas(2, 2))))
def test_homogeneity(s, lam, alpha):
    p = len(alpha) - 1
    s = s[: p + 1]
    for m in range(sum(alpha) + p):
        lhs = funcs.m_func(alpha, [lam * v for v in s], m)
        rhs = lam ** (-sum(alpha) - p + m) * funcs.m_func(alpha, s, m)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-13)


@given(st.lists(pos, min_size=3, max_size=3), st.sampled_from(list(_alphas(2, 2))))
def test_scaling_reduction(s, alpha):
    p = len(alpha) - 1
    s = s[: p + 1]
    for m in range(sum(alpha) + p):
        lhs = funcs.m_func(alpha, s, m)
        rhs = s[0] ** (-sum(alpha) - p + m) * funcs.h_func(alpha, [v / s[0] for v in s[1:]], m)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-13)


@pytest.mark.parametrize("alpha", [(1, 0), (0, 1), (2, 0), (1, 1), (1, 0, 0), (0, 1, 1)])
def test_derivative_of_distinct_node_dd(alpha):
    # confluent tableau against numerical differentiation in the node values
    s = np.array([0.9, 1.7, 2.8][: len(alpha)])
    p = len(alpha) - 1
    for m in range(sum(alpha) + p):
        f = catalog.idmlog(m)
        d = partial_derivative(lambda v: ddcore.dd_confluent(list(v), f), s, alpha,
                               DiffSpec(0.05, 5))
        sign = (-1) ** (m + sum(alpha) + p - 1)
        fact = math.prod(math.factorial(a) for a in alpha)
        assert sign * d / fact == pytest.approx(funcs.m_func(alpha, s, m), rel=1e-5, abs=1e-7)


# -- general z and Mellin -------------------------------------------------------------


def test_general_z_examples():
    assert funcs.m_func_general_z((1.0, 2.0), 0.5) == pytest.approx(
        math.pi * (math.sqrt(2) - 1), rel=1e-14)
    assert funcs.m_func_general_z((1.0, 2.0, 4.0), 0.3) == pytest.approx(
        0.11501888502681644, rel=1e-12)
    with pytest.raises(DomainError):
        funcs.m_func_general_z((1.0, 2.0), 1.0 + 1e-8)
    with pytest.raises(DomainError):
        funcs.m_func_general_z((1.0, 1.0), 0.5)


@pytest.mark.parametrize("t", [(1.0, 2.0), (1.0, 2.0, 4.0), (0.5, 1.2, 2.0, 3.5)])
def test_general_z_limit_at_integers(t):
    q = len(t) - 1
    for m in range(q):
        for eps in (1e-3, 1e-4):
            sym = 0.5 * (funcs.m_func_general_z(t, m + eps) + funcs.m_func_general_z(t, m - eps))
            assert sym == pytest.approx(funcs.m_func((0,) * (q + 1), t, m), rel=1e-4)


def test_mellin_examples():
    assert funcs.mellin_basic(0.5, 0) == pytest.approx(math.pi, rel=1e-15)
    # the integral of x^(-1/2) (1+x)^(-2) is +pi/2
    assert funcs.mellin_basic(0.5, 1) == pytest.approx(math.pi / 2, rel=1e-15)
    assert funcs.mellin_basic(1 / 3, 0) == pytest.approx(2 * math.pi / math.sqrt(3), rel=1e-14)
    with pytest.raises(DomainError):
        funcs.mellin_basic(1.0, 0)


@given(st.floats(0.05, 0.95), st.integers(0, 5))
def test_mellin_falling_factorial_form(z, m):
    _, falling = funcs.factorials(z - 1, m)
    alt = (-1) ** m * falling / math.factorial(m) * math.pi / math.sin(math.pi * z)
    assert funcs.mellin_basic(z, m) == pytest.approx(alt, rel=1e-13)


# -- two-variable functions --------------------------------------------------------


def test_hcm_examples():
    v = funcs.hcm(1, 1, 1, 2.0, 3.0)
    assert v == pytest.approx(0.14384103622589046, rel=1e-14)
    assert funcs.hcm_closed_form(1, 1, 1, 2.0, 3.0) == pytest.approx(v, rel=1e-14)
    # confluent points are finite
    assert math.isfinite(funcs.hcm(1, 1, 1, 2.0, 2.0))
    assert math.isfinite(funcs.hcm(2, 2, 1, 1.0, 3.0))
    assert funcs.hcm(1, 1, 1, 2.0, 2.0) == pytest.approx(
        -ddcore.dd_confluent([(1.0, 1), (2.0, 2)], catalog.log_fn()), rel=1e-14)
    with pytest.raises(DomainError):
        funcs.hcm_closed_form(1, 1, 1, 1.0, 2.0)
    with pytest.raises(DomainError):
        funcs.hcm_closed_form(1, 3, 1, 2.0, 3.0)
    with pytest.raises(DomainError):
        funcs.hcm(0, 1, 1, 2.0, 3.0)


def _offdiag():
    return st.tuples(pos, pos).filter(
        lambda ab: min(abs(ab[0] - 1), abs(ab[1] - 1), abs(ab[0] - ab[1])) > 0.1)


@given(_offdiag(), st.sampled_from(list(funcs.HCM_CLOSED_FORMS)))
def test_hcm_closed_forms(ab, key):
    a, b = ab
    v = funcs.hcm(*key, a, b)
    assert funcs.hcm_closed_form(*key, a, b, "reduced") == pytest.approx(v, rel=1e-9, abs=1e-10)
    assert funcs.hcm_closed_form(*key, a, b, "raw") == pytest.approx(v, rel=1e-9, abs=1e-10)


@given(_offdiag())
def test_hcm_relations(ab):
    a, b = ab
    spec = DiffSpec(0.02, 5)

    def da(i, j, k):
        return directional_derivative(lambda p: funcs.hcm(i, j, k, p[0], p[1]), (a, b),
                                      (1.0, 0.0), 1, spec)

    assert -da(1, 1, 1) == pytest.approx(funcs.hcm(1, 2, 1, a, b), rel=1e-6, abs=1e-8)
    assert -da(2, 1, 1) == pytest.approx(funcs.hcm(2, 2, 1, a, b), rel=1e-6, abs=1e-8)
    for r, key in ((1, (2, 1, 1)), (2, (3, 1, 1))):
        red = -(funcs.mod_log(r, b) - funcs.mod_log(r, a)) / (b - a)
        assert red == pytest.approx(funcs.hcm(*key, a, b), rel=1e-10, abs=1e-12)


# -- Euler operator form -------------------------------------------------------------


def test_euler_examples():
    s = (2.0, 3.0)
    assert funcs.euler_operator_form((0, 0, 0), s, 0) == pytest.approx(funcs.hcm(1, 1, 1, *s),
                                                                     rel=1e-14)
    assert funcs.euler_operator_form((1, 0, 0), s, 0) == pytest.approx(funcs.hcm(2, 1, 1, *s),
                                                                     rel=1e-7)
    assert funcs.euler_operator_form((2, 0, 0), s, 0) == pytest.approx(funcs.hcm(3, 1, 1, *s),
                                                                     rel=1e-7)
    with pytest.raises(DomainError):
        funcs.euler_operator_form((2, 0, 0), s, 2)  # m above |alpha'| + p - 1
    with pytest.raises(DomainError):
        funcs.euler_operator_form((4, 0, 0), s, 0)


@pytest.mark.parametrize("alpha", list(_alphas(3, 2)))
def test_euler_matches_h(alpha, rng):
    p = len(alpha) - 1
    for m in range(sum(alpha[1:]) + p):
        s = rng.uniform(0.3, 4.0, p)
        assert funcs.euler_operator_form(alpha, s, m) == pytest.approx(
            funcs.h_func(alpha, s, m), rel=1e-5, abs=1e-7)


# -- even-K identity -------------------------------------------------------------------


def test_k_identity_examples():
    lhs, rhs = funcs.k_identity_pair(catalog.poly([0.0, 0.0, 1.0]), 1.0, 2.0)
    assert lhs == pytest.approx(rhs, abs=1e-14)
    lhs, rhs = funcs.k_identity_pair(catalog.cosh_fn(), 0.3, 0.7)
    assert abs(lhs - rhs) < 1e-12
    with pytest.raises(PreconditionError):
        funcs.k_identity_pair(catalog.exp_fn(), 0.3, 0.7)
    with pytest.raises(DomainError):
        funcs.k_identity_pair(catalog.cosh_fn(), 0.3, -0.3)


@given(st.floats(0.3, 1.5), st.floats(-2.5, 2.5), st.floats(-2.5, 2.5))
def test_k_identity_bernoulli_even_part(c, a, b):
    if min(abs(a), abs(b), abs(a + b)) < 0.05:
        return
    K = (catalog.bernoulli_fn() + catalog.poly([0.0, 0.5])).rescaled(c)
    lhs, rhs = funcs.k_identity_pair(K, a, b)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


# -- Bernoulli numbers, factorials, operator identities ----------------------------------


def test_bernoulli():
    assert funcs.bernoulli_gen(0.0) == 1.0
    assert funcs.bernoulli_numbers(4) == [1, Fraction(-1, 2), Fraction(1, 6), 0, Fraction(-1, 30)]
    coeffs = funcs.bernoulli_coeffs(12)
    s = 0.7
    series = sum(float(c) * s**j for j, c in enumerate(coeffs))
    assert series == pytest.approx(funcs.bernoulli_gen(s), rel=1e-10)
    assert funcs.bernoulli_gen(s) == pytest.approx(funcs.mod_log(0, math.exp(s)), rel=1e-14)


@given(st.floats(-3.0, 3.0).filter(lambda s: abs(s) > 1e-3))
def test_bernoulli_footnote_identity(s):
    f = catalog.bernoulli_fn()
    lhs = ddcore.dd_confluent([0.0, s], f) - ddcore.dd_confluent([(0.0, 2)], f)
    rhs = s * ddcore.dd_confluent([(0.0, 2), (s, 1)], f)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-13)


def test_factorials():
    assert funcs.factorials(3, 0) == (1, 1)
    assert funcs.factorials(3, 3) == (60, 6)


@given(st.floats(-5.0, 5.0), st.integers(0, 6))
def test_rising_falling_reindex(a, n):
    rising, _ = funcs.factorials(a, n)
    _, falling = funcs.factorials(a + n - 1, n)
    assert rising == pytest.approx(falling, rel=1e-12, abs=1e-12)


@given(st.floats(0.2, 4.0), st.integers(0, 5))
def test_basic_function_derivatives(x, n):
    b = lambda t: 1.0 / (1.0 + t)  # noqa: E731
    if n <= 3:
        d = directional_derivative(b, x, 1.0, n, DiffSpec(0.05 * x, 5)) if n else b(x)
        assert d == pytest.approx((-1) ** n * math.factorial(n) * b(x) ** (n + 1), rel=1e-6)
    # (x d/dx + l) b^l = l b^(l+1)
    lval = n + 1
    d1 = directional_derivative(lambda t: b(t) ** lval, x, 1.0, 1, DiffSpec(0.05 * x, 5))
    assert x * d1 + lval * b(x) ** lval == pytest.approx(lval * b(x) ** (lval + 1), rel=1e-7)


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(0, 4),
       st.integers(0, 4), st.fractions(min_value=-5, max_value=5, max_denominator=7))
def test_monomial_operator_identity(a, b, c, n, m, z):
    assert funcs.monomial_operator(a, b, c, n, m, z) == funcs.monomial_operator_closed(
        a, b, c, n, m, z)
