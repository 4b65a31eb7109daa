import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ddcalc import catalog, ddcore, funcs
from ddcalc.errors import DomainError, ToleranceNotMet
from ddcalc.quad import (
    DiffSpec,
    QuadratureSpec,
    directional_derivative,
    integrate_halfline,
    integrate_interval,
    integrate_simplex,
    partial_derivative,
)

TIGHT = QuadratureSpec(tolerance=1e-13, rel_tolerance=1e-12)


def test_halfline_examples():
    v, err = integrate_halfline(lambda x: (1 + x) ** -2.0, QuadratureSpec(tolerance=1e-10))
    assert v == pytest.approx(1.0, abs=1e-10)
    assert err <= 1e-10
    v, _ = integrate_halfline(lambda x: x**-0.5 / (1 + x), TIGHT)
    assert v == pytest.approx(math.pi, rel=1e-11)
    v, _ = integrate_halfline(lambda x: x / ((x + 1) * (x + 2) * (x + 3)), TIGHT)
    assert v == pytest.approx(ddcore.dd_recursive([1.0, 2.0, 3.0], catalog.idmlog(1)), rel=1e-11)


def test_interval_and_matrix_valued_integrand():
    v, _ = integrate_interval(np.exp, 0.0, 1.0)
    assert v == pytest.approx(math.e - 1, rel=1e-12)

    def g(x):
        return np.stack([np.ones_like(x), x, x * x], axis=1)

    v, _ = integrate_interval(g, 0.0, 2.0)
    np.testing.assert_allclose(v, [2.0, 2.0, 8.0 / 3.0], rtol=1e-13)


def test_tolerance_not_met_carries_estimate():
    spec = QuadratureSpec(tolerance=1e-15, rel_tolerance=1e-15, max_subdivisions=3)
    with pytest.raises(ToleranceNotMet) as info:
        integrate_halfline(lambda x: x**-0.9 / (1 + x), spec)
    assert info.value.estimate is not None
    assert info.value.error > 0


def test_nonfinite_integrand_is_a_domain_error():
    with np.errstate(all="ignore"), pytest.raises(DomainError):
        integrate_interval(lambda x: 1.0 / (x - x), 0.0, 1.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rule="trapezoid")
    with pytest.raises(ValueError):
        QuadratureSpec(tolerance=0.0)
    with pytest.raises(ValueError):
        DiffSpec(base_step=-1.0)


# integrands with known integrals over (0, inf), parametrized by c > 0
KNOWN = [
    (lambda c: (lambda x: (1 + c * x) ** -2.0), lambda c: 1 / c),
    (lambda c: (lambda x: np.exp(-c * x)), lambda c: 1 / c),
    (lambda c: (lambda x: 1 / (1 + x * x) / (1 + c)), lambda c: math.pi / 2 / (1 + c)),
    (lambda c: (lambda x: x * np.exp(-c * x * x)), lambda c: 1 / (2 * c)),
    (lambda c: (lambda x: x ** (c / 4 - 1) / (1 + x)), lambda c: math.pi / math.sin(math.pi * c / 4)),
]


def test_error_estimates_are_honest():
    rng = np.random.default_rng(5)
    honest = total = 0
    spec = QuadratureSpec(tolerance=1e-9, rel_tolerance=1e-9)
    for make, exact in KNOWN:
        for c in rng.uniform(0.5, 3.5, 20):
            v, err = integrate_halfline(make(c), spec)
            honest += err >= abs(v - exact(c))
            total += 1
    assert honest >= 0.95 * total


@pytest.mark.parametrize("lam", [0.5, 2.0, 10.0])
def test_map_invariance(lam):
    g = lambda x: x**0.3 / ((1 + x) ** 2 * (2 + x))  # noqa: E731
    base, _ = integrate_halfline(g, TIGHT)
    scaled, _ = integrate_halfline(lambda u: lam * g(lam * u), TIGHT)
    assert scaled == pytest.approx(base, rel=1e-11)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_simplex_volume_and_moment(n):
    vol, _ = integrate_simplex(lambda t: np.ones(len(t)), n)
    assert vol == pytest.approx(1 / math.factorial(n), rel=1e-13)
    # integral of t_1 over the ordered simplex is n/(n+1)!
    m1, _ = integrate_simplex(lambda t: t[:, 0], n)
    assert m1 == pytest.approx(n / math.factorial(n + 1), rel=1e-12)


def test_simplex_reports_failure():
    with pytest.raises(ToleranceNotMet):
        integrate_simplex(lambda t: np.abs(t[:, 0] - 0.3) ** 0.01, 2, tol=1e-15, orders=(4, 6))


# -- differentiation -------------------------------------------------------------


def test_directional_examples():
    assert directional_derivative(lambda s: s * s, 3.0, 1.0, 1) == pytest.approx(6.0, rel=1e-12)
    assert directional_derivative(math.log, 2.0, 2.0, 1) == pytest.approx(1.0, rel=1e-12)
    d = directional_derivative(lambda ab: funcs.hcm(1, 1, 1, ab[0], ab[1]), (2.0, 3.0), (1.0, 0.0))
    assert -d == pytest.approx(funcs.hcm_closed_form(1, 2, 1, 2.0, 3.0), rel=1e-9)


@pytest.mark.parametrize("order, expected", [(1, math.exp(0.4)), (2, math.exp(0.4)),
                                             (3, math.exp(0.4))])
def test_directional_orders(order, expected):
    assert directional_derivative(np.exp, 0.4, 1.0, order) == pytest.approx(expected, rel=1e-8)


def test_directional_rejects_nonfinite():
    with np.errstate(all="ignore"), pytest.raises(DomainError):
        directional_derivative(np.log, 0.01, 1.0, 1, DiffSpec(base_step=0.05))


def test_richardson_levels_improve_accuracy():
    f = lambda x: math.sin(3 * x)  # noqa: E731
    exact = 3 * math.cos(3.0)
    errs = [abs(directional_derivative(f, 1.0, 1.0, 1, DiffSpec(0.2, lv)) - exact)
            for lv in (1, 2, 4)]
    assert errs[0] > errs[1] > errs[2]


@given(st.floats(0.3, 2.0), st.floats(0.3, 2.0))
def test_mixed_partials(x, y):
    F = lambda p: math.exp(p[0] * p[1]) + p[0] ** 3 * p[1]  # noqa: E731
    dxy = partial_derivative(F, (x, y), (1, 1))
    exact = math.exp(x * y) * (1 + x * y) + 3 * x * x
    assert dxy == pytest.approx(exact, rel=1e-7)
    dxxy = partial_derivative(F, (x, y), (2, 1))
    exact2 = math.exp(x * y) * (2 * y + x * y * y) + 6 * x
    assert dxxy == pytest.approx(exact2, rel=1e-5)
