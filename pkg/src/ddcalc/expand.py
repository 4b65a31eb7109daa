"""Noncommutative Taylor expansions through divided-difference kernels.

``e^{a+b} = sum_n ([a^(0), ..., a^(n)] exp)(b . ... . b)`` and more generally
``f(a+b) ~ sum_n ([a^(0), ..., a^(n)] f)(b . ... . b)``.  For the variable
``nabla_a = a^(1) - a^(0)`` the expansion of ``f(nabla_{a+b})(x)`` to second
order in ``b`` is provided term by term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .catalog import ScalarFunction, exp_fn
from .ddcore import dd_confluent
from .matcalc import as_hermitian, contract, contract_nabla, dd_kernel, eigh
from .quad import integrate_simplex

__all__ = [
    "MAX_TERM_ORDER",
    "ExpansionReport",
    "exp_expansion_term",
    "exp_expansion_variant_nabla",
    "exp_expansion_simplex",
    "exp_expansion",
    "taylor_term",
    "taylor_partial_sum",
    "parametric_derivatives",
    "exp_nabla_kernel_1",
    "exp_nabla_kernel_2",
    "parametric_derivatives_exp_nabla",
    "nabla_direct",
    "nabla_expansion_terms",
    "nabla_expansion_order2",
    "trace_derivative_identity",
]

MAX_TERM_ORDER = 6


def _check_order(n, cap=MAX_TERM_ORDER):
    if int(n) != n or n < 0:
        raise ValueError("order must be a non-negative integer")
    if n > cap:
        raise ValueError(f"order {n} above the cap {cap}")
    return int(n)


def exp_expansion_term(a, b, n, spectral=None):
    """``([a^(0), ..., a^(n)] exp)(b . ... . b)``; ``n = 0`` gives ``e^a``."""
    n = _check_order(n)
    return contract(a, dd_kernel(exp_fn()), [b] * n, spectral)


def exp_expansion_variant_nabla(a, b, n, spectral=None):
    """``e^a ([0, nabla^(1), nabla^(1)+nabla^(2), ...] exp)(b . ... . b)``.

    Uses the slot kernel ``[0, l_1 - l_0, ..., l_n - l_0] exp`` and multiplies
    by ``e^a`` on the left.
    """
    n = _check_order(n)
    ex = exp_fn()
    sd = spectral if spectral is not None else eigh(a)

    def phi(*lam):
        return dd_confluent([0.0] + [lj - lam[0] for lj in lam[1:]], ex)

    body = contract(None, phi, [b] * n, sd)
    u = sd.unitary
    ea = (u * np.exp(sd.snapped())) @ u.conj().T
    return ea @ body


def exp_expansion_simplex(a, b, n, tol=1e-9):
    """Iterated simplex integral of ``e^{(1-s_1)a} b e^{(s_1-s_2)a} ... b e^{s_n a}``.

    Matrix exponentials come from ``scipy.linalg.expm`` at every node, so
    this path shares nothing with the eigenvalue kernels.  ``n <= 2``.
    """
    n = _check_order(n, cap=2)
    a = as_hermitian(a)
    b = np.asarray(b)
    if n == 0:
        return scipy.linalg.expm(a)

    def integrand(t):
        out = []
        for row in t:
            w = np.concatenate([[1.0], row]) - np.concatenate([row, [0.0]])
            mat = scipy.linalg.expm(w[0] * a)
            for wk in w[1:]:
                mat = mat @ b @ scipy.linalg.expm(wk * a)
            out.append(mat)
        return np.array(out)

    val, _ = integrate_simplex(integrand, n, tol=tol, orders=(4, 6, 8, 12, 16, 24))
    return val


@dataclass
class ExpansionReport:
    order: int
    terms: list
    partial_sums: list = field(default_factory=list)
    target: np.ndarray | None = None
    remainders: list = field(default_factory=list)


def exp_expansion(a, b, order):
    """Terms, partial sums and remainders of the expansion of ``e^{a+b}``."""
    order = _check_order(order)
    sd = eigh(a)
    terms = [exp_expansion_term(a, b, n, sd) for n in range(order + 1)]
    partial = list(np.cumsum(np.array(terms), axis=0))
    target = scipy.linalg.expm(np.asarray(a) + np.asarray(b))
    rem = [float(np.linalg.norm(target - s, 2)) for s in partial]
    return ExpansionReport(order, terms, partial, target, rem)


def taylor_term(a, b, f: ScalarFunction, n, spectral=None):
    """``([a^(0), ..., a^(n)] f)(b . ... . b)``."""
    n = _check_order(n)
    return contract(a, dd_kernel(f), [b] * n, spectral)


def taylor_partial_sum(a, b, f: ScalarFunction, order):
    sd = eigh(a)
    return sum(taylor_term(a, b, f, n, sd) for n in range(_check_order(order) + 1))


# ---------------------------------------------------------------------------
# parametric derivatives


def parametric_derivatives(a, d1, d2, d12, f: ScalarFunction):
    """First and mixed derivatives of ``f(a(s, t))`` at the origin.

    ``d1``, ``d2``, ``d12`` are the derivatives of the family in ``s``, in
    ``t`` and the mixed one.  Returns ``(first, mixed)`` with
    ``first = ([a^(0), a^(1)] f)(d1)`` and
    ``mixed = ([a^(0), a^(1)] f)(d12) + ([a^(0), a^(1), a^(2)] f)(d1 d2 + d2 d1)``.
    """
    sd = eigh(a)
    k = dd_kernel(f)
    first = contract(None, k, [d1], sd)
    mixed = (contract(None, k, [d12], sd) + contract(None, k, [d1, d2], sd)
             + contract(None, k, [d2, d1], sd))
    return first, mixed


_SAFE = 0.1  # below this the closed forms cancel badly; use the tableau


def exp_nabla_kernel_1(s):
    """``[0, s] exp = (e^s - 1)/s``."""
    if abs(s) < _SAFE:
        return dd_confluent([0.0, s], exp_fn())
    return math.expm1(s) / s


def exp_nabla_kernel_2(s, t):
    """``[0, s, s+t] exp = (e^{s+t} s + t - e^s (s+t)) / (s t (s+t))``."""
    if min(abs(s), abs(t), abs(s + t)) < _SAFE:
        return dd_confluent([0.0, s, s + t], exp_fn())
    return (math.exp(s + t) * s + t - math.exp(s) * (s + t)) / (s * t * (s + t))


def parametric_derivatives_exp_nabla(a, d1, d2, d12):
    """:func:`parametric_derivatives` for ``exp`` through the nabla-variable kernels."""
    sd = eigh(a)
    u = sd.unitary
    ea = (u * np.exp(sd.snapped())) @ u.conj().T
    first = ea @ contract_nabla(None, exp_nabla_kernel_1, [d1], sd)
    mixed = ea @ (contract_nabla(None, exp_nabla_kernel_1, [d12], sd)
                  + contract_nabla(None, exp_nabla_kernel_2, [d1, d2], sd)
                  + contract_nabla(None, exp_nabla_kernel_2, [d2, d1], sd))
    return first, mixed


# ---------------------------------------------------------------------------
# nabla expansion


def nabla_direct(a, x, f: ScalarFunction, spectral=None):
    """``f(nabla_a)(x)``, the operator ``x -> -a x + x a`` inserted into ``f``."""
    return contract_nabla(a, f, [x], spectral)


def _dd(f, *pts):
    return dd_confluent(pts, f)


def nabla_expansion_terms(a, b, x, f: ScalarFunction, spectral=None):
    """Zeroth, first and second order parts of ``f(nabla_{a+b})(x)`` in ``b``.

    Slot kernels are written in the eigenvalues ``l_0, l_1, ...`` of ``a``;
    each term is one contraction with the operand order shown.

    * order 0: ``f(l_1 - l_0)`` on ``x``.
    * order 1: ``-[l_2-l_0, l_2-l_1] f`` on ``(b, x)`` and
      ``+[l_2-l_0, l_1-l_0] f`` on ``(x, b)``.
    * order 2: ``+[l_3-l_0, l_3-l_1, l_3-l_2] f`` on ``(b, b, x)``,
      ``+[l_1-l_0, l_2-l_0, l_3-l_0] f`` on ``(x, b, b)``, and
      ``-[l_2-l_0, l_2-l_1, l_3-l_1] f`` and ``-[l_2-l_0, l_3-l_0, l_3-l_1] f``,
      both on ``(b, x, b)``.
    """
    sd = spectral if spectral is not None else eigh(a)
    zero = contract(None, lambda l0, l1: f(l1 - l0), [x], sd)
    first = (-contract(None, lambda l0, l1, l2: _dd(f, l2 - l0, l2 - l1), [b, x], sd)
             + contract(None, lambda l0, l1, l2: _dd(f, l2 - l0, l1 - l0), [x, b], sd))
    second = (
        contract(None, lambda l0, l1, l2, l3: _dd(f, l3 - l0, l3 - l1, l3 - l2), [b, b, x], sd)
        + contract(None, lambda l0, l1, l2, l3: _dd(f, l1 - l0, l2 - l0, l3 - l0), [x, b, b], sd)
        - contract(None, lambda l0, l1, l2, l3: _dd(f, l2 - l0, l2 - l1, l3 - l1), [b, x, b], sd)
        - contract(None, lambda l0, l1, l2, l3: _dd(f, l2 - l0, l3 - l0, l3 - l1), [b, x, b], sd)
    )
    return zero, first, second


def nabla_expansion_order2(a, b, x, f: ScalarFunction):
    """Second-order approximation of ``f(nabla_{a+b})(x)``."""
    zero, first, second = nabla_expansion_terms(a, b, x, f)
    return zero + first + second


def trace_derivative_identity(a, b, x, y, f: ScalarFunction):
    """Both sides of the derivative formula for ``phi(f(nabla_{a+eps b})(x) y)``.

    ``phi`` is the normalized trace.  lhs applies ``phi`` to the first order
    part of the expansion times ``y``; rhs is
    ``-phi(b ([s, -t] f)(x y)) + phi(b ([-s, t] f)(y x))`` with
    ``s = l_1 - l_0`` and ``t = l_2 - l_1``.
    """
    sd = eigh(a)
    d = sd.dim
    _, first, _ = nabla_expansion_terms(a, b, x, f, sd)
    lhs = np.trace(first @ y) / d
    k1 = contract(None, lambda l0, l1, l2: _dd(f, l1 - l0, l1 - l2), [x, y], sd)
    k2 = contract(None, lambda l0, l1, l2: _dd(f, l0 - l1, l2 - l1), [y, x], sd)
    rhs = -np.trace(np.asarray(b) @ k1) / d + np.trace(np.asarray(b) @ k2) / d
    return complex(lhs), complex(rhs)
