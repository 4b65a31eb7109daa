"""Special functions built from divided differences of ``x**m * log(x)``.

Notation: a multi-index ``alpha = (alpha_0, ..., alpha_p)`` and positive
arguments ``s``; ``M_alpha(s, z)`` is the half-line integral

    int_0^inf x^{|alpha|+p-1-z} prod_j (1 + s_j x)^{-alpha_j-1} dx,

``H_alpha(s', z) = M_alpha((1, s'), z)`` and ``L_m`` is the modified
logarithm ``(-1)^m [1^{m+1}, s] log``.  At integer ``z = m`` every one of
them is a confluent divided difference of ``idmlog(m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import ddcore
from .catalog import ScalarFunction, idmlog, power
from .errors import DomainError, PreconditionError
from .quad import DiffSpec, QuadratureSpec, directional_derivative, integrate_halfline

__all__ = [
    "MultiIndex",
    "mod_log",
    "modlog_fn",
    "m_func",
    "h_func",
    "m_integral",
    "h_integral",
    "m_func_general_z",
    "mellin_basic",
    "hcm",
    "hcm_closed_form",
    "HCM_CLOSED_FORMS",
    "euler_operator_form",
    "k_identity_pair",
    "bernoulli_gen",
    "bernoulli_numbers",
    "bernoulli_coeffs",
    "factorials",
    "monomial_operator",
    "monomial_operator_closed",
]


@dataclass(frozen=True)
class MultiIndex:
    parts: tuple

    def __post_init__(self):
        parts = tuple(int(a) for a in self.parts)
        if any(a < 0 for a in parts):
            raise DomainError(f"multi-index parts must be >= 0, got {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def p(self):
        return len(self.parts) - 1

    @property
    def order(self):
        return sum(self.parts)

    @property
    def factorial(self):
        return math.prod(math.factorial(a) for a in self.parts)

    @property
    def tail(self):
        """alpha' = (0, alpha_1, ..., alpha_p)."""
        return MultiIndex((0,) + self.parts[1:])

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)


def _alpha(alpha):
    return alpha if isinstance(alpha, MultiIndex) else MultiIndex(tuple(alpha))


def _positive(s, what="s"):
    s = tuple(float(v) for v in np.ravel(s))
    if not all(v > 0 and math.isfinite(v) for v in s):
        raise DomainError(f"{what} must be positive and finite, got {s}")
    return s


# ---------------------------------------------------------------------------
# modified logarithms


def _modlog_scalar(m, s, radius):
    d = s - 1.0
    if abs(d) < radius:
        total, term, j = 0.0, 1.0, 0
        while True:
            contrib = term / (m + 1 + j)
            total += contrib
            if abs(contrib) < 1e-17 * abs(total) or j > 400:
                return total
            term *= -d
            j += 1
    head = math.log(s) - sum((-1) ** (j - 1) * d**j / j for j in range(1, m + 1))
    return (-1) ** m * head / d ** (m + 1)


def _series_radius(m):
    # the closed form loses about m+1 digits per decade of |s-1|
    return 0.1 if m <= 2 else 0.5


def mod_log(m, s):
    """``L_m(s) = (-1)^m [1^{m+1}, s] log`` for ``s > 0``.

    Closed form away from ``s = 1``; power series in ``s - 1`` nearby.
    Vectorized over ``s``.
    """
    m = int(m)
    if m < 0:
        raise DomainError("mod_log needs m >= 0")
    arr = np.asarray(s, dtype=float)
    if not np.all(arr > 0):
        raise DomainError(f"mod_log needs s > 0, got {s!r}")
    radius = _series_radius(m)
    out = np.array([_modlog_scalar(m, float(v), radius) for v in arr.ravel()])
    out = out.reshape(arr.shape)
    return out if out.ndim else float(out)


def modlog_fn(m):
    """``L_m`` as a :class:`ScalarFunction` with exact Taylor data."""
    m = int(m)
    base = idmlog(0)
    sign = (-1) ** m

    def taylor(c, order):
        return np.array([sign * ddcore.dd_confluent([(1.0, m + 1), (c, k + 1)], base)
                         for k in range(order + 1)])

    def cvalue(z):
        z = np.asarray(z, complex)
        d = z - 1.0
        head = np.log(z) - sum((-1) ** (j - 1) * d**j / j for j in range(1, m + 1))
        return sign * head / d ** (m + 1)

    return ScalarFunction(f"modlog:{m}", lambda s: mod_log(m, s), taylor=taylor,
                          complex_value=cvalue, domain=(0.0, math.inf), singularities=(0.0,))


# ---------------------------------------------------------------------------
# M and H at integer exponents


def _check_m(alpha, m, upper=None):
    if alpha.p < 1:
        raise DomainError("need p >= 1, i.e. at least two multi-index parts")
    hi = alpha.order + alpha.p - 1 if upper is None else upper
    if int(m) != m or not 0 <= m <= hi:
        raise DomainError(f"m must be an integer in [0, {hi}], got {m!r}")
    return int(m)


def m_func(alpha, s, m):
    """``M_alpha(s, m) = (-1)^{m+|alpha|+p-1} [s_0^{alpha_0+1}, ..., s_p^{alpha_p+1}] id^m log``."""
    alpha = _alpha(alpha)
    m = _check_m(alpha, m)
    s = _positive(s)
    if len(s) != len(alpha):
        raise DomainError(f"need {len(alpha)} arguments s, got {len(s)}")
    sign = (-1) ** (m + alpha.order + alpha.p - 1)
    entries = [(sj, aj + 1) for sj, aj in zip(s, alpha)]
    return sign * ddcore.dd_confluent(ddcore.NodeSystem.from_entries(entries), idmlog(m))


def h_func(alpha, s, m):
    """``H_alpha(s, m) = M_alpha((1, s_1, ..., s_p), m)``."""
    s = _positive(s)
    return m_func(alpha, (1.0,) + s, m)


def m_integral(alpha, s, z, form="a", spec=None):
    """Half-line quadrature of ``M_alpha(s, z)``; ``form`` picks the integrand.

    ``"a"``: ``x^{|alpha|+p-1-z} prod (1 + s_j x)^{-alpha_j-1}``;
    ``"b"``: ``x^z prod (x + s_j)^{-alpha_j-1}``.  Valid for real
    ``-1 < z < |alpha| + p``.  Returns ``(value, error_estimate)``.
    """
    alpha = _alpha(alpha)
    s = np.array(_positive(s))
    z = float(z)
    if not -1.0 < z < alpha.order + alpha.p:
        raise DomainError(f"z={z} outside the convergence strip")
    expo = np.array(alpha.parts, float) + 1.0
    spec = spec or QuadratureSpec(tolerance=1e-13, rel_tolerance=1e-11)
    if form == "a":
        power_ = alpha.order + alpha.p - 1 - z

        def g(x):
            return x**power_ * np.prod((1.0 + np.outer(x, s)) ** -expo, axis=1)
    elif form == "b":

        def g(x):
            return x**z * np.prod((x[:, None] + s) ** -expo, axis=1)
    else:
        raise ValueError("form must be 'a' or 'b'")
    val, err = integrate_halfline(g, spec)
    return float(val), err


def h_integral(alpha, s, z, form="a", spec=None):
    return m_integral(alpha, (1.0,) + _positive(s), z, form, spec)


def m_func_general_z(t, z):
    """``M_0(t, z) = (-1)^{q-1} pi/sin(pi z) [t_0, ..., t_q] id^z`` for non-integer z.

    Evaluated with the explicit sum over distinct nodes.
    """
    t = _positive(t, "t")
    q = len(t) - 1
    z = float(z)
    if q < 1:
        raise DomainError("need at least two nodes")
    if abs(z - round(z)) < 1e-6:
        raise DomainError(f"z={z} is within 1e-6 of an integer; use m_func instead")
    if not -1.0 < z < q:
        raise DomainError(f"z={z} outside the strip (-1, {q})")
    ns = ddcore.NodeSystem.from_points(t)
    if ns.max_multiplicity > 1:
        raise DomainError("m_func_general_z needs pairwise distinct nodes")
    dd = ddcore.dd_explicit(ns, power(z))
    return (-1) ** (q - 1) * math.pi / math.sin(math.pi * z) * dd


def factorials(a, n):
    """Rising and falling factorials ``(a^(n rising), a^(n falling))``."""
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")
    rising = falling = 1 if isinstance(a, (int, Fraction)) else 1.0
    for j in range(n):
        rising *= a + j
        falling *= a - j
    return rising, falling


def mellin_basic(z, m):
    """``int_0^inf x^{z-1} (1+x)^{-m-1} dx = (1-z)^(m rising)/m! * pi/sin(pi z)``.

    Equivalently ``(-1)^m (z-1)^(m falling)/m! * pi/sin(pi z)``.
    """
    z = float(z)
    m = int(m)
    if not 0.0 < z < 1.0:
        raise DomainError(f"z must lie in (0, 1), got {z}")
    if m < 0:
        raise DomainError("m must be >= 0")
    rising, _ = factorials(1.0 - z, m)
    return rising / math.factorial(m) * math.pi / math.sin(math.pi * z)


# ---------------------------------------------------------------------------
# two-variable functions


def hcm(i, j, k, a, b):
    """``H^CM_{i,j,k}(a, b) = H_{(i-1, j-1, k-1)}((a, b), 0)``."""
    if min(i, j, k) < 1:
        raise DomainError("indices must be >= 1")
    return h_func((i - 1, j - 1, k - 1), (a, b), 0)


def _hcm_111(a, b):
    return (math.log(a) / ((a - 1) * (b - a)) - math.log(b) / ((b - 1) * (b - a)),
            ((b - 1) * math.log(a) - (a - 1) * math.log(b)) / ((a - 1) * (b - 1) * (b - a)))


def _hcm_121(a, b):
    la, lb = math.log(a), math.log(b)
    second = ((b - 2 * a + 1) * la / ((a - 1) ** 2 * (b - a) ** 2)
              + lb / ((b - 1) * (b - a) ** 2) - 1 / ((b - a) * (a - 1) * a))
    first = (((b - 1) * ((a - 1) * (a - b) + a * (1 - 2 * a + b) * la) + (a - 1) ** 2 * a * lb)
             / ((a - 1) ** 2 * a * (a - b) ** 2 * (b - 1)))
    return second, first


def _hcm_211(a, b):
    la, lb = math.log(a), math.log(b)
    second = (-la / ((b - a) * (a - 1) ** 2) + lb / ((b - 1) ** 2 * (b - a))
              + 1 / ((b - 1) * (a - 1)))
    first = (((b - 1) ** 2 * la + (a - 1) * ((a - b) * (b - 1) - (a - 1) * lb))
             / ((a - 1) ** 2 * (a - b) * (b - 1) ** 2))
    return second, first


def _hcm_221(a, b):
    la, lb = math.log(a), math.log(b)
    second = (-(2 * b - 3 * a + 1) * la / ((b - a) ** 2 * (a - 1) ** 3)
              - lb / ((b - 1) ** 2 * (b - a) ** 2)
              + ((a + 1) * b - a * a - 1) / ((b - 1) * (b - a) * (a - 1) ** 2 * a))
    first = (((b - 1) * ((a - 1) * (a - b) * (1 + a * a - (1 + a) * b)
                         + a * (-1 + 3 * a - 2 * b) * (b - 1) * la) - (a - 1) ** 3 * a * lb)
             / ((a - 1) ** 3 * a * (a - b) ** 2 * (b - 1) ** 2))
    return second, first


def _hcm_311(a, b):
    la, lb = math.log(a), math.log(b)
    second = (la / ((b - a) * (a - 1) ** 3) - lb / ((b - a) * (b - 1) ** 3)
              + ((a - 3) * b - 3 * a + 5) / (2 * (b - 1) ** 2 * (a - 1) ** 2))
    first = (((a - 1) * (5 + a * (b - 3) - 3 * b) * (a - b) * (b - 1)
              - 2 * (b - 1) ** 3 * la + 2 * (a - 1) ** 3 * lb)
             / (2 * (a - 1) ** 3 * (a - b) * (b - 1) ** 3))
    return second, first


HCM_CLOSED_FORMS = {
    (1, 1, 1): _hcm_111,
    (1, 2, 1): _hcm_121,
    (2, 1, 1): _hcm_211,
    (2, 2, 1): _hcm_221,
    (3, 1, 1): _hcm_311,
}


def hcm_closed_form(i, j, k, a, b, variant="reduced"):
    """Explicit rational/log formula for the five tabulated index triples.

    ``variant="reduced"`` uses the partial-fraction form, ``"raw"`` the
    single-fraction form.  Both are singular at ``a = 1``, ``b = 1`` and
    ``a = b``.
    """
    key = (int(i), int(j), int(k))
    if key not in HCM_CLOSED_FORMS:
        raise DomainError(f"no closed form tabulated for {key}")
    a, b = float(a), float(b)
    if a <= 0 or b <= 0:
        raise DomainError("a, b must be positive")
    if a == 1 or b == 1 or a == b:
        raise DomainError("closed forms are singular at a = 1, b = 1 or a = b")
    reduced, raw = HCM_CLOSED_FORMS[key](a, b)
    if variant == "reduced":
        return reduced
    if variant == "raw":
        return raw
    raise ValueError("variant must be 'reduced' or 'raw'")


# ---------------------------------------------------------------------------
# Euler-operator form


def _falling_poly(shift, n):
    """Coefficients (ascending) of ``t -> (t + shift)^(n falling)``."""
    poly = np.array([1.0])
    for i in range(n):
        poly = np.convolve(poly, [shift - i, 1.0])
    return poly


def euler_operator_form(alpha, s, m, spec=DiffSpec()):
    """``H_alpha(s, m)`` through the falling-factorial polynomial in the Euler operator.

    ``E = sum_k s_k d/ds_k`` is applied numerically to the exact
    ``d_s^{alpha'} [1, s_1, ..., s_p] id^m log``: the polynomial
    ``(E + |alpha|+p-1-m)^(alpha_0 falling)`` is expanded in powers of ``E``
    and ``E^j G(s)`` is the ``j``-th derivative of ``t -> G(e^t s)`` at 0.
    Requires ``m <= |alpha'| + p - 1`` and ``alpha_0 <= 3``.
    """
    alpha = _alpha(alpha)
    tail = alpha.tail
    m = _check_m(alpha, m, upper=tail.order + alpha.p - 1)
    s = np.array(_positive(s))
    if len(s) != alpha.p:
        raise DomainError(f"need {alpha.p} arguments s, got {len(s)}")
    a0 = alpha.parts[0]
    if a0 > 3:
        raise DomainError("alpha_0 <= 3 required (numerical differentiation budget)")
    f = idmlog(m)
    tail_fact = tail.factorial

    def inner(sv):
        entries = [(1.0, 1)] + [(float(v), aj + 1) for v, aj in zip(sv, alpha.parts[1:])]
        return tail_fact * ddcore.dd_confluent(ddcore.NodeSystem.from_entries(entries), f)

    coeffs = _falling_poly(alpha.order + alpha.p - 1 - m, a0)
    total = coeffs[0] * inner(s)
    phi = lambda t: inner(math.exp(t) * s)  # noqa: E731
    for jj in range(1, a0 + 1):
        total += coeffs[jj] * directional_derivative(phi, 0.0, 1.0, jj, spec)
    sign = (-1) ** (tail.order + alpha.p - 1 - m)
    return sign * total / alpha.factorial


# ---------------------------------------------------------------------------
# even-function identity


def k_identity_pair(K: ScalarFunction, a, b, even_tol=1e-12):
    """Both sides of the divided-difference rewriting for an even ``K``.

    lhs = (K(b)-K(a))/(a+b) + (K(a+b)-K(b))/a - (K(a+b)-K(a))/b,
    rhs = [-a, b]K + [a+b, b]K - [a+b, a]K.
    """
    a, b = float(a), float(b)
    if a == 0 or b == 0 or a + b == 0:
        raise DomainError("need a, b and a + b nonzero")
    probe = np.array([a, b, a + b, 0.5 * a, 0.5 * (a + b)])
    kp, km = np.asarray(K(probe)), np.asarray(K(-probe))
    if np.any(np.abs(kp - km) > even_tol * np.maximum(1.0, np.abs(kp))):
        raise PreconditionError(f"{K.name} is not even to {even_tol}")
    Ka, Kb, Kab = (float(K(v)) for v in (a, b, a + b))
    lhs = (Kb - Ka) / (a + b) + (Kab - Kb) / a - (Kab - Ka) / b
    rhs = (ddcore.dd_confluent([-a, b], K) + ddcore.dd_confluent([a + b, b], K)
           - ddcore.dd_confluent([a + b, a], K))
    return lhs, rhs


# ---------------------------------------------------------------------------
# Bernoulli numbers


def bernoulli_gen(s):
    """``s/(e^s - 1)``, equal to ``L_0(e^s)``; 1 at ``s = 0``."""
    s = float(s)
    return 1.0 if s == 0.0 else s / math.expm1(s)


@lru_cache(maxsize=None)
def _bernoulli(n):
    bern = [Fraction(1)]
    for j in range(1, n + 1):
        bern.append(-sum(math.comb(j + 1, k) * bern[k] for k in range(j)) / (j + 1))
    return tuple(bern)


def bernoulli_numbers(n):
    """Exact ``B_0, ..., B_n`` from ``sum_{k<=j} C(j+1, k) B_k = 0``."""
    return list(_bernoulli(int(n)))


def bernoulli_coeffs(n):
    """``B_j/j!`` for ``j = 0..n`` as exact fractions."""
    return [b / math.factorial(j) for j, b in enumerate(_bernoulli(int(n)))]


# ---------------------------------------------------------------------------
# totally characteristic operators on monomials


def monomial_operator(a, b, c, n, m, z):
    """Apply ``x^a d^n x^b d^m x^c`` to ``x^z`` step by step.

    Works on the pair (coefficient, exponent) with exact rationals; returns
    the pair.
    """
    coef, expo = Fraction(1), Fraction(z) + Fraction(c)
    for _ in range(m):
        coef *= expo
        expo -= 1
    expo += Fraction(b)
    for _ in range(n):
        coef *= expo
        expo -= 1
    return coef, expo + Fraction(a)


def monomial_operator_closed(a, b, c, n, m, z):
    """Factorial form ``(z+b+c-m)^(n falling) (z+c)^(m falling)`` with its exponent."""
    z, a, b, c = (Fraction(v) for v in (z, a, b, c))
    _, f1 = factorials(z + b + c - m, n)
    _, f2 = factorials(z + c, m)
    return f1 * f2, z + a + b + c - n - m
