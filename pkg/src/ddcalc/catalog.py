"""Smooth scalar functions with derivative data.

A :class:`ScalarFunction` bundles values, k-th derivatives, Taylor
coefficients and (optionally) a complex extension.  Divided differences with
repeated nodes need derivatives, the simplex oracle needs vectorized
derivatives, and the contour oracle needs complex values; catalog entries
supply all three exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import CapabilityError, DomainError

__all__ = [
    "ScalarFunction",
    "exp_fn",
    "log_fn",
    "idmlog",
    "power",
    "poly",
    "gaussian",
    "cosh_fn",
    "bernoulli_fn",
    "from_derivatives",
    "by_name",
]


class ScalarFunction:
    """A smooth real function on an open interval.

    Parameters
    ----------
    name : str
        Label used in reports.
    value : callable
        Vectorized ``x -> f(x)``.
    deriv : callable, optional
        Vectorized ``(k, x) -> f^{(k)}(x)``.
    taylor : callable, optional
        ``(c, order) -> array`` of ``f^{(k)}(c)/k!`` for ``k = 0..order``.
        At least one of ``deriv`` and ``taylor`` should be given unless only
        values are available (then ``max_order`` is 0).
    complex_value : callable, optional
        Analytic continuation used by contour integrals.
    domain : (float, float)
        Open interval of definition.  A finite endpoint is treated as the
        start of a branch cut running away from the interval.
    max_order : int or None
        Largest supported derivative order; ``None`` means unbounded.
    singularities : sequence of complex
        Isolated complex singularities (poles) of the analytic extension.
    """

    def __init__(self, name, value, *, deriv=None, taylor=None, complex_value=None,
                 domain=(-math.inf, math.inf), max_order=None, singularities=()):
        self.name = name
        self._value = value
        self._deriv = deriv
        self._taylor = taylor
        self._complex = complex_value
        self.domain = (float(domain[0]), float(domain[1]))
        if deriv is None and taylor is None and max_order is None:
            max_order = 0
        self.max_order = max_order
        self.singularities = tuple(complex(s) for s in singularities)

    def __repr__(self):
        return f"ScalarFunction({self.name!r})"

    def __call__(self, x):
        return self._value(x)

    # -- capabilities -----------------------------------------------------

    def supports(self, k):
        return self.max_order is None or k <= self.max_order

    def _require(self, k):
        if not self.supports(k):
            raise CapabilityError(
                f"{self.name} supplies derivatives up to order {self.max_order}, "
                f"order {k} requested")

    def in_domain(self, x):
        lo, hi = self.domain
        x = np.asarray(x, dtype=float)
        return bool(np.all((x > lo) & (x < hi) & np.isfinite(x)))

    def check_domain(self, xs):
        if not self.in_domain(xs):
            raise DomainError(f"{self.name} is defined on {self.domain}; got {xs!r}")

    def singularity_distance(self, c):
        """Distance from real ``c`` to the nearest point where f is not analytic."""
        lo, hi = self.domain
        d = min(c - lo, hi - c)
        for s in self.singularities:
            d = min(d, abs(complex(c) - s))
        return d

    # -- derivative data --------------------------------------------------

    def deriv(self, k, x):
        """k-th derivative, vectorized over ``x``."""
        if k == 0:
            return self._value(x)
        self._require(k)
        if self._deriv is not None:
            return self._deriv(k, x)
        xs = np.asarray(x, dtype=float)
        out = np.array([self._taylor(float(t), k)[k] for t in xs.ravel()])
        out = out.reshape(xs.shape) * math.factorial(k)
        return out if out.ndim else float(out)

    def taylor(self, c, order):
        """Normalized derivatives ``f^{(k)}(c)/k!`` for ``k = 0..order``."""
        self._require(order)
        if self._taylor is not None:
            return np.asarray(self._taylor(float(c), order), dtype=float)
        return np.array([float(self.deriv(k, float(c))) / math.factorial(k)
                         for k in range(order + 1)])

    def complex_value(self, z):
        if self._complex is None:
            raise CapabilityError(f"{self.name} has no complex extension")
        return self._complex(z)

    # -- composition ------------------------------------------------------

    def __mul__(self, other):
        f, g = self, other
        lo = max(f.domain[0], g.domain[0])
        hi = min(f.domain[1], g.domain[1])
        if f.max_order is None or g.max_order is None:
            order = f.max_order if g.max_order is None else g.max_order
        else:
            order = min(f.max_order, g.max_order)

        def deriv(k, x):
            return sum(math.comb(k, j) * f.deriv(j, x) * g.deriv(k - j, x)
                       for j in range(k + 1))

        def taylor(c, n):
            return np.convolve(f.taylor(c, n), g.taylor(c, n))[: n + 1]

        cv = None
        if f._complex is not None and g._complex is not None:
            cv = lambda z: f.complex_value(z) * g.complex_value(z)  # noqa: E731
        return ScalarFunction(f"({f.name})*({g.name})", lambda x: f(x) * g(x),
                              deriv=deriv, taylor=taylor, complex_value=cv,
                              domain=(lo, hi), max_order=order,
                              singularities=f.singularities + g.singularities)

    def __add__(self, other):
        f, g = self, other
        if f.max_order is None or g.max_order is None:
            order = f.max_order if g.max_order is None else g.max_order
        else:
            order = min(f.max_order, g.max_order)
        cv = None
        if f._complex is not None and g._complex is not None:
            cv = lambda z: f.complex_value(z) + g.complex_value(z)  # noqa: E731
        return ScalarFunction(
            f"({f.name})+({g.name})", lambda x: f(x) + g(x),
            deriv=lambda k, x: f.deriv(k, x) + g.deriv(k, x),
            taylor=lambda c, n: f.taylor(c, n) + g.taylor(c, n), complex_value=cv,
            domain=(max(f.domain[0], g.domain[0]), min(f.domain[1], g.domain[1])),
            max_order=order, singularities=f.singularities + g.singularities)

    def rescaled(self, c):
        """The function ``x -> f(c x)`` for ``c > 0``."""
        c = float(c)
        if not c > 0:
            raise ValueError("scale must be positive")
        f = self
        cv = None if f._complex is None else (lambda z: f.complex_value(c * np.asarray(z)))
        return ScalarFunction(
            f"{f.name}({c:g}x)", lambda x: f(c * np.asarray(x)),
            deriv=lambda k, x: c**k * f.deriv(k, c * np.asarray(x)),
            taylor=lambda x0, n: f.taylor(c * x0, n) * c ** np.arange(n + 1),
            complex_value=cv, domain=(f.domain[0] / c, f.domain[1] / c),
            max_order=f.max_order, singularities=[s / c for s in f.singularities])

    def shifted(self, c):
        """The function ``x -> f(x + c)``."""
        f = self
        cv = None if f._complex is None else (lambda z: f.complex_value(z + c))
        return ScalarFunction(
            f"{f.name}(x+{c:g})", lambda x: f(np.asarray(x) + c),
            deriv=lambda k, x: f.deriv(k, np.asarray(x) + c),
            taylor=lambda x0, n: f.taylor(x0 + c, n), complex_value=cv,
            domain=(f.domain[0] - c, f.domain[1] - c), max_order=f.max_order,
            singularities=[s - c for s in f.singularities])


# ---------------------------------------------------------------------------
# catalog

def exp_fn():
    def taylor(c, n):
        return math.exp(c) / np.array([math.factorial(k) for k in range(n + 1)], float)

    return ScalarFunction("exp", np.exp, deriv=lambda k, x: np.exp(x), taylor=taylor,
                          complex_value=np.exp)


def _log_deriv(k, x):
    x = np.asarray(x, dtype=float)
    return (-1) ** (k - 1) * math.factorial(k - 1) / x**k


def _log_taylor(c, n):
    out = np.empty(n + 1)
    out[0] = math.log(c)
    for k in range(1, n + 1):
        out[k] = (-1) ** (k - 1) / (k * c**k)
    return out


def log_fn():
    return ScalarFunction("log", np.log, deriv=_log_deriv, taylor=_log_taylor,
                          complex_value=lambda z: np.log(np.asarray(z, complex)),
                          domain=(0.0, math.inf), singularities=(0.0,))


@lru_cache(maxsize=None)
def _idmlog_coeffs(m, n):
    # f^(k)(x)/k! = (a_k log x + b_k) x^(m-k)
    a = [math.comb(m, k) if k <= m else 0 for k in range(n + 1)]
    b = [0.0] * (n + 1)
    for k in range(n):
        b[k + 1] = ((m - k) * b[k] + a[k]) / (k + 1)
    return np.array(a, float), np.array(b, float)


def idmlog(m):
    """``x -> x**m * log(x)`` with exact derivatives of every order."""
    m = int(m)
    if m < 0:
        raise DomainError("idmlog needs m >= 0")
    if m == 0:
        f = log_fn()
        f.name = "idmlog:0"
        return f

    def value(x):
        x = np.asarray(x, dtype=float)
        return x**m * np.log(x)

    def deriv(k, x):
        x = np.asarray(x, dtype=float)
        a, b = _idmlog_coeffs(m, k)
        fk = math.factorial(k)
        return (a[k] * np.log(x) + b[k]) * fk * x ** float(m - k)

    def taylor(c, n):
        a, b = _idmlog_coeffs(m, n)
        pw = c ** (m - np.arange(n + 1, dtype=float))
        return (a * math.log(c) + b) * pw

    def cvalue(z):
        z = np.asarray(z, complex)
        return z**m * np.log(z)

    return ScalarFunction(f"idmlog:{m}", value, deriv=deriv, taylor=taylor,
                          complex_value=cvalue, domain=(0.0, math.inf),
                          singularities=(0.0,))


def power(z):
    """``x -> x**z`` on the positive half-line."""
    z = float(z)

    def falling(k):
        out = 1.0
        for j in range(k):
            out *= z - j
        return out

    def taylor(c, n):
        out = np.empty(n + 1)
        coef = 1.0
        for k in range(n + 1):
            out[k] = coef * c ** (z - k)
            coef *= (z - k) / (k + 1)
        return out

    return ScalarFunction(
        f"power:{z:g}", lambda x: np.asarray(x, float) ** z,
        deriv=lambda k, x: falling(k) * np.asarray(x, float) ** (z - k),
        taylor=taylor, complex_value=lambda w: np.exp(z * np.log(np.asarray(w, complex))),
        domain=(0.0, math.inf), singularities=(0.0,))


def poly(coeffs):
    """Polynomial ``c0 + c1 x + c2 x**2 + ...``."""
    p = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))

    def taylor(c, n):
        out = np.empty(n + 1)
        q = p
        for k in range(n + 1):
            out[k] = q(c) / math.factorial(k)
            q = q.deriv()
        return out

    name = "poly:" + ",".join(f"{v:g}" for v in p.coef)
    return ScalarFunction(name, p, deriv=lambda k, x: p.deriv(k)(x), taylor=taylor,
                          complex_value=p)


def gaussian():
    """``x -> exp(-x**2)``; derivatives are Hermite polynomials times the Gaussian."""

    def deriv(k, x):
        x = np.asarray(x, dtype=float)
        h_prev, h = np.ones_like(x), 2 * x
        if k == 0:
            h = h_prev
        for j in range(1, k):
            h_prev, h = h, 2 * x * h - 2 * j * h_prev
        return (-1) ** k * h * np.exp(-x * x)

    def taylor(c, n):
        g = np.empty(n + 1)
        g[0] = 1.0
        if n >= 1:
            g[1] = -2 * c
        for k in range(1, n):
            g[k + 1] = -(2 * c * g[k] + 2 * g[k - 1]) / (k + 1)
        return g * math.exp(-c * c)

    return ScalarFunction("gaussian", lambda x: np.exp(-np.asarray(x) ** 2), deriv=deriv,
                          taylor=taylor,
                          complex_value=lambda z: np.exp(-np.asarray(z, complex) ** 2))


def cosh_fn(scale=1.0):
    """``x -> cosh(scale * x)``, an even entire function."""
    s = float(scale)

    def deriv(k, x):
        x = np.asarray(x, dtype=float)
        return s**k * (np.cosh(s * x) if k % 2 == 0 else np.sinh(s * x))

    def taylor(c, n):
        ch, sh = math.cosh(s * c), math.sinh(s * c)
        return np.array([s**k * (ch if k % 2 == 0 else sh) / math.factorial(k)
                         for k in range(n + 1)])

    return ScalarFunction(f"cosh:{s:g}", lambda x: np.cosh(s * np.asarray(x)), deriv=deriv,
                          taylor=taylor,
                          complex_value=lambda z: np.cosh(s * np.asarray(z, complex)))


@lru_cache(maxsize=None)
def _bernoulli_over_factorial(n):
    # B_j / j! from sum_{k=0}^{j} C(j+1, k) B_k = 0
    bern = [Fraction(1)]
    for j in range(1, n + 1):
        acc = sum(math.comb(j + 1, k) * bern[k] for k in range(j))
        bern.append(-acc / (j + 1))
    return tuple(float(b / math.factorial(j)) for j, b in enumerate(bern))


def _inv_expm1_taylor(c, n):
    # u(x) = 1/(e^x - 1) expanded at c != 0 by series division
    ec = math.exp(c)
    w = [math.expm1(c)] + [ec / math.factorial(k) for k in range(1, n + 1)]
    u = [1.0 / w[0]]
    for k in range(1, n + 1):
        u.append(-sum(w[j] * u[k - j] for j in range(1, k + 1)) / w[0])
    return u


def bernoulli_fn():
    """``x -> x/(e^x - 1)``, the Bernoulli generating function (value 1 at 0)."""
    nser = 60
    beta = _bernoulli_over_factorial(nser)

    def value(x):
        x = np.asarray(x, dtype=float)
        safe = np.where(x == 0, 1.0, x)
        out = np.where(x == 0, 1.0, safe / np.expm1(safe))
        return out if out.ndim else float(out)

    def taylor(c, n):
        if abs(c) < 1.0:
            out = np.zeros(n + 1)
            for k in range(n + 1):
                acc = 0.0
                for j in range(k, nser + 1):
                    acc += beta[j] * math.comb(j, k) * c ** (j - k)
                out[k] = acc
            return out
        u = _inv_expm1_taylor(c, n)
        return np.array([c * u[k] + (u[k - 1] if k else 0.0) for k in range(n + 1)])

    def cvalue(z):
        z = np.asarray(z, complex)
        return z / np.expm1(z)

    return ScalarFunction("bernoulli", value, taylor=taylor, complex_value=cvalue,
                          singularities=(2j * math.pi, -2j * math.pi))


def from_derivatives(name, derivs, *, domain=(-math.inf, math.inf), complex_value=None,
                     singularities=()):
    """Build a function from a list ``[f, f', f'', ...]`` of vectorized callables."""
    derivs = list(derivs)
    return ScalarFunction(name, derivs[0], deriv=lambda k, x: derivs[k](x),
                          complex_value=complex_value, domain=domain,
                          max_order=len(derivs) - 1, singularities=singularities)


def by_name(spec):
    """Parse a catalog name such as ``exp``, ``idmlog:2`` or ``poly:0,0,1``."""
    name, _, arg = spec.partition(":")
    if name == "exp":
        return exp_fn()
    if name == "log":
        return log_fn()
    if name == "gaussian":
        return gaussian()
    if name == "bernoulli":
        return bernoulli_fn()
    if name == "cosh":
        return cosh_fn(float(arg) if arg else 1.0)
    if name == "idmlog":
        return idmlog(int(arg))
    if name == "power":
        return power(float(arg))
    if name == "poly":
        return poly([float(c) for c in arg.split(",")])
    if name == "modlog":
        from .funcs import modlog_fn

        return modlog_fn(int(arg))
    raise ValueError(f"unknown function {spec!r}")
