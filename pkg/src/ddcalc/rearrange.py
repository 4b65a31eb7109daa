"""Matrix-scale checks of the spectral Fubini, operator substitution and
rearrangement identities.

Every check returns both sides, each computed by its own route:

* the left-hand sides are matrix-valued (Bochner) quadratures over the
  half-line with one shared subdivision for all entries;
* the right-hand sides apply a scalar function to joint eigenvalues (or, for
  the rearrangement identity, a modular-convention contraction whose kernel
  is the closed-form ``H`` function).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import funcs, matcalc
from .catalog import power
from .ddcore import dd_confluent
from .errors import DomainError, PreconditionError
from .quad import QuadratureSpec, integrate_halfline

__all__ = [
    "DEFAULT_QUAD",
    "RearrangementCase",
    "rearrangement_kernel",
    "rearrangement_lhs",
    "rearrangement_rhs",
    "exosl_integrand",
    "joint_diagonalize",
    "operator_substitution_check",
    "spectral_fubini_check",
]

DEFAULT_QUAD = QuadratureSpec(tolerance=1e-12, rel_tolerance=1e-10, max_subdivisions=4000)


@dataclass
class RearrangementCase:
    """Data for ``int f_0(uA) b_1 f_1(uA) ... b_p f_p(uA) du`` with ``A = exp(a)``.

    ``f_0(x) = x**nu (1+x)**(-alpha_0-1)`` and ``f_j(x) = (1+x)**(-alpha_j-1)``.
    """

    alpha: tuple
    nu: float
    a: np.ndarray
    b: list
    quad: QuadratureSpec = field(default=DEFAULT_QUAD)

    def __post_init__(self):
        self.alpha = tuple(int(x) for x in self.alpha)
        p = len(self.alpha) - 1
        if p < 1 or any(x < 0 for x in self.alpha):
            raise DomainError("alpha needs p >= 1 non-negative parts")
        if len(self.b) != p:
            raise DomainError(f"need {p} operands b, got {len(self.b)}")
        self.a = matcalc.as_hermitian(self.a)
        d = self.a.shape[0]
        for bj in self.b:
            if np.shape(bj) != (d, d):
                raise DomainError("operand dimensions do not match a")
        if not -1.0 < self.nu < sum(self.alpha) + p:
            raise DomainError(f"nu={self.nu} outside (-1, |alpha| + p)")

    @property
    def p(self):
        return len(self.alpha) - 1

    @property
    def m(self):
        """Integer exponent of the closed form, or None for non-integer nu."""
        if float(self.nu).is_integer():
            return int(sum(self.alpha) + self.p - 1 - self.nu)
        return None

    @property
    def A(self):
        return matcalc.matrix_function(self.a, np.exp)


def _positive_spectral(case):
    sd = matcalc.eigh(case.a)
    return matcalc.SpectralData(np.exp(sd.eigenvalues), sd.unitary)


def rearrangement_lhs(case: RearrangementCase):
    """Matrix quadrature of ``u -> f_0(uA) b_1 f_1(uA) ... b_p f_p(uA)``."""
    sd = _positive_spectral(case)
    u, lam = sd.unitary, sd.eigenvalues
    rot = [u.conj().T @ np.asarray(bj) @ u for bj in case.b]
    nu, alpha = case.nu, case.alpha

    def integrand(x):
        ul = np.outer(x, lam)  # (N, d)
        out = (ul**nu * (1.0 + ul) ** (-alpha[0] - 1))[:, :, None] * rot[0][None]
        for j in range(1, case.p):
            fj = (1.0 + ul) ** (-alpha[j] - 1)
            out = np.einsum("nab,nb,bc->nac", out, fj, rot[j])
        return out * ((1.0 + ul) ** (-alpha[-1] - 1))[:, None, :]

    val, _ = integrate_halfline(integrand, case.quad)
    return u @ val @ u.conj().T


def rearrangement_kernel(alpha, nu):
    """``F(s_1, ..., s_p) = int f_0(u) f_1(u s_1) ... f_p(u s_p) du`` in closed form.

    Integer ``nu``: ``H_alpha(s, m)`` with ``m = |alpha|+p-1-nu``.  Non-integer
    ``nu``: only ``p = 1``, ``alpha = (0, 0)``, where
    ``F(s) = pi/sin(pi z) [1, s] x^z`` with ``z = -nu``; the divided
    difference is taken through the confluent tableau so that ``s = 1`` is
    covered by continuity.
    """
    alpha = tuple(alpha)
    p = len(alpha) - 1
    if float(nu).is_integer():
        m = int(sum(alpha) + p - 1 - nu)
        return lambda *s: funcs.h_func(alpha, s, m)
    if alpha != (0, 0):
        raise DomainError("non-integer nu is supported for alpha = (0, 0) only")
    z = -float(nu)
    if not -1.0 < z < 1.0:
        raise DomainError("non-integer nu must lie in (-1, 1)")
    fz = power(z)
    c = math.pi / math.sin(math.pi * z)
    return lambda s: c * dd_confluent([1.0, s], fz)


def rearrangement_rhs(case: RearrangementCase):
    """``A^{-1} F(Delta^(1), Delta^(1)Delta^(2), ...)(b_1 ... b_p)``."""
    sd = _positive_spectral(case)
    kernel = rearrangement_kernel(case.alpha, case.nu)
    contracted = matcalc.contract_modular(None, kernel, case.b, spectral=sd)
    u = sd.unitary
    a_inv = (u / sd.eigenvalues) @ u.conj().T
    return a_inv @ contracted


# ---------------------------------------------------------------------------
# operator substitution


def exosl_integrand(alpha, nu):
    """``f(x_0, ..., x_p) = x_0**nu prod_j (1 + x_j)**(-alpha_j-1)`` (vectorized)."""
    alpha = tuple(int(x) for x in alpha)
    if not -1.0 < nu < sum(alpha) + len(alpha) - 1:
        raise DomainError("nu outside the integrability strip")

    def f(*x):
        out = np.asarray(x[0], float) ** nu
        for xj, aj in zip(x, alpha):
            out = out * (1.0 + np.asarray(xj, float)) ** (-aj - 1)
        return out

    f.arity = len(alpha)
    return f


def joint_diagonalize(R, commute_tol=1e-10):
    """Common eigenbasis of a commuting Hermitian family.

    Returns ``(U, mu)`` with ``mu[j]`` the eigenvalues of ``R[j]`` in the
    columns of ``U``.
    """
    R = [matcalc.as_hermitian(r) for r in R]
    scale = max(1.0, max(float(np.max(np.abs(r))) for r in R))
    for i in range(len(R)):
        for j in range(i + 1, len(R)):
            if np.max(np.abs(R[i] @ R[j] - R[j] @ R[i])) > commute_tol * scale**2:
                raise PreconditionError(f"R[{i}] and R[{j}] do not commute")
    # generic combination separates joint eigenspaces
    weights = [1.0 / (1.0 + math.sqrt(2.0) * k + 0.3 * k * k) for k in range(len(R))]
    combo = sum(w * r for w, r in zip(weights, R))
    u = matcalc.eigh(combo).unitary
    mu = []
    for r in R:
        rr = u.conj().T @ r @ u
        off = rr - np.diag(np.diag(rr))
        if np.max(np.abs(off)) > 1e-8 * scale:
            raise PreconditionError("family could not be jointly diagonalized")
        mu.append(np.real(np.diag(rr)))
    return u, np.array(mu)


def _check_positive(mu):
    if np.min(mu) <= 0:
        raise DomainError("operators must be positive definite")


def operator_substitution_check(R, f, quad=DEFAULT_QUAD):
    """Both sides of ``int f(uR_0, ..., uR_n) du = R_0^{-1} G(R_0^{-1}R_1, ...)``.

    ``f`` is a vectorized callable of ``n+1`` arguments.  The left side is a
    matrix quadrature in the joint eigenbasis; the right side uses one scalar
    quadrature of ``G`` per joint eigenvalue ratio tuple and an explicit
    inverse of ``R_0``.
    """
    u, mu = joint_diagonalize(R)
    _check_positive(mu)

    def integrand(x):
        return f(*(np.outer(x, mu[j]) for j in range(len(mu))))

    diag, _ = integrate_halfline(integrand, quad)
    lhs = (u * diag) @ u.conj().T

    r0_inv = np.linalg.inv(np.asarray(R[0]))
    ratios = [np.real(np.diag(u.conj().T @ r0_inv @ np.asarray(r) @ u)) for r in R[1:]]
    g_vals = np.empty(mu.shape[1])
    cache = {}
    for i in range(mu.shape[1]):
        key = tuple(round(float(rj[i]), 14) for rj in ratios)
        if key not in cache:
            def h(x, key=key):
                return f(x, *(x * k for k in key))

            cache[key] = integrate_halfline(h, quad)[0]
        g_vals[i] = cache[key]
    rhs = r0_inv @ ((u * g_vals) @ u.conj().T)
    return lhs, rhs


def spectral_fubini_check(R, f, quad=DEFAULT_QUAD):
    """Both sides of ``int f(u, R_0, ..., R_n) du = F(R_0, ..., R_n)``.

    ``f(u, *lam)`` is vectorized in ``u``.  The left side integrates the
    matrix ``f(u, R)`` for every ``u`` on a shared partition; the right side
    integrates each joint eigenvalue tuple separately and applies the result.
    """
    u, mu = joint_diagonalize(R)

    def integrand(x):
        return np.stack([f(x, *mu[:, i]) for i in range(mu.shape[1])], axis=1)

    diag, _ = integrate_halfline(integrand, quad)
    lhs = (u * diag) @ u.conj().T
    vals = np.array([integrate_halfline(lambda x, i=i: f(x, *mu[:, i]), quad)[0]
                     for i in range(mu.shape[1])])
    rhs = (u * vals) @ u.conj().T
    return lhs, rhs
