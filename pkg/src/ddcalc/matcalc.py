"""Multi-slot functional calculus for Hermitian matrices.

For ``a = U diag(lam) U*`` and a kernel ``phi(l_0, ..., l_n)`` the contraction

    C = U [ sum phi(lam_{i0}, ..., lam_{in}) B_1[i0,i1] ... B_n[i_{n-1},i_n] ] U*,
    B_k = U* b_k U,

realizes ``phi(a^(0), ..., a^(n))`` applied to ``b_1 . ... . b_n``.  For a
product kernel ``f_0(l_0) ... f_n(l_n)`` this is ``f_0(a) b_1 f_1(a) ... b_n f_n(a)``.

Kernels are plain callables of ``n+1`` real arguments.  They are evaluated
once per distinct eigenvalue tuple; eigenvalues within the node coalescing
tolerance are snapped to a common value first, so divided-difference kernels
see exactly repeated arguments on degenerate spectra.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .ddcore import COALESCE_RTOL, dd_confluent
from .errors import DomainError, KernelSingularityError

__all__ = [
    "as_hermitian",
    "SpectralData",
    "eigh",
    "kernel_tensor",
    "contract",
    "contract_nabla",
    "contract_modular",
    "doubled_contract",
    "doubled_bruteforce",
    "matrix_function",
    "dd_kernel",
    "product_kernel",
    "nabla_to_slots",
    "fourier_gaussian_nabla",
]


def as_hermitian(a, tol=1e-12):
    """Validate a square Hermitian matrix and return it as an ndarray."""
    a = np.asarray(a)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    if not np.iscomplexobj(a):
        a = a.astype(float)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if np.max(np.abs(a - a.conj().T)) > tol * scale:
        raise DomainError("matrix is not Hermitian")
    return a


def _square(b, d):
    b = np.asarray(b)
    if b.ndim == 0:
        b = b.reshape(1, 1)
    if b.shape != (d, d):
        raise DomainError(f"operand shape {b.shape} does not match dim {d}")
    return b


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: np.ndarray
    unitary: np.ndarray

    @property
    def dim(self):
        return len(self.eigenvalues)

    def reconstruct(self):
        u = self.unitary
        return (u * self.eigenvalues) @ u.conj().T

    def snapped(self, rtol=COALESCE_RTOL):
        """Eigenvalues with near-equal runs replaced by their mean."""
        lam = np.array(self.eigenvalues, dtype=float)
        start = 0
        for i in range(1, len(lam) + 1):
            if i == len(lam) or abs(lam[i] - lam[i - 1]) > rtol * max(1.0, abs(lam[i]),
                                                                     abs(lam[i - 1])):
                lam[start:i] = lam[start:i].mean()
                start = i
        return lam


def eigh(a):
    """Eigendecomposition with ascending eigenvalues and a fixed phase convention.

    Each eigenvector is rotated so that its first entry of modulus above
    ``1e-12`` is real and positive, which makes ``U`` a deterministic
    function of ``a`` for simple spectra.
    """
    a = as_hermitian(a)
    try:
        lam, u = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ArithmeticError(f"eigendecomposition failed: {exc}") from exc
    u = u.copy()
    for j in range(u.shape[1]):
        col = u[:, j]
        k = int(np.argmax(np.abs(col) > 1e-12))
        ph = col[k] / abs(col[k])
        u[:, j] = col / ph
    if not np.iscomplexobj(a):
        u = u.real
    return SpectralData(lam, u)


def kernel_tensor(lam, kernel, arity):
    """Tensor ``phi(lam_{i0}, ..., lam_{in})`` with one evaluation per distinct tuple."""
    values, inverse = np.unique(lam, return_inverse=True)
    k = len(values)
    table = np.empty((k,) * arity, dtype=complex)
    for idx in itertools.product(range(k), repeat=arity):
        args = tuple(float(values[i]) for i in idx)
        try:
            v = complex(kernel(*args))
        except (ZeroDivisionError, OverflowError) as exc:
            raise KernelSingularityError(f"kernel failed at {args}: {exc}", args) from exc
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise KernelSingularityError(f"kernel is not finite at {args}", args)
        table[idx] = v
    if not np.any(table.imag):
        table = table.real
    return table[np.ix_(*([inverse] * arity))]


def _contract_diag(tensor, ops):
    """Chain contraction in the eigenbasis; ``ops`` are already rotated."""
    if not ops:
        return np.diag(tensor)
    x = tensor * ops[0].reshape(ops[0].shape + (1,) * (tensor.ndim - 2))
    for b in ops[1:]:
        x = np.einsum("abc...,bc->ac...", x, b)
    return x


def contract(a, kernel, bs=(), spectral=None):
    """``phi(a^(0), ..., a^(n)) (b_1 . ... . b_n)`` with ``n = len(bs)``.

    ``kernel`` is a callable of ``n+1`` real arguments.  For ``n = 0`` the
    result is the matrix function ``phi(a)``.

    Raises
    ------
    KernelSingularityError
        ``phi`` is not finite at some eigenvalue tuple (named on the error).
    """
    sd = spectral if spectral is not None else eigh(a)
    d = sd.dim
    bs = [_square(b, d) for b in bs]
    lam = sd.snapped()
    tensor = kernel_tensor(lam, kernel, len(bs) + 1)
    u = sd.unitary
    rot = [u.conj().T @ b @ u for b in bs]
    inner = _contract_diag(tensor, rot)
    return u @ inner @ u.conj().T


def matrix_function(a, f, spectral=None):
    """``f(a)`` for a vectorized scalar callable ``f``."""
    sd = spectral if spectral is not None else eigh(a)
    vals = np.asarray(f(sd.snapped()))
    u = sd.unitary
    return (u * vals) @ u.conj().T


def nabla_to_slots(kernel):
    """Slot kernel ``phi(l) = kernel(l_1 - l_0, ..., l_n - l_{n-1})``."""

    def phi(*lam):
        return kernel(*(lam[j] - lam[j - 1] for j in range(1, len(lam))))

    return phi


def contract_nabla(a, kernel, bs, spectral=None):
    """``kernel(nabla^(1), ..., nabla^(n)) (b_1 . ... . b_n)`` with ``nabla^(j) = a^(j) - a^(j-1)``."""
    return contract(a, nabla_to_slots(kernel), bs, spectral)


def contract_modular(A, kernel, bs, spectral=None):
    """``F(Delta^(1), Delta^(1)Delta^(2), ...)(b_1 . ... . b_p)`` for positive ``A``.

    Realized on ``A`` with slot kernel ``F(l_1/l_0, ..., l_p/l_0)``.
    """
    sd = spectral if spectral is not None else eigh(A)
    if np.min(sd.eigenvalues) <= 0:
        raise DomainError("contract_modular needs a positive definite matrix")

    def phi(*lam):
        return kernel(*(lj / lam[0] for lj in lam[1:]))

    return contract(A, phi, bs, sd)


def doubled_contract(a, kernel, b_pairs, x, spectral=None):
    """Doubled-slot contraction for tensor operands ``b'_k (x) b''_k`` acting on ``x``.

    ``kernel`` takes ``n+1`` arguments and is evaluated at
    ``(l_{n+1} - l_0, ..., l_{2n+1} - l_n)`` on the ``2n+2`` slots holding
    ``b'_1, ..., b'_n, x, b''_1, ..., b''_n``.
    """
    n = len(b_pairs)

    def phi(*lam):
        return kernel(*(lam[n + 1 + j] - lam[j] for j in range(n + 1)))

    ops = [bp for bp, _ in b_pairs] + [x] + [bpp for _, bpp in b_pairs]
    return contract(a, phi, ops, spectral)


def doubled_bruteforce(a, kernel, b_pairs, x):
    """Reference for :func:`doubled_contract` built in the ``dim**2`` algebra.

    ``a`` acts on the doubled space as ``-a (x) 1 + 1 (x) a``, the operands
    are ``b'_k (x) b''_k`` and the resulting superoperator ``R`` acts by
    ``x -> sum_{j,k} R[(i,k),(j,l)] x[j,k]``.
    """
    a = as_hermitian(a)
    d = a.shape[0]
    eye = np.eye(d)
    big = -np.kron(a, eye) + np.kron(eye, a)
    ops = [np.kron(bp, bpp) for bp, bpp in b_pairs]
    r = contract(big, kernel, ops).reshape(d, d, d, d)
    return np.einsum("ikjl,jk->il", r, np.asarray(x))


# ---------------------------------------------------------------------------
# kernel builders


def dd_kernel(f):
    """Slot kernel ``[l_0, ..., l_n] f`` through the confluent tableau."""

    def phi(*lam):
        return dd_confluent(lam, f)

    return phi


def product_kernel(fs):
    """Slot kernel ``f_0(l_0) ... f_n(l_n)``."""

    def phi(*lam):
        out = 1.0
        for f, v in zip(fs, lam):
            out *= f(v)
        return out

    return phi


def fourier_gaussian_nabla(a, x, half_width=30.0, points=3001):
    """``exp(-nabla_a^2)(x)`` from the Fourier representation of the Gaussian.

    ``exp(-mu^2) = (2 sqrt(pi))^{-1} int exp(-xi^2/4) exp(i xi mu) d xi``, so
    the result is a weighted average of ``exp(-i xi a) x exp(i xi a)``.
    Trapezoidal rule on ``[-half_width, half_width]``.
    """
    sd = eigh(a)
    u, lam = sd.unitary, sd.eigenvalues
    xr = u.conj().T @ np.asarray(x) @ u
    xi = np.linspace(-half_width, half_width, points)
    w = np.full(points, xi[1] - xi[0])
    w[[0, -1]] *= 0.5
    w *= np.exp(-xi**2 / 4) / (2 * math.sqrt(math.pi))
    diff = lam[None, :] - lam[:, None]
    kern = np.tensordot(w, np.exp(1j * xi[:, None, None] * diff[None]), axes=(0, 0))
    return u @ (kern * xr) @ u.conj().T
