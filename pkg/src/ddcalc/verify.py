"""Seeded fuzz suites comparing independent evaluations of the same quantity.

Each suite returns a list of check records::

    {"case": int, "check": str, "inputs": {...}, "lhs": x, "rhs": y,
     "delta": float, "tol": float, "passed": bool}

Scalar sides are stored as floats; matrix sides are summarized by their
largest entry modulus and ``delta`` is the largest entry difference (scaled
as documented per check).
"""

from __future__ import annotations

import math
import time

import numpy as np

from . import catalog, ddcore, expand, funcs, matcalc, rearrange
from .errors import DDCalcError
from .quad import QuadratureSpec, integrate_halfline

__all__ = [
    "SUITES",
    "random_hermitian",
    "random_unitary",
    "random_rearrangement_case",
    "random_even_function",
    "run_suite",
    "run",
]


# ---------------------------------------------------------------------------
# generators


def random_unitary(rng, d):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, d, scale=1.0, degenerate=False):
    """Random Hermitian matrix; ``degenerate`` forces a repeated eigenvalue."""
    if degenerate and d > 1:
        lam = rng.uniform(-scale, scale, d)
        lam[1] = lam[0]
        u = random_unitary(rng, d)
        h = (u * lam) @ u.conj().T
        return 0.5 * (h + h.conj().T)
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = 0.5 * (z + z.conj().T)
    return scale * h / max(1.0, np.linalg.norm(h, 2))


def _random_alpha(rng, p, max_order):
    while True:
        alpha = tuple(int(v) for v in rng.integers(0, max_order + 1, p + 1))
        if sum(alpha) <= max_order:
            return alpha


def random_rearrangement_case(rng, max_dim=4, max_p=3, max_order=2):
    d = int(rng.integers(1, max_dim + 1))
    p = int(rng.integers(1, max_p + 1))
    alpha = _random_alpha(rng, p, max_order)
    nu = int(rng.integers(0, sum(alpha) + p))
    a = random_hermitian(rng, d, 1.5, degenerate=rng.random() < 0.25)
    b = [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for _ in range(p)]
    return rearrange.RearrangementCase(alpha, nu, a, b)


def random_even_function(rng):
    """An even catalog function drawn from a few parametric families."""
    kind = int(rng.integers(0, 4))
    c = float(rng.uniform(0.3, 1.5))
    if kind == 0:
        return catalog.cosh_fn(c)
    if kind == 1:
        return catalog.gaussian().rescaled(c)
    if kind == 2:
        coeffs = np.zeros(7)
        coeffs[::2] = rng.normal(size=4)
        return catalog.poly(coeffs)
    # u/(e^u - 1) + u/2 is the even part of the Bernoulli generating function
    return (catalog.bernoulli_fn() + catalog.poly([0.0, 0.5])).rescaled(c)


# ---------------------------------------------------------------------------
# record helpers


def _num(v):
    v = complex(v)
    return v.real if abs(v.imag) <= 1e-14 * max(1.0, abs(v.real)) else [v.real, v.imag]


def _scalar(case, check, inputs, lhs, rhs, tol, relative=True):
    scale = max(1.0, abs(complex(rhs))) if relative else 1.0
    delta = abs(complex(lhs) - complex(rhs)) / scale
    return {"case": case, "check": check, "inputs": inputs, "lhs": _num(lhs),
            "rhs": _num(rhs), "delta": float(delta), "tol": tol, "passed": bool(delta <= tol)}


def _matrix(case, check, inputs, lhs, rhs, tol, relative=True):
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    big = float(np.max(np.abs(rhs)))
    scale = 1.0 + big if relative else 1.0
    delta = float(np.max(np.abs(lhs - rhs))) / scale
    return {"case": case, "check": check, "inputs": inputs,
            "lhs": float(np.max(np.abs(lhs))), "rhs": big, "delta": delta, "tol": tol,
            "passed": bool(delta <= tol)}


def _failure(case, check, inputs, exc):
    return {"case": case, "check": check, "inputs": inputs, "lhs": None, "rhs": None,
            "delta": None, "tol": None, "passed": False,
            "error": f"{type(exc).__name__}: {exc}"}


def _r(x):
    return [round(float(v), 15) for v in np.ravel(x)]


# ---------------------------------------------------------------------------
# suites

_DD_FUNCS = ("exp", "log", "idmlog:1", "idmlog:2")


def suite_ddcore(rng, cases, dim):
    out = []
    for i in range(cases):
        name = _DD_FUNCS[int(rng.integers(len(_DD_FUNCS)))]
        f = catalog.by_name(name)
        n = int(rng.integers(1, 6))
        x = rng.uniform(0.5, 4.0, n + 1)
        if rng.random() < 0.4:
            x[int(rng.integers(1, n + 1))] = x[0]
        inputs = {"f": name, "nodes": _r(x)}
        v = ddcore.dd_confluent(x, f)
        out.append(_scalar(i, "contour", inputs, v, ddcore.dd_contour(x, f), 1e-10))
        out.append(_scalar(i, "hermite_genocchi", inputs, v,
                           ddcore.dd_hermite_genocchi(x, f, tol=1e-11), 1e-8))
        perm = rng.permutation(x)
        out.append(_scalar(i, "permutation", inputs, ddcore.dd_confluent(perm, f), v, 0.0))
    return out


def suite_funcs(rng, cases, dim):
    out = []
    for i in range(cases):
        p = int(rng.integers(1, 4))
        alpha = _random_alpha(rng, p, 3)
        m = int(rng.integers(0, sum(alpha) + p))
        s = rng.uniform(0.3, 4.0, p)
        inputs = {"alpha": list(alpha), "s": _r(s), "m": m}
        h = funcs.h_func(alpha, s, m)
        out.append(_scalar(i, "h_vs_quadrature", inputs, h, funcs.h_integral(alpha, s, m)[0],
                           1e-6))
        s_full = rng.uniform(0.3, 4.0, p + 1)
        mv = funcs.m_func(alpha, s_full, m)
        out.append(_scalar(i, "m_vs_quadrature_b", {**inputs, "s": _r(s_full)}, mv,
                           funcs.m_integral(alpha, s_full, m, form="b")[0], 1e-6))
        lam = (0.5, 2.0)[i % 2]
        hom = lam ** (-sum(alpha) - p + m) * mv
        out.append(_scalar(i, "homogeneity", {**inputs, "lambda": lam},
                           funcs.m_func(alpha, lam * s_full, m), hom, 1e-10))
        if p <= 2:
            tail = sum(alpha[1:])
            me = int(rng.integers(0, tail + p))
            e_in = {"alpha": list(alpha), "s": _r(s), "m": me}
            out.append(_scalar(i, "euler_operator", e_in, funcs.euler_operator_form(alpha, s, me),
                               funcs.h_func(alpha, s, me), 1e-5))
        key = list(funcs.HCM_CLOSED_FORMS)[i % 5]
        while True:
            a, b = rng.uniform(0.3, 4.0, 2)
            if min(abs(a - 1), abs(b - 1), abs(a - b)) > 0.2:
                break
        out.append(_scalar(i, "hcm_closed_form", {"indices": list(key), "a": float(a),
                                                  "b": float(b)},
                           funcs.hcm(*key, a, b), funcs.hcm_closed_form(*key, a, b), 1e-10))
        z = float(rng.uniform(0.1, 0.9))
        mm = int(rng.integers(0, 4))
        quad_val = integrate_halfline(lambda x: x ** (z - 1) * (1 + x) ** (-mm - 1),
                                      QuadratureSpec(tolerance=1e-13, rel_tolerance=1e-12))[0]
        out.append(_scalar(i, "mellin", {"z": z, "m": mm}, funcs.mellin_basic(z, mm),
                           quad_val, 1e-8))
    return out


def suite_rearrangement(rng, cases, dim):
    out = []
    for i in range(cases):
        case = random_rearrangement_case(rng, max_dim=max(1, min(dim, 4)))
        inputs = {"alpha": list(case.alpha), "nu": case.nu, "dim": case.a.shape[0],
                  "eigenvalues": _r(np.linalg.eigvalsh(case.a))}
        try:
            out.append(_matrix(i, "rearrangement", inputs, rearrange.rearrangement_lhs(case),
                               rearrange.rearrangement_rhs(case), 1e-6))
        except DDCalcError as exc:
            out.append(_failure(i, "rearrangement", inputs, exc))
    return out


def _commuting_family(rng, d, n):
    u = random_unitary(rng, d)
    return [(u * rng.uniform(0.3, 3.0, d)) @ u.conj().T for _ in range(n + 1)]


def suite_substitution(rng, cases, dim):
    out = []
    for i in range(cases):
        d = int(rng.integers(1, max(1, min(dim, 4)) + 1))
        n = int(rng.integers(0, 3))
        R = _commuting_family(rng, d, n)
        alpha = _random_alpha(rng, n, 2) if n else (int(rng.integers(0, 3)),)
        hi = sum(alpha) + len(alpha) - 1  # integrability needs -1 < nu < hi
        nu = float(rng.uniform(-0.5, hi - 0.5)) if hi > 0 else -0.5
        f = rearrange.exosl_integrand(alpha, nu)
        inputs = {"dim": d, "n": n, "alpha": list(alpha), "nu": nu}
        try:
            lhs, rhs = rearrange.operator_substitution_check(R, f)
            out.append(_matrix(i, "operator_substitution", inputs, lhs, rhs, 1e-8, False))
            g = lambda u_, *lam: f(*(u_ * np.asarray(lv) for lv in lam))  # noqa: E731
            lhs, rhs = rearrange.spectral_fubini_check(R, g)
            out.append(_matrix(i, "spectral_fubini", inputs, lhs, rhs, 1e-8, False))
        except DDCalcError as exc:
            out.append(_failure(i, "operator_substitution", inputs, exc))
    return out


def suite_expansion(rng, cases, dim):
    out = []
    for i in range(cases):
        d = int(rng.integers(1, max(1, min(dim, 5)) + 1))
        a = random_hermitian(rng, d, 1.0, degenerate=rng.random() < 0.25)
        b = random_hermitian(rng, d, 1.0)
        b = 0.5 * b / max(np.linalg.norm(b, 2), 1e-300)
        inputs = {"dim": d, "a_eigenvalues": _r(np.linalg.eigvalsh(a))}
        sd = matcalc.eigh(a)
        for n in range(3):
            t1 = expand.exp_expansion_term(a, b, n, sd)
            t2 = expand.exp_expansion_variant_nabla(a, b, n, sd)
            out.append(_matrix(i, f"nabla_form_n{n}", inputs, t2, t1, 1e-7))
            t3 = expand.exp_expansion_simplex(a, b, n)
            out.append(_matrix(i, f"simplex_n{n}", inputs, t3, t1, 1e-7))
        r_full = expand.exp_expansion(a, b, 4).remainders[-1]
        r_half = expand.exp_expansion(a, 0.5 * b, 4).remainders[-1]
        ratio = r_full / r_half
        out.append(_scalar(i, "remainder_scaling", inputs, ratio / 32.0, 1.0, 0.25, False))
        bound = 0.5**5 * math.exp(np.linalg.norm(a, 2) + 0.5) / math.factorial(5) * d
        out.append(_scalar(i, "remainder_bound", inputs, max(r_full - bound, 0.0), 0.0, 0.0,
                           False))
    return out


def _fd_nabla_trace(a, b, x, y, f, h=1e-4):
    d = a.shape[0]

    def val(eps):
        return np.trace(expand.nabla_direct(a + eps * b, x, f) @ y) / d

    return (val(h) - val(-h)) / (2 * h)


def suite_nabla(rng, cases, dim):
    out = []
    g = catalog.gaussian()
    for i in range(cases):
        d = int(rng.integers(2, max(2, min(dim, 4)) + 1))
        a = random_hermitian(rng, d, 1.0, degenerate=rng.random() < 0.25)
        b, x, y = (random_hermitian(rng, d, 1.0) for _ in range(3))
        inputs = {"dim": d, "a_eigenvalues": _r(np.linalg.eigvalsh(a))}
        # a scalar a makes the cubic coefficient vanish for even f, so the
        # order check uses a generic spectrum
        a_gen = random_hermitian(rng, d, 1.0)
        errs = []
        for eps in (1e-2, 5e-3):
            direct = expand.nabla_direct(a_gen + eps * b, x, g)
            approx = expand.nabla_expansion_order2(a_gen, eps * b, x, g)
            errs.append(np.max(np.abs(direct - approx)))
        slope = math.log(errs[0] / errs[1]) / math.log(2.0)
        out.append(_scalar(i, "nabla_cubic_remainder", inputs, slope / 3.0, 1.0, 0.25, False))
        lhs, rhs = expand.trace_derivative_identity(a, b, x, y, g)
        out.append(_scalar(i, "trace_identity", inputs, lhs, rhs, 1e-10))
        out.append(_scalar(i, "trace_identity_fd", inputs, _fd_nabla_trace(a, b, x, y, g), lhs,
                           1e-6))
        h = 1e-4
        fd = (matcalc.matrix_function(a + h * b, g) - matcalc.matrix_function(a - h * b, g)) / (
            2 * h)
        out.append(_matrix(i, "daleckii_krein_fd", inputs, expand.taylor_term(a, b, g, 1), fd,
                           1e-6))
        n = 1 + i % 2
        d3 = min(d, 3)
        a3 = a[:d3, :d3]
        pairs = [(random_hermitian(rng, d3), random_hermitian(rng, d3)) for _ in range(n)]
        x3 = rng.normal(size=(d3, d3))
        kern = matcalc.dd_kernel(g)
        out.append(_matrix(i, f"doubled_algebra_n{n}", inputs,
                           matcalc.doubled_contract(a3, kern, pairs, x3),
                           matcalc.doubled_bruteforce(a3, kern, pairs, x3), 1e-10))
    return out


def suite_identities(rng, cases, dim):
    out = []
    pool = ("exp", "log", "idmlog:1", "idmlog:2", "gaussian")
    for i in range(cases):
        K = random_even_function(rng)
        while True:
            a, b = rng.uniform(-2.5, 2.5, 2)
            if min(abs(a), abs(b), abs(a + b)) > 0.2:
                break
        lhs, rhs = funcs.k_identity_pair(K, a, b)
        out.append(_scalar(i, "even_k", {"K": K.name, "a": float(a), "b": float(b)}, lhs, rhs,
                           1e-12))
        names = [pool[int(j)] for j in rng.integers(0, len(pool), 2)]
        f, g = (catalog.by_name(nm) for nm in names)
        n = int(rng.integers(0, 5))
        x = rng.uniform(0.5, 3.0, n + 1)
        if n and rng.random() < 0.4:
            x[-1] = x[0]
        inputs = {"f": names[0], "g": names[1], "nodes": _r(x)}
        out.append(_scalar(i, "leibniz", inputs, ddcore.leibniz_rhs(x, f, g),
                           ddcore.dd_confluent(x, f * g), 1e-11))
        name = pool[int(rng.integers(len(pool)))]
        f = catalog.by_name(name)
        y = rng.uniform(0.5, 3.0, int(rng.integers(1, 3)))
        xs = rng.uniform(0.5, 3.0, int(rng.integers(1, 3)))
        nested, merged = ddcore.substitution_sides(y, xs, f)
        out.append(_scalar(i, "substitution", {"f": name, "prefix": _r(y), "nodes": _r(xs)},
                           nested, merged, 1e-11))
    return out


SUITES = {
    "ddcore": suite_ddcore,
    "funcs": suite_funcs,
    "rearrangement": suite_rearrangement,
    "substitution": suite_substitution,
    "expansion": suite_expansion,
    "nabla": suite_nabla,
    "identities": suite_identities,
}


def run_suite(name, seed=0, cases=20, dim=3):
    """Run one suite with a generator derived from ``(seed, suite index)``."""
    index = list(SUITES).index(name)
    rng = np.random.default_rng([int(seed) & (2**64 - 1), index])
    return SUITES[name](rng, int(cases), int(dim))


def run(suite="all", seed=0, cases=20, dim=3, timings=False):
    """Run one suite or all of them; returns the report dictionary."""
    names = list(SUITES) if suite == "all" else [suite]
    if any(nm not in SUITES for nm in names):
        raise ValueError(f"unknown suite {suite!r}")
    report = {"schema": 1, "suite": suite, "seed": int(seed), "cases": int(cases),
              "dim": int(dim), "suites": {}}
    all_pass = True
    for nm in names:
        t0 = time.perf_counter()
        records = run_suite(nm, seed, cases, dim)
        passed = all(r["passed"] for r in records)
        deltas = [r["delta"] for r in records if r["delta"] is not None]
        entry = {"passed": passed, "checks": len(records),
                 "failures": sum(not r["passed"] for r in records),
                 "max_delta": max(deltas) if deltas else None, "records": records}
        if timings:
            entry["seconds"] = round(time.perf_counter() - t0, 3)
        report["suites"][nm] = entry
        all_pass &= passed
    report["status"] = "pass" if all_pass else "fail"
    return report
