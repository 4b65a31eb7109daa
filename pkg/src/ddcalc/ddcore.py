"""Divided differences, including repeated (confluent) nodes.

The production path is :func:`dd_confluent`: a Newton tableau over the
sorted flat node tuple.  Entries whose nodes all lie in one tight cluster are
filled from a Taylor expansion about the cluster centre,

    [u_i, ..., u_j] f = sum_k f^{(n+k)}(c)/(n+k)! * h_k(u_i - c, ..., u_j - c),

where ``h_k`` is the complete homogeneous symmetric polynomial; all other
entries use the two-term recursion.  Exactly repeated nodes are the special
case of a zero-width cluster, which seeds the tableau with ``f^{(j)}(x)/j!``.

Three further evaluations serve as independent oracles: the explicit sum
(:func:`dd_explicit`), the Genocchi-Hermite simplex integral
(:func:`dd_hermite_genocchi`) and the Cauchy integral over a circle
(:func:`dd_contour`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catalog import ScalarFunction
from .errors import CapabilityError, DomainError, GeometryError, ToleranceNotMet
from .quad import integrate_simplex

__all__ = [
    "COALESCE_RTOL",
    "NodeSystem",
    "nodes",
    "dd_recursive",
    "dd_explicit",
    "dd_confluent",
    "dd",
    "dd_hermite_genocchi",
    "dd_contour",
    "leibniz_rhs",
    "dd_function",
    "substitution_sides",
    "dd_substitute",
]

COALESCE_RTOL = 1e-8
CLUSTER_RTOL = 0.1  # nodes closer than this are expanded about a common centre
_TAYLOR_MAX_TERMS = 60


def _close(x, y, rtol):
    return abs(x - y) <= rtol * max(1.0, abs(x), abs(y))


@dataclass(frozen=True)
class NodeSystem:
    """Ordered multiset of real nodes ``x_0^{m_0}, ..., x_k^{m_k}``.

    Build instances with :meth:`from_points` or :meth:`from_entries`; both
    merge values within ``rtol`` of each other into a single entry carrying
    the summed multiplicity (placed at the first occurrence, value replaced by
    the multiplicity-weighted mean).
    """

    values: tuple
    multiplicities: tuple

    def __post_init__(self):
        if len(self.values) != len(self.multiplicities):
            raise ValueError("values and multiplicities differ in length")
        if not self.values:
            raise ValueError("empty node system")
        for v, m in zip(self.values, self.multiplicities):
            if not math.isfinite(v):
                raise DomainError(f"non-finite node {v!r}")
            if int(m) != m or m < 1:
                raise ValueError(f"multiplicity must be a positive integer, got {m!r}")

    @classmethod
    def from_entries(cls, entries, rtol=COALESCE_RTOL):
        entries = [(float(v), int(m)) for v, m in entries]
        for v, m in entries:
            if not math.isfinite(v):
                raise DomainError(f"non-finite node {v!r}")
            if m < 1:
                raise DomainError(f"multiplicity must be >= 1, got {m}")
        order = sorted(range(len(entries)), key=lambda i: entries[i][0])
        groups = []
        for i in order:
            if groups and _close(entries[groups[-1][0]][0], entries[i][0], rtol):
                groups[-1].append(i)
            else:
                groups.append([i])
        merged = []
        for grp in groups:
            mult = sum(entries[i][1] for i in grp)
            val = sum(entries[i][0] * entries[i][1] for i in grp) / mult
            if len(grp) == 1:
                val = entries[grp[0]][0]
            merged.append((min(grp), val, mult))
        merged.sort()
        return cls(tuple(v for _, v, _ in merged), tuple(m for _, _, m in merged))

    @classmethod
    def from_points(cls, points, rtol=COALESCE_RTOL):
        return cls.from_entries([(p, 1) for p in np.ravel(points)], rtol)

    @property
    def order(self):
        """n, where the flat tuple is (u_0, ..., u_n)."""
        return sum(self.multiplicities) - 1

    @property
    def max_multiplicity(self):
        return max(self.multiplicities)

    def flat(self):
        out = []
        for v, m in zip(self.values, self.multiplicities):
            out.extend([v] * m)
        return tuple(out)

    def sorted_flat(self):
        return tuple(sorted(self.flat()))

    def merge(self, other, rtol=COALESCE_RTOL):
        return NodeSystem.from_entries(
            list(zip(self.values + other.values, self.multiplicities + other.multiplicities)),
            rtol)

    def __len__(self):
        return self.order + 1


def nodes(spec, rtol=COALESCE_RTOL):
    """Coerce ``spec`` to a :class:`NodeSystem`.

    Accepts a NodeSystem, a sequence of floats (repeats allowed), or a
    sequence of ``(value, multiplicity)`` pairs.
    """
    if isinstance(spec, NodeSystem):
        return spec
    spec = list(spec)
    if spec and isinstance(spec[0], (tuple, list)):
        return NodeSystem.from_entries(spec, rtol)
    return NodeSystem.from_points(spec, rtol)


def _check(ns, f):
    f.check_domain(ns.values)
    if not f.supports(ns.max_multiplicity - 1):
        raise CapabilityError(
            f"{f.name} supplies derivatives up to order {f.max_order}; nodes need "
            f"{ns.max_multiplicity - 1}")


# ---------------------------------------------------------------------------
# production path


def _complete_homogeneous(y, kmax):
    """h_0..h_kmax of the variables y."""
    # multiply the generating series by 1/(1 - y_i t) one variable at a time
    powers = np.asarray(y, dtype=float)[:, None] ** np.arange(kmax + 1)
    h = np.zeros(kmax + 1)
    h[0] = 1.0
    for row in powers:
        h = np.convolve(h, row)[: kmax + 1]
    return h


class _Cluster:
    __slots__ = ("center", "radius", "coeffs", "ok")

    def __init__(self, center, radius):
        self.center = center
        self.radius = radius
        self.coeffs = None
        self.ok = True


_RHO_MAX = 0.25


def _rho(f, lo, hi):
    """Radius of ``[lo, hi]`` relative to the usable Taylor disc about its centre."""
    c = 0.5 * (lo + hi)
    return 0.5 * (hi - lo) / min(f.singularity_distance(c), max(1.0, abs(c)))


def _cluster_entry(f, cl, ys):
    n = len(ys) - 1
    if cl.radius == 0.0:
        if cl.coeffs is None or len(cl.coeffs) <= n:
            cl.coeffs = f.taylor(cl.center, n)
        return float(cl.coeffs[n])
    rho = _rho(f, cl.center - cl.radius, cl.center + cl.radius)
    if rho > _RHO_MAX:
        return None
    kmax = min(_TAYLOR_MAX_TERMS, int(math.ceil(-40.0 / math.log(rho))) + 2) if rho > 0 else 0
    need = n + kmax
    if not f.supports(need):
        return None
    if cl.coeffs is None or len(cl.coeffs) <= need:
        cl.coeffs = f.taylor(cl.center, need)
    h = _complete_homogeneous([y - cl.center for y in ys], kmax)
    return float(np.dot(cl.coeffs[n:need + 1], h))


def dd_confluent(ns, f: ScalarFunction, *, cluster_rtol=CLUSTER_RTOL):
    """``[x_0^{m_0}, ..., x_k^{m_k}] f`` for any node system.

    Symmetric in the nodes: the flat tuple is sorted before the tableau is
    built, so permuted inputs give bit-identical results.

    Raises
    ------
    DomainError
        A node lies outside ``f.domain``.
    CapabilityError
        ``f`` lacks the derivative orders implied by the multiplicities.
    """
    ns = nodes(ns)
    _check(ns, f)
    u = ns.sorted_flat()
    n = len(u) - 1
    if n == 0:
        return float(f(u[0]))

    # single-linkage clusters on the sorted tuple
    label = [0] * (n + 1)
    starts = [0]
    for i in range(1, n + 1):
        if _close(u[i - 1], u[i], cluster_rtol):
            label[i] = label[i - 1]
        else:
            label[i] = label[i - 1] + 1
            starts.append(i)
    starts.append(n + 1)
    # merge neighbouring clusters while one Taylor expansion still covers them;
    # divided differences across small gaps lose digits in the tableau
    bounds = [[starts[c], starts[c + 1]] for c in range(len(starts) - 1)]
    merged = [bounds[0]]
    for lo, hi in bounds[1:]:
        first = merged[-1][0]
        if _rho(f, u[first], u[hi - 1]) <= _RHO_MAX:
            merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    clusters = []
    for c, (lo, hi) in enumerate(merged):
        for i in range(lo, hi):
            label[i] = c
        clusters.append(_Cluster(0.5 * (u[lo] + u[hi - 1]), 0.5 * (u[hi - 1] - u[lo])))

    vals = np.asarray(f(np.array(u)), dtype=float)
    col = [float(v) for v in vals]  # entries [u_i .. u_{i+j}] for current j
    for j in range(1, n + 1):
        new = []
        for i in range(n + 1 - j):
            lab = label[i]
            entry = None
            if lab == label[i + j]:
                entry = _cluster_entry(f, clusters[lab], u[i:i + j + 1])
            if entry is None:
                if u[i + j] == u[i]:
                    if not f.supports(j):
                        raise CapabilityError(f"{f.name} lacks derivative order {j}")
                    entry = float(f.taylor(u[i], j)[j])
                else:
                    entry = (col[i + 1] - col[i]) / (u[i + j] - u[i])
            new.append(entry)
        col = new
    return col[0]


dd = dd_confluent


# ---------------------------------------------------------------------------
# reference evaluations


def dd_recursive(ns, f: ScalarFunction):
    """Two-term recursion for pairwise distinct nodes."""
    ns = nodes(ns)
    if ns.max_multiplicity > 1:
        raise DomainError("dd_recursive needs pairwise distinct nodes; use dd_confluent")
    f.check_domain(ns.values)
    x = sorted(ns.values)
    col = [float(v) for v in np.asarray(f(np.array(x)), dtype=float)]
    n = len(x) - 1
    for j in range(1, n + 1):
        col = [(col[i + 1] - col[i]) / (x[i + j] - x[i]) for i in range(n + 1 - j)]
    return col[0]


def dd_explicit(ns, f: ScalarFunction):
    """``sum_k f(x_k) / prod_{j != k} (x_k - x_j)`` -- test oracle only.

    Loses accuracy for clustered nodes; never used on the production path.
    """
    ns = nodes(ns)
    if ns.max_multiplicity > 1:
        raise DomainError("dd_explicit needs pairwise distinct nodes")
    f.check_domain(ns.values)
    x = np.array(ns.values)
    total = 0.0
    for k in range(len(x)):
        others = np.delete(x, k)
        total += float(f(x[k])) / float(np.prod(x[k] - others))
    return total


def dd_hermite_genocchi(ns, f: ScalarFunction, tol=1e-10):
    """Genocchi-Hermite integral of ``f^{(n)}`` over the ordered simplex.

    Valid for repeated nodes as well; uses only vectorized derivatives of
    ``f``, so it is independent of the tableau.
    """
    ns = nodes(ns)
    f.check_domain(ns.values)
    u = np.array(ns.flat())
    n = len(u) - 1
    if not f.supports(n):
        raise CapabilityError(f"{f.name} lacks derivative order {n}")
    if n == 0:
        return float(f(u[0]))

    def integrand(t):
        # barycentric weights (1-t_1, t_1-t_2, ..., t_n)
        ext = np.hstack([np.ones((len(t), 1)), t, np.zeros((len(t), 1))])
        w = ext[:, :-1] - ext[:, 1:]
        return f.deriv(n, w @ u)

    val, _ = integrate_simplex(integrand, n, tol=tol)
    return float(val)


def _auto_circle(f, lo, hi):
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    avail = f.singularity_distance(center)
    if math.isinf(avail):
        return center, max(2.0 * half, half + 1.0)
    if avail <= half:
        raise GeometryError(f"no circle around the nodes avoids the singularities of {f.name}")
    radius = math.sqrt(half * avail) if half > 0 else 0.5 * avail
    return center, radius


def dd_contour(ns, f: ScalarFunction, center=None, radius=None, points=None,
               rtol=1e-15, max_points=2**14):
    """``(1/2 pi i) \\oint f(z) / prod_j (z - x_j) dz`` on a circle, trapezoidal rule.

    ``center``/``radius`` default to a circle balancing the distance to the
    nodes against the distance to the nearest singularity of ``f``.  With
    ``points=None`` the number of points is doubled from 64 until two
    successive values agree to ``rtol``.

    Raises
    ------
    GeometryError
        The circle passes within tolerance of a node, fails to enclose one,
        or encloses/touches a singularity or branch cut of ``f``.
    """
    ns = nodes(ns)
    f.check_domain(ns.values)
    u = np.array(ns.flat())
    lo_n, hi_n = float(u.min()), float(u.max())
    if center is None or radius is None:
        c0, r0 = _auto_circle(f, lo_n, hi_n)
        center = c0 if center is None else center
        radius = r0 if radius is None else radius
    center, radius = float(center), float(radius)
    gap = 1e-9 * max(1.0, radius)
    if np.any(np.abs(u - center) >= radius - gap):
        raise GeometryError("contour must strictly enclose every node")
    if f.singularity_distance(center) <= radius + gap:
        raise GeometryError(f"contour touches or encloses a singularity of {f.name}")

    def trap(N):
        theta = 2.0 * np.pi * np.arange(N) / N
        e = np.exp(1j * theta)
        z = center + radius * e
        denom = np.prod(z[:, None] - u[None, :], axis=1)
        terms = f.complex_value(z) * radius * e / denom
        return complex(np.mean(terms)), float(np.mean(np.abs(terms)))

    if points is not None:
        return trap(int(points))[0].real
    N = 64
    prev, _ = trap(N)
    while N < max_points:
        N *= 2
        cur, size = trap(N)
        # the sum cancels heavily when nodes sit close to the circle, so
        # roundoff in the terms sets a floor on attainable agreement
        if abs(cur - prev) <= max(rtol * max(1.0, abs(cur)), 64 * np.finfo(float).eps * size):
            return cur.real
        prev = cur
    raise ToleranceNotMet("contour rule did not settle", estimate=prev.real,
                          error=abs(cur - prev))


# ---------------------------------------------------------------------------
# rules


def leibniz_rhs(ns, f: ScalarFunction, g: ScalarFunction):
    """``sum_j [x_0..x_j] f * [x_j..x_n] g`` over the flat tuple (in given order)."""
    u = nodes(ns).flat()
    total = 0.0
    for j in range(len(u)):
        total += dd_confluent(u[: j + 1], f) * dd_confluent(u[j:], g)
    return total


def _empty(prefix):
    return prefix is None or (not isinstance(prefix, NodeSystem) and len(prefix) == 0)


def dd_function(prefix, f: ScalarFunction):
    """The function ``g(x) = [y_0, ..., y_p, x] f`` as a :class:`ScalarFunction`.

    Its normalized derivatives are again divided differences:
    ``g^{(k)}(x)/k! = [y_0, ..., y_p, x^{k+1}] f``.
    """
    pre = None if _empty(prefix) else nodes(prefix)
    pre_entries = [] if pre is None else list(zip(pre.values, pre.multiplicities))

    def at(x, mult):
        return dd_confluent(NodeSystem.from_entries(pre_entries + [(x, mult)]), f)

    def value(x):
        xs = np.asarray(x, dtype=float)
        out = np.array([at(float(t), 1) for t in xs.ravel()]).reshape(xs.shape)
        return out if out.ndim else float(out)

    def taylor(c, order):
        return np.array([at(c, k + 1) for k in range(order + 1)])

    label = ",".join(f"{v:g}^{m}" for v, m in pre_entries)
    order = None if f.max_order is None else f.max_order - (0 if pre is None else pre.order + 1)
    return ScalarFunction(f"[{label},x]{f.name}", value, taylor=taylor,
                          domain=f.domain, max_order=order, singularities=f.singularities)


def substitution_sides(prefix, ns, f: ScalarFunction):
    """Both sides of the substitution rule: (nested, merged)."""
    ns = nodes(ns)
    if _empty(prefix):
        v = dd_confluent(ns, f)
        return v, v
    pre = nodes(prefix)
    nested = dd_confluent(ns, dd_function(pre, f))
    merged = dd_confluent(pre.merge(ns), f)
    return nested, merged


def dd_substitute(prefix, ns, f: ScalarFunction):
    """``[x_0..x_q] g`` with ``g(x) = [y_0..y_p, x] f``, returned in merged form."""
    return substitution_sides(prefix, ns, f)[1]
