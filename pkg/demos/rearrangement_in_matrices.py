"""The rearrangement identity checked on random matrices.

Run with ``python demos/rearrangement_in_matrices.py``.

The left side is a matrix-valued integral over the half-line, computed by
adaptive quadrature.  The right side needs no quadrature: it contracts the
operands against a closed-form kernel evaluated at eigenvalue ratios of
``A = exp(a)``.  Both sides are printed with their largest entrywise gap.
"""

import numpy as np

from ddcalc.rearrange import RearrangementCase, rearrangement_lhs, rearrangement_rhs
from ddcalc.verify import random_hermitian

rng = np.random.default_rng(2024)
for alpha, nu in [((0, 0), 0), ((1, 0, 1), 1), ((0, 1, 0, 1), 2), ((0, 0), 0.4)]:
    p = len(alpha) - 1
    a = random_hermitian(rng, 3)
    bs = [rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(p)]
    case = RearrangementCase(alpha, nu, a, bs)
    lhs, rhs = rearrangement_lhs(case), rearrangement_rhs(case)
    gap = np.max(np.abs(lhs - rhs))
    print(f"alpha={alpha!s:<13} nu={nu:<4} |rhs|max={np.max(np.abs(rhs)):.3f}  gap={gap:.1e}")
