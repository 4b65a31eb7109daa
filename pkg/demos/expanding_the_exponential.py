"""Expanding exp(a + b) in powers of a non-commuting perturbation.

Run with ``python demos/expanding_the_exponential.py``.

Term ``n`` contracts ``n`` copies of ``b`` against the divided difference of
``exp`` at ``n + 1`` eigenvalues of ``a``.  Halving ``b`` should shrink the
order-N remainder by about ``2^-(N+1)``.
"""

import numpy as np

from ddcalc import expand
from ddcalc.verify import random_hermitian

rng = np.random.default_rng(7)
a = random_hermitian(rng, 4)
b = random_hermitian(rng, 4)
b *= 0.5 / np.linalg.norm(b, 2)

rep = expand.exp_expansion(a, b, 5)
for n, r in enumerate(rep.remainders):
    print(f"order {n}: remainder {r:.3e}")

half = expand.exp_expansion(a, b / 2, 4).remainders[-1]
print(f"\nratio after halving b at order 4: {half / rep.remainders[4]:.4f}"
      f" (target {2.0**-5:.4f})")

slot = expand.exp_expansion_term(a, b, 2)
simplex = expand.exp_expansion_simplex(a, b, 2)
print(f"second term, eigenvalue kernel vs simplex integral: {np.max(np.abs(slot - simplex)):.1e}")
