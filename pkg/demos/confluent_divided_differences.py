"""Divided differences with repeated nodes, three ways.

Run with ``python demos/confluent_divided_differences.py``.

The tableau route is the workhorse.  The simplex integral and the contour
integral are independent and slower, so they serve as oracles.  The last
block walks a pair of nodes together and shows the quotient settling onto
the derivative without a jump.
"""

import math

from ddcalc import catalog, ddcore

log = catalog.log_fn()
nodes = [(0.7, 1), (1.1, 3), (2.3, 1)]

tableau = ddcore.dd_confluent(nodes, log)
simplex = ddcore.dd_hermite_genocchi(nodes, log)
contour = ddcore.dd_contour(nodes, log)
print(f"tableau  {tableau:.17g}")
print(f"simplex  {simplex:.17g}   delta {abs(simplex - tableau):.1e}")
print(f"contour  {contour:.17g}   delta {abs(contour - tableau):.1e}")

print("\nnear-confluent pair [1, 1+eps, 2] log versus the limit log 2 - 1")
limit = math.log(2) - 1
for k in range(1, 11, 3):
    eps = 10.0**-k
    v = ddcore.dd_confluent([1.0, 1.0 + eps, 2.0], log)
    print(f"  eps=1e-{k:<2d} value {v:.16f}  gap {abs(v - limit):.1e}")
