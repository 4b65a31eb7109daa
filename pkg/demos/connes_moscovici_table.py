"""The five two-variable functions of the modular curvature computation.

Run with ``python demos/connes_moscovici_table.py``.

Each function is evaluated as a confluent divided difference of ``x^m log x``
and compared with its hand-derived closed form.  The closed forms divide by
powers of ``a - b``, so the second block moves toward the diagonal to show
where they lose digits and the divided-difference route does not.
"""

from ddcalc import funcs

grid = [(0.5, 1.5), (1.5, 2.0), (2.0, 3.0), (3.0, 0.5)]
print(f"{'function':<16}{'a':>5}{'b':>5}{'divided difference':>24}{'delta':>10}")
for key in funcs.HCM_CLOSED_FORMS:
    for a, b in grid:
        v = funcs.hcm(*key, a, b)
        c = funcs.hcm_closed_form(*key, a, b)
        print(f"H^CM_{key!s:<11}{a:>5}{b:>5}{v:>24.16g}{abs(v - c):>10.1e}")

print("\napproaching a = b = 2 for H^CM_(3,1,1)")
for k in range(1, 8, 2):
    b = 2.0 + 10.0**-k
    v = funcs.hcm(3, 1, 1, 2.0, b)
    c = funcs.hcm_closed_form(3, 1, 1, 2.0, b)
    print(f"  b=2+1e-{k}  dd {v:.15f}  closed form {c:.15f}")
