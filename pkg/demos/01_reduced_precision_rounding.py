"""
Working at a reduced mantissa width
===================================

Every algorithm in the library can run at an emulated mantissa width where
each scalar operation rounds to a chosen number of significand bits.  This
script rounds a few familiar constants, shows that rounding is idempotent,
and watches a dot product drift as the width shrinks.
"""

import numpy as np

from hermeig import PrecisionBudget, round_to
from hermeig.fparith import fl_add, fl_mul, round_array

# rounding single values: one third has no finite binary expansion
for bits in (4, 8, 12, 24):
    b = PrecisionBudget.emulated(bits)
    r = round_to(1.0 / 3.0, b)
    print(f"{bits:2d} bits: 1/3 -> {r!r}   (error {abs(r - 1/3):.2e})")

# rounding is idempotent: a representable value stays put
b8 = PrecisionBudget.emulated(8)
v = round_to(np.pi, b8)
assert round_to(v, b8) == v
print(f"\npi at 8 bits: {v!r}, rounding it again changes nothing")

# a dot product computed with one rounding per scalar operation
rng = np.random.default_rng(0)
x = rng.standard_normal(64)
y = rng.standard_normal(64)
exact = float(x @ y)

print("\ndot product of two length-64 vectors, one rounding per operation:")
for bits in (6, 10, 16, 24, 53):
    b = PrecisionBudget.emulated(bits)
    xr = round_array(x, b)
    yr = round_array(y, b)
    acc = np.asarray(0.0)
    for i in range(64):
        acc = fl_add(acc, fl_mul(xr[i], yr[i], b), b)
    print(f"{bits:2d} bits: {float(acc):+.10f}   error {abs(float(acc) - exact):.2e}")
print(f"exact:   {exact:+.10f}")
