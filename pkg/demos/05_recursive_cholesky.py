"""
Recursive Cholesky and its precision threshold
==============================================

The factorization recurses on the leading block and the Schur complement,
using only the contracted multiply and inverse.  At native precision the
backward error sits at rounding level; at a coarse emulated width on an
ill-conditioned matrix, positive-definiteness is eventually lost and the
algorithm reports a breakdown instead of returning garbage.
"""

import numpy as np

from hermeig import PrecisionBudget, chol
from hermeig.errors import BreakdownError
from hermeig.generate import hpd

def rel_residual(res, m):
    larr = res.l.to_array()
    marr = m.to_array()
    return np.linalg.norm(larr @ larr.conj().T - marr, 2) / np.linalg.norm(marr, 2)

# native precision, moderately conditioned
m = hpd(64, seed=1, kappa_target=1e3)
res = chol(m)
print(f"n=64, kappa about 1e3, native precision:")
print(f"  relative backward error {rel_residual(res, m):.2e}, "
      f"recursion depth {res.recursion_depth}")

# sweep the mantissa width on a harder instance
m = hpd(16, seed=2, kappa_target=1e4)
print("\nn=16, kappa about 1e4, shrinking mantissa:")
for bits in (53, 32, 24, 16, 12, 10):
    budget = PrecisionBudget.emulated(bits) if bits < 53 else None
    try:
        res = chol(m, budget) if budget else chol(m)
        print(f"  {bits:2d} bits: residual {rel_residual(res, m):.2e}")
    except BreakdownError as exc:
        print(f"  {bits:2d} bits: breakdown ({exc})")
