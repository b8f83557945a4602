"""
The matrix sign function and spectral projectors
================================================

Newton's iteration X <- (X + X^-1)/2 drives every eigenvalue to +1 or -1.
The two spectral projectors fall out as (I +- S)/2 and split the space
into the invariant subspaces above and below zero.
"""

import numpy as np

from hermeig import NATIVE, projectors_from_sign, sgn
from hermeig.generate import fermi_gapped
from hermeig.oracle import sgn_reference
from hermeig.signfn import _newton_iterations

# scalar picture first: watch the Newton sequence converge
x = np.array([[0.05 + 0j]])
print("Newton iterates of the scalar 0.05:")
for k in range(8):
    x, _ = _newton_iterations(x, 1, NATIVE, None)
    print(f"  step {k + 1}: {x[0, 0].real:+.10f}")

# a Hermitian matrix with eigenvalues on both sides of zero
a, spectrum = fermi_gapped(12, seed=5, k=6, gap=0.4)
res = sgn(a, delta=1e-8, eps_pseudo=0.01, gap_estimate=0.01)
err = np.linalg.norm(res.s.to_array() - sgn_reference(a), 2)
print(f"\nmatrix sign of a 12x12 Hermitian matrix: {res.iterations_run} iterations, "
      f"error {err:.2e}")

p_plus, p_minus = projectors_from_sign(res.s)
pp = p_plus.to_array()
print(f"projector rank estimates: trace(P+) = {np.trace(pp).real:.6f}, "
      f"trace(P-) = {np.trace(p_minus.to_array()).real:.6f}")
print(f"idempotency defect of P+: {np.linalg.norm(pp @ pp - pp, 2):.2e}")
total = pp + p_minus.to_array()
print(f"P+ + P- recovers the identity exactly: {np.array_equal(total, np.eye(12).astype(complex))}")
