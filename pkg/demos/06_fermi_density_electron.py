"""
Fermi level, density matrix, and electron density
=================================================

A tight-binding chain with half filling: locate the Fermi level between
the highest occupied and lowest unoccupied states, build the density
matrix through the sign function, and query the electron density at a few
points of a synthetic basis.
"""

import numpy as np

from hermeig import density, electron_density_batch, fermi
from hermeig.generate import tight_binding_chain, tight_binding_spectrum
from hermeig.matcore import Mat
from hermeig.oracle import density_reference

n, k = 12, 6
h = tight_binding_chain(n)
spectrum = tight_binding_spectrum(n)
print(f"chain of {n} sites, {k} occupied states")
print(f"exact spectrum: {np.array2string(spectrum, precision=4)}")

fr = fermi(h, eps=0.01, k=k, seed=0)
true_mu = (spectrum[k - 1] + spectrum[k]) / 2
true_gap = spectrum[k] - spectrum[k - 1]
print(f"\nFermi level: {fr.mu:+.6f} (true {true_mu:+.6f})")
print(f"Fermi gap:   {fr.gap:.6f} (true {true_gap:.6f})")
print(f"final accuracy of the eigenvalue loop: {fr.delta_final:.2e}")

out = density(h, delta=1e-4, k=k, seed=0)
parr = out.p.to_array()
ref = density_reference(h, k)
print(f"\ndensity matrix: ||P - P_ref|| = {np.linalg.norm(parr - ref, 2):.2e}")
print(f"trace(P) = {np.trace(parr).real:.8f} (should be {k})")
print(f"idempotency defect: {out.idempotency_defect:.2e}")

# electron density at a handful of query points of a localized basis
rng = np.random.default_rng(1)
queries = Mat(rng.standard_normal((5, n)))
dens = electron_density_batch(out.p, queries)
print(f"\nelectron densities at 5 query points: {np.array2string(dens, precision=5)}")
print(f"all nonnegative: {bool(np.all(dens >= -1e-10))}")
