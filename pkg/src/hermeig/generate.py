"""Deterministic test-problem generators.

Each generator is a pure function of (n, parameters, seed) so repeated
calls produce identical matrices.  Spectra are planted by conjugating a
diagonal with a random unitary, which keeps the target eigenvalues exact
up to one rounded product.
"""

from __future__ import annotations

import math

import numpy as np

from ._rng import philox
from .errors import PreconditionError
from .matcore import Mat, herm
from .oracle import random_unitary

__all__ = [
    "random_hermitian",
    "shattered_input",
    "hpd",
    "tight_binding_chain",
    "degenerate_spectrum",
    "ks_problem",
    "KINDS",
]


def random_hermitian(n: int, seed: int, norm: float = 0.5) -> Mat:
    """Dense Hermitian matrix with spectral norm close to ``norm``."""
    if n < 2:
        raise PreconditionError("n must be >= 2")
    rng = philox(seed, "random_hermitian", n)
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    a = (z + z.conj().T) / 2.0
    lam = np.abs(np.linalg.eigvalsh(a)).max()
    return herm(Mat(a * (norm / lam)))


def shattered_input(n: int, seed: int) -> Mat:
    """Hermitian matrix with clusters of nearly equal eigenvalues."""
    if n < 2:
        raise PreconditionError("n must be >= 2")
    rng = philox(seed, "shattered_base", n)
    levels = max(2, n // 4)
    values = rng.uniform(-0.5, 0.5, size=levels)
    spectrum = np.repeat(values, math.ceil(n / levels))[:n]
    q = random_unitary(n, seed)
    return herm(Mat((q * spectrum[None, :]) @ q.conj().T))


def hpd(n: int, seed: int, kappa_target: float = 100.0, norm: float = 1.0) -> Mat:
    """Hermitian positive-definite matrix with condition number near the target."""
    if n < 2:
        raise PreconditionError("n must be >= 2")
    if kappa_target < 1.0:
        raise PreconditionError("kappa_target must be >= 1")
    spectrum = np.logspace(0.0, -math.log10(kappa_target), n) * norm
    q = random_unitary(n, seed)
    a = (q * spectrum[None, :]) @ q.conj().T
    return herm(Mat(a))


def tight_binding_chain(n: int, scale: float = 0.25) -> Mat:
    """Nearest-neighbor chain Hamiltonian with closed-form spectrum.

    Eigenvalues are 2*cos(j*pi/(n+1)) * scale for j = 1..n; the default
    power-of-two scale keeps the spectral norm below 1/2.
    """
    if n < 2:
        raise PreconditionError("n must be >= 2")
    h = np.zeros((n, n), dtype=np.complex128)
    idx = np.arange(n - 1)
    h[idx, idx + 1] = scale
    h[idx + 1, idx] = scale
    return Mat(h, hermitian_certified=True)


def tight_binding_spectrum(n: int, scale: float = 0.25) -> np.ndarray:
    j = np.arange(1, n + 1)
    return np.sort(2.0 * np.cos(j * np.pi / (n + 1)) * scale)


def degenerate_spectrum(
    n: int, seed: int, levels: int = 4, span: float = 0.8
) -> tuple[Mat, np.ndarray]:
    """Hermitian matrix with exactly repeated planted eigenvalues.

    Returns the matrix and the planted spectrum (nondecreasing).  The
    minimum eigenvalue gap is zero by construction.
    """
    if n < 2:
        raise PreconditionError("n must be >= 2")
    levels = min(levels, n)
    rng = philox(seed, "degenerate", n, levels)
    values = np.sort(rng.uniform(-span / 2.0, span / 2.0, size=levels))
    spectrum = np.sort(np.repeat(values, math.ceil(n / levels))[:n])
    q = random_unitary(n, seed)
    a = (q * spectrum[None, :]) @ q.conj().T
    return herm(Mat(a)), spectrum


def fermi_gapped(
    n: int, seed: int, k: int, gap: float = 0.2, degeneracies: bool = False
) -> tuple[Mat, np.ndarray]:
    """Spectrum with a planted Fermi gap at level k, optionally with
    interior degeneracies; returns the matrix and the planted spectrum."""
    if not (1 <= k <= n - 1):
        raise PreconditionError("k must lie in [1, n-1]")
    rng = philox(seed, "fermi_gapped", n, k)
    low = np.sort(rng.uniform(-0.45, -gap / 2.0, size=k))
    high = np.sort(rng.uniform(gap / 2.0, 0.45, size=n - k))
    low[-1] = -gap / 2.0
    high[0] = gap / 2.0
    if degeneracies and k >= 2:
        low[: k // 2] = low[0]
    spectrum = np.concatenate([low, high])
    q = random_unitary(n, seed)
    a = (q * spectrum[None, :]) @ q.conj().T
    return herm(Mat(a)), spectrum


def overlap_matrix(n: int, coupling: float = 0.1) -> Mat:
    """Identity plus nearest-neighbor overlap; HPD for |coupling| < 1/2."""
    s = np.eye(n, dtype=np.complex128)
    idx = np.arange(n - 1)
    s[idx, idx + 1] = coupling
    s[idx + 1, idx] = coupling
    return Mat(s, hermitian_certified=True)


def ks_problem(n: int, seed: int, k: int | None = None, coupling: float = 0.1):
    """Tight-binding Kohn-Sham problem with a nearest-neighbor overlap."""
    from .dft import KSProblem

    k = n // 2 if k is None else k
    h = tight_binding_chain(n)
    s = overlap_matrix(n, coupling)
    rng = philox(seed, "ks_queries", n)
    x = rng.standard_normal((min(n, 8), n)) + 1j * rng.standard_normal((min(n, 8), n))
    return KSProblem(h=h, s=s, k=k, basis_eval=Mat(x))


KINDS = (
    "random_hermitian",
    "shattered",
    "hpd",
    "tight_binding_chain",
    "degenerate_spectrum",
    "ks_problem",
)
