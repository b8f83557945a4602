"""Hermitian pseudospectral shattering by scaled GUE perturbation.

Adding a small random Hermitian perturbation to a Hermitian matrix forces
a minimum eigenvalue gap with high probability while moving the spectrum
only slightly.  ``shatterh`` performs the perturbation with explicit
floating-point error accounting: the Gaussian draws, the Hermitian
symmetrization, the scaling by gamma, and the final addition each round at
the running precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fparith
from ._rng import philox, uniform_open
from .errors import NotHermitianError, PreconditionError
from .fparith import NATIVE, DEFAULT_CONSTANTS, PrecisionBudget, StabilityConstants
from .matcore import Mat, norm_estimate

__all__ = ["ShatterResult", "sample_gaussian", "sample_gue", "shatterh"]


@dataclass(frozen=True)
class ShatterResult:
    """Perturbed matrix plus the claimed gap and drift this run certifies."""

    x: Mat
    gamma: float
    claimed_gap: float  # gamma / (2 n^3)
    claimed_drift: float  # 8 gamma
    seed: int


def _box_muller(rng: np.random.Generator, shape, sigma: float) -> np.ndarray:
    """Complex Gaussian N(0, sigma^2) draws; real and imaginary parts each
    carry variance sigma^2 / 2."""
    u1 = uniform_open(rng, shape)
    u2 = rng.random(shape)
    radius = np.sqrt(-2.0 * np.log(u1)) * (sigma / math.sqrt(2.0))
    angle = 2.0 * math.pi * u2
    return radius * np.cos(angle) + 1j * radius * np.sin(angle)


def sample_gaussian(
    sigma: float,
    budget: PrecisionBudget = NATIVE,
    seed: int = 0,
    size=None,
):
    """Seeded complex Gaussian draw(s) rounded at the budget.

    Returns a scalar when ``size`` is None, otherwise an array of draws.
    """
    if sigma < 0.0:
        raise PreconditionError("sigma must be nonnegative")
    shape = () if size is None else size
    if sigma == 0.0:
        out = np.zeros(shape, dtype=np.complex128)
        return complex(0.0) if size is None else out
    rng = philox(seed, "gauss")
    z = _box_muller(rng, shape, sigma)
    z = fparith.round_array(z, budget)
    return complex(z) if size is None else z


def sample_gue(n: int, budget: PrecisionBudget = NATIVE, seed: int = 0) -> Mat:
    """Hermitian random matrix G = Z + Z* with Z entries N(0, 1/(2n)).

    Every entry of G has second moment 1/n and the diagonal is exactly
    real; the output is Hermitian-certified by construction.
    """
    if n < 1:
        raise PreconditionError("n must be >= 1")
    z = _gue_base(n, budget, seed)
    g = fparith.fl_add(z, z.conj().T, budget)
    return Mat(g, hermitian_certified=True)


def _gue_base(n: int, budget: PrecisionBudget, seed: int) -> np.ndarray:
    sigma = 1.0 / math.sqrt(2.0 * n)
    rng = philox(seed, "gue", n)
    z = _box_muller(rng, (n, n), sigma)
    return fparith.round_array(z, budget)


def shatterh(
    a: Mat,
    gamma: float,
    budget: PrecisionBudget = NATIVE,
    seed: int = 0,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
    debug_checks: bool = False,
) -> ShatterResult:
    """Perturb a Hermitian matrix so its spectrum acquires a minimum gap.

    With probability at least 1 - 3/n the output satisfies
    gap > gamma / (2 n^3) and drift ||X - A|| < 8 gamma.  The caller is
    responsible for ||A|| <= 1; set ``debug_checks`` to verify it against a
    norm estimate.  Raises when the running precision exceeds the
    shattering budget.
    """
    if not a.hermitian_certified:
        raise NotHermitianError("shatterh requires a Hermitian-certified input")
    n = a.rows
    if not (0.0 < gamma < 0.5):
        raise PreconditionError("gamma must lie in (0, 1/2)")
    requirement = fparith.budget_shatterh(n, gamma, consts)
    budget.require(requirement, "shatterh")
    if debug_checks and norm_estimate(a) > 1.0 + 1e-9:
        raise PreconditionError("shatterh requires ||A|| <= 1")

    z = _gue_base(n, budget, seed)
    g1 = fparith.fl_add(z, z.conj().T, budget)
    g2 = fparith.fl_mul(np.asarray(gamma), g1, budget)
    x = fparith.fl_add(a.to_array(), g2, budget)
    # exact conjugate symmetry survives each rounded elementwise step, but
    # enforce the certificate bit-exactly regardless
    x = np.triu(x, 1) + np.triu(x, 1).conj().T + np.diag(x.diagonal().real)
    xm = Mat(x, hermitian_certified=True)
    return ShatterResult(
        x=xm,
        gamma=gamma,
        claimed_gap=gamma / (2.0 * float(n) ** 3),
        claimed_drift=8.0 * gamma,
        seed=seed,
    )
