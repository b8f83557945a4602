"""Finite-precision dense Hermitian and HPD-generalized eigenproblem toolkit.

The package provides provably contracted building blocks (multiplication,
symmetrization, inversion), Hermitian pseudospectral shattering,
gap-independent eigenvalue solvers, a Newton matrix sign function, a
recursive logarithmically-stable Cholesky factorization, and the
application layer for Kohn-Sham-type systems: Fermi level, density matrix,
and electron density queries.
"""

from .fparith import (
    NATIVE,
    DEFAULT_CONSTANTS,
    PrecisionBudget,
    StabilityConstants,
    budget_chol,
    budget_evalsh,
    budget_sgn,
    budget_shatterh,
    budget_transh,
    round_to,
    round_array,
)
from .matcore import Mat, OpReport, herm, herm_inv, herm_mm, inv, mm, norm_estimate
from .shatter import ShatterResult, sample_gaussian, sample_gue, shatterh
from .signfn import ApolloniusRegion, SgnResult, alpha_for_gap, projectors_from_sign, sgn
from .spectra import (
    SpectralResult,
    condition_number,
    eig_backward,
    evalsh,
    evalsh_rel,
    norm_rel,
    singular_values,
)
from .chol import CholResult, chol, schur_blocks
from .dft import (
    DensityOutput,
    FermiResult,
    KSProblem,
    KSSolution,
    density,
    electron_density,
    electron_density_batch,
    fermi,
    solve_ks,
    transh,
)
from . import errors, generate, matio, oracle

__version__ = "0.1.0"

__all__ = [
    "NATIVE",
    "DEFAULT_CONSTANTS",
    "PrecisionBudget",
    "StabilityConstants",
    "budget_chol",
    "budget_evalsh",
    "budget_sgn",
    "budget_shatterh",
    "budget_transh",
    "round_to",
    "round_array",
    "Mat",
    "OpReport",
    "herm",
    "herm_inv",
    "herm_mm",
    "inv",
    "mm",
    "norm_estimate",
    "ShatterResult",
    "sample_gaussian",
    "sample_gue",
    "shatterh",
    "ApolloniusRegion",
    "SgnResult",
    "alpha_for_gap",
    "projectors_from_sign",
    "sgn",
    "SpectralResult",
    "condition_number",
    "eig_backward",
    "evalsh",
    "evalsh_rel",
    "norm_rel",
    "singular_values",
    "CholResult",
    "chol",
    "schur_blocks",
    "DensityOutput",
    "FermiResult",
    "KSProblem",
    "KSSolution",
    "density",
    "electron_density",
    "electron_density_batch",
    "fermi",
    "solve_ks",
    "transh",
    "errors",
    "generate",
    "matio",
    "oracle",
]
