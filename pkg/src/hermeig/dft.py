"""Fermi level, density matrix, electron density, and the HPD reduction.

For a Hermitian Hamiltonian with k occupied states, the Fermi level is the
midpoint of the k-th and (k+1)-st smallest eigenvalues and the Fermi gap
their distance.  ``fermi`` resolves both by halving the accuracy of a
gap-independent eigenvalue solver until the gap is resolved; ``density``
shifts by the Fermi level and maps the spectrum to {0, 1} through the
matrix sign function; ``electron_density`` evaluates the quadratic form of
the density matrix at basis-function values.  ``transh`` reduces the HPD
generalized eigenproblem H C = S C E to an ordinary Hermitian one through
the Cholesky factor of S^-1, and ``solve_ks`` chains the stages.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import fparith, matcore, signfn
from ._rng import child_seed
from .chol import chol
from .errors import (
    BitBudgetExhaustedError,
    BudgetInfeasibleError,
    DimensionMismatchError,
    NotHermitianError,
    PreconditionError,
)
from .fparith import NATIVE, DEFAULT_CONSTANTS, PrecisionBudget, StabilityConstants
from .matcore import Mat, herm, herm_inv, mm
from .spectra import DEFAULT_MAX_BITS, evalsh, evalsh_rel, norm_rel

__all__ = [
    "FermiResult",
    "DensityOutput",
    "KSProblem",
    "KSSolution",
    "fermi",
    "density",
    "electron_density",
    "electron_density_batch",
    "transh",
    "solve_ks",
]

log = logging.getLogger(__name__)

_FERMI_EPS_FOR_DENSITY = 1.0 / 32.0


@dataclass(frozen=True)
class FermiResult:
    mu: float  # Fermi level estimate
    gap: float  # Fermi gap estimate
    k: int  # occupied states
    delta_final: float  # last accuracy of the halving schedule


@dataclass(frozen=True)
class DensityOutput:
    p: Mat  # Hermitian-certified approximate density matrix
    fermi: FermiResult
    idempotency_defect: float  # ||P^2 - P|| estimate
    trace_defect: float  # |trace(P) - k|


@dataclass(frozen=True)
class KSProblem:
    """A Kohn-Sham-type eigenproblem: Hamiltonian, optional overlap, filling."""

    h: Mat
    s: Optional[Mat]
    k: int
    basis_eval: Optional[Mat] = None  # rows = basis functions at query points

    def __post_init__(self):
        if not self.h.hermitian_certified:
            raise NotHermitianError("KSProblem requires a Hermitian-certified H")
        n = self.h.rows
        if self.s is not None and self.s.shape != (n, n):
            raise DimensionMismatchError("H and S must have the same shape")
        if not (1 <= self.k <= n - 1):
            raise PreconditionError("k must lie in [1, n-1]")
        if self.basis_eval is not None and self.basis_eval.cols != n:
            raise DimensionMismatchError("basis evaluation rows must have length n")


@dataclass(frozen=True)
class KSSolution:
    density: DensityOutput
    electron_densities: Optional[np.ndarray]
    p_original_basis: Optional[Mat]
    provenance: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Fermi level
# ---------------------------------------------------------------------------

def fermi(
    a: Mat,
    eps: float,
    k: int,
    budget: PrecisionBudget = NATIVE,
    seed: int = 0,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
    max_bits: float = DEFAULT_MAX_BITS,
) -> FermiResult:
    """Fermi level and Fermi gap of a Hermitian matrix with k filled states.

    Interior degeneracies are harmless; only the gap at level k matters.
    A vanishing Fermi gap cannot be resolved at any accuracy and surfaces
    as bit-budget exhaustion.
    """
    if not a.hermitian_certified:
        raise NotHermitianError("fermi requires a Hermitian-certified input")
    n = a.rows
    if not (1 <= k <= n - 1):
        raise PreconditionError("k must lie in [1, n-1]")
    if not (0.0 < eps < 0.5):
        raise PreconditionError("eps must lie in (0, 1/2)")

    delta = 0.5
    t = 0
    res = evalsh(a, delta, budget, child_seed(seed, "fermi", t), consts)
    gap_est = float(res.eigenvalues[k] - res.eigenvalues[k - 1])
    while delta > (eps / (1.0 + 2.0 * eps)) * gap_est:
        t += 1
        delta /= 2.0
        requirement = fparith.budget_evalsh(n, delta, consts)
        if requirement.bits > max_bits:
            raise BitBudgetExhaustedError(
                "no resolvable Fermi gap: accuracy "
                f"delta={delta:.3e} would need {requirement.bits:.0f} bits"
            )
        res = evalsh(a, delta, budget, child_seed(seed, "fermi", t), consts)
        gap_est = float(res.eigenvalues[k] - res.eigenvalues[k - 1])
    mu = float((res.eigenvalues[k - 1] + res.eigenvalues[k]) / 2.0)
    return FermiResult(mu=mu, gap=gap_est, k=k, delta_final=delta)


# ---------------------------------------------------------------------------
# Density matrix
# ---------------------------------------------------------------------------

def density(
    a: Mat,
    delta: float,
    k: int,
    budget: PrecisionBudget = NATIVE,
    seed: int = 0,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
    max_bits: float = DEFAULT_MAX_BITS,
) -> DensityOutput:
    """Spectral projector onto the k lowest eigenvectors, to accuracy delta.

    The Fermi level is located first (at fixed accuracy 1/32 relative to
    the gap), the matrix is shifted so occupied states become positive,
    and the sign function maps them to +1.  The shifted matrix is halved
    until the gap estimate enters the validity range of the sign
    parameterization; halving is exact and leaves the projector unchanged.
    """
    if not (0.0 < delta < 1.0 / 12.0):
        raise PreconditionError("delta must lie in (0, 1/12)")
    fr = fermi(a, _FERMI_EPS_FOR_DENSITY, k, budget, child_seed(seed, "fermi"), consts, max_bits)
    gap = fr.gap
    if budget.u is not None:
        u_req = min(gap / 96.0, delta * 13.0 * gap**3 / 3072.0)
        if budget.u > u_req:
            raise BudgetInfeasibleError(
                f"budget infeasible for density: need u <= {u_req:.3e} "
                f"for gap estimate {gap:.3e}"
            )

    shifted = fparith.fl_sub(
        fr.mu * np.eye(a.rows, dtype=np.complex128), a.to_array(), budget
    )
    shifted = herm(Mat(np.asarray(shifted)))

    halvings = 0
    arr = shifted.to_array()
    g = gap
    while g >= signfn.GAP_VALIDITY_LIMIT:
        arr = fparith.fl_scale_pow2(arr, 0.5)
        g *= 0.5
        halvings += 1
    alpha = signfn.alpha_for_gap(g)
    sres = signfn.sgn(
        Mat(arr, hermitian_certified=True),
        delta,
        eps_pseudo=g / 32.0,
        budget=budget,
        alpha=alpha,
        consts=consts,
    )
    eye = np.eye(a.rows, dtype=np.complex128)
    p = fparith.fl_scale_pow2(fparith.fl_add(eye, sres.s.to_array(), budget), 0.5)
    p = herm(Mat(np.asarray(p)))

    parr = p.to_array()
    idem = matcore.norm_estimate(parr @ parr - parr)
    trace_defect = abs(float(np.trace(parr).real) - k)
    return DensityOutput(
        p=p, fermi=fr, idempotency_defect=float(idem), trace_defect=trace_defect
    )


# ---------------------------------------------------------------------------
# Electron density queries
# ---------------------------------------------------------------------------

def electron_density(p: Mat, x, budget: PrecisionBudget = NATIVE) -> float:
    """Electron density x^H P x for one vector of basis-function values."""
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    if x.size != p.cols:
        raise DimensionMismatchError("query vector length must match the matrix")
    y = matcore.matmul_raw(p.to_array(), x.reshape(-1, 1), budget).reshape(-1)
    val = complex(
        matcore.matmul_raw(x.conj().reshape(1, -1), y.reshape(-1, 1), budget)[0, 0]
    )
    if abs(val.imag) > 0.0:
        log.debug("electron_density imaginary residue %.3e", abs(val.imag))
    return float(val.real)


def electron_density_batch(p: Mat, queries: Mat, budget: PrecisionBudget = NATIVE) -> np.ndarray:
    """Densities for many query points at once, via two matrix products.

    ``queries`` stacks one vector of basis-function values per row; row i of
    the result equals ``electron_density(p, queries[i])``.  The stacked rows
    enter the product conjugated so that each diagonal entry is the same
    x^H P x quadratic form as the single-query call (for real-valued basis
    functions the conjugation is a no-op).
    """
    if queries.cols != p.cols:
        raise DimensionMismatchError("query rows must have length n")
    xc = Mat(queries.to_array().conj())
    t, _ = mm(xc, p, budget)
    full, _ = mm(t, xc.conj_t(), budget)
    diag = full.to_array().diagonal()
    if np.abs(diag.imag).max(initial=0.0) > 0.0:
        log.debug(
            "electron_density_batch max imaginary residue %.3e",
            float(np.abs(diag.imag).max()),
        )
    return diag.real.copy()


# ---------------------------------------------------------------------------
# HPD generalized eigenproblem reduction
# ---------------------------------------------------------------------------

def transh(
    h: Mat,
    s: Mat,
    budget: PrecisionBudget = NATIVE,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
    require_budget: bool = False,
    chol_eps: float = 1e-8,
) -> Mat:
    """Reduce the pencil (H, S) to a single Hermitian matrix L* H L.

    L is the Cholesky factor of the symmetrized inverse of S, so the
    output is Hermitian with the spectrum of (a backward-perturbed)
    S^-1 H.  The caller is responsible for the scalings ||H|| <= 1 and
    ||S^-1|| <= 1; the Kohn-Sham driver handles them with exact powers of
    two.
    """
    if not h.hermitian_certified:
        raise NotHermitianError("transh requires a Hermitian-certified H")
    if not s.hermitian_certified:
        raise NotHermitianError("transh requires a Hermitian-certified S")
    if h.shape != s.shape:
        raise DimensionMismatchError("H and S must have the same shape")
    if require_budget:
        kappa_s = max(
            1.0,
            matcore.norm_estimate(s)
            * matcore.norm_estimate(matcore._inv_raw(s.to_array(), NATIVE)),
        )
        budget.require(
            fparith.budget_transh(h.rows, kappa_s, chol_eps, consts), "transh"
        )
    try:
        s_inv = herm_inv(s, budget, consts)
    except Exception as exc:
        raise type(exc)(f"transh: inverting the overlap failed: {exc}") from exc
    try:
        factor = chol(s_inv, budget, chol_eps, consts)
    except Exception as exc:
        raise type(exc)(f"transh: Cholesky of the inverted overlap failed: {exc}") from exc
    l = factor.l
    inner, _ = mm(l.conj_t(), h, budget)
    outer, _ = mm(inner, l, budget)
    return herm(outer)


# ---------------------------------------------------------------------------
# End-to-end Kohn-Sham pipeline
# ---------------------------------------------------------------------------

def _pow2_at_least(x: float) -> float:
    return float(2.0 ** math.ceil(math.log2(max(x, 2**-512))))


def solve_ks(
    problem: KSProblem,
    delta: float,
    budget: PrecisionBudget = NATIVE,
    seed: int = 0,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
    max_bits: float = DEFAULT_MAX_BITS,
) -> KSSolution:
    """Density matrix and electron density for a Kohn-Sham-type problem.

    With an orthogonal basis (S absent or the identity) this reduces to
    ``density`` on H, rescaled by an exact power of two when needed.  With
    an overlap matrix, S and H are rescaled, the pencil is reduced to a
    Hermitian matrix, and the density is computed in the whitened basis;
    the projector is also mapped back to the original basis.  All scale
    factors are powers of two and are recorded in the provenance.
    """
    h = problem.h
    n = h.rows
    prov: dict = {"stages": []}

    identity_overlap = problem.s is None or problem.s == Mat.identity(n)

    if identity_overlap:
        h_norm_est = matcore.norm_estimate(h)
        if h_norm_est <= 0.99:
            h_scale = 1.0
            h_work = h
        else:
            sigma = norm_rel(h, 0.25, budget, child_seed(seed, "hnorm"), consts, max_bits)
            h_scale = _pow2_at_least(2.0 * sigma)
            h_work = Mat(h.to_array() / h_scale, hermitian_certified=True)
        prov["stages"].append({"stage": "scale_h", "h_scale": h_scale})
        out = density(h_work, delta, problem.k, budget, seed, consts, max_bits)
        prov["fermi_level_original_units"] = out.fermi.mu * h_scale
        prov["h_scale"] = h_scale
        densities = None
        if problem.basis_eval is not None:
            densities = electron_density_batch(out.p, problem.basis_eval, budget)
        return KSSolution(
            density=out,
            electron_densities=densities,
            p_original_basis=out.p,
            provenance=prov,
        )

    s = problem.s
    # scale H and S by powers of two so that ||H'|| <= 1 and ||S'^-1|| <= 1
    sigma_h = norm_rel(h, 0.25, budget, child_seed(seed, "hnorm"), consts, max_bits)
    h_scale = _pow2_at_least(2.0 * sigma_h)
    h_work = Mat(h.to_array() / h_scale, hermitian_certified=True)

    sigma_s = norm_rel(s, 0.25, budget, child_seed(seed, "snorm"), consts, max_bits)
    s_pre = _pow2_at_least(2.0 * sigma_s)
    s_unit = Mat(s.to_array() / s_pre, hermitian_certified=True)
    evs = evalsh_rel(s_unit, 0.25, budget, child_seed(seed, "sinv"), consts, max_bits)
    lam_min = float(np.min(evs.eigenvalues))
    if lam_min <= 0.0:
        raise PreconditionError("overlap matrix is not positive-definite")
    s_scale = _pow2_at_least(2.0 / lam_min)  # ||(s_scale * S_unit)^-1|| <= 1/2
    s_work = Mat(s_unit.to_array() * s_scale, hermitian_certified=True)
    prov["stages"].append(
        {"stage": "scale", "h_scale": h_scale, "s_pre": s_pre, "s_scale": s_scale}
    )

    h_bar = transh(h_work, s_work, budget, consts)
    prov["stages"].append({"stage": "transh", "n": n})

    hb_norm = matcore.norm_estimate(h_bar)
    hb_scale = 1.0
    if hb_norm > 0.99:
        sig = norm_rel(h_bar, 0.25, budget, child_seed(seed, "hbar"), consts, max_bits)
        hb_scale = _pow2_at_least(2.0 * sig)
        h_bar = Mat(h_bar.to_array() / hb_scale, hermitian_certified=True)
    prov["stages"].append({"stage": "scale_hbar", "hb_scale": hb_scale})

    out = density(h_bar, delta, problem.k, budget, seed, consts, max_bits)

    # generalized eigenvalues of (H, S) are eigenvalues of h_bar times this
    sigma_tot = s_scale / s_pre  # S was scaled to S' = sigma_tot * S
    unscale = hb_scale * h_scale * sigma_tot
    prov["eig_unscale"] = unscale
    prov["fermi_level_original_units"] = out.fermi.mu * unscale

    # map the projector back to the original (non-orthogonal) basis; the
    # whitening used S' = sigma_tot * S, so the physical projector carries
    # an exact power-of-two correction
    s_inv = herm_inv(s_work, budget, consts)
    l = chol(s_inv, budget, 1e-8, consts).l
    lp, _ = mm(l, out.p, budget)
    p_orig = mm(lp, l.conj_t(), budget)[0]
    p_orig = Mat(herm(p_orig).to_array() * sigma_tot, hermitian_certified=True)

    densities = None
    if problem.basis_eval is not None:
        # x^H (L P L^H) x = (L^H x)^H P (L^H x); with rows as vectors the
        # transformed query matrix is X conj(L)
        xq, _ = mm(problem.basis_eval, Mat(l.to_array().conj()), budget)
        densities = electron_density_batch(out.p, xq, budget) * sigma_tot
    return KSSolution(
        density=out,
        electron_densities=densities,
        p_original_basis=p_orig,
        provenance=prov,
    )
