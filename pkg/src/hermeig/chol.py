"""Recursive blocked Cholesky factorization with breakdown detection.

The factor is built from the 2x2 block identity
M = [[A, B*], [B, C]] = [[L11, 0], [L21, L22]] [[L11, 0], [L21, L22]]^*
with L11 = chol(A), L21 = B A^-1 L11, and L22 the factor of the Schur
complement C - B A^-1 B*.  Inversion reuses the shared recursive Schur
scheme, multiplication the contracted product, and the Schur complement is
re-symmetrized before recursing.  Loss of positive-definiteness at any
base case or Schur diagonal raises a breakdown error; with enough
precision relative to the condition number this cannot happen.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fparith, matcore
from .errors import BreakdownError, DimensionMismatchError, NotHermitianError, PreconditionError
from .fparith import NATIVE, DEFAULT_CONSTANTS, PrecisionBudget, StabilityConstants
from .matcore import Mat

__all__ = ["CholResult", "chol", "schur_blocks"]


@dataclass(frozen=True)
class CholResult:
    l: Mat
    backward_bound: float  # eps * ||M|| claim for the configured eps
    recursion_depth: int


def schur_blocks(m: Mat) -> tuple[Mat, Mat, Mat]:
    """Balanced 2x2 partition (A, B, C) of a square matrix at floor(n/2).

    The partition is M = [[A, B*], [B, C]]; B is the lower-left block.
    """
    if not m.is_square:
        raise DimensionMismatchError("schur_blocks requires a square matrix")
    n = m.rows
    if n < 2:
        raise PreconditionError("schur_blocks requires n >= 2")
    h = n // 2
    arr = m.to_array()
    a = Mat(arr[:h, :h], hermitian_certified=m.hermitian_certified)
    b = Mat(arr[h:, :h])
    c = Mat(arr[h:, h:], hermitian_certified=m.hermitian_certified)
    return a, b, c


def _chol_raw(m: np.ndarray, budget: PrecisionBudget, depth: int) -> tuple[np.ndarray, int]:
    n = m.shape[0]
    if n == 1:
        v = m[0, 0]
        if not (v.real > 0.0) or v.imag != 0.0:
            raise BreakdownError("loss of positive-definiteness at a base case")
        root = fparith.fl_sqrt(np.asarray(v.real), budget)
        return np.asarray([[complex(root)]], dtype=np.complex128), depth
    h = n // 2
    a = m[:h, :h]
    b = m[h:, :h]
    c = m[h:, h:]
    l11, d1 = _chol_raw(a, budget, depth + 1)
    ai = matcore._inv_raw(a, budget)
    bai = matcore.matmul_raw(b, ai, budget)
    l21 = matcore.matmul_raw(bai, l11, budget)
    prod = matcore.matmul_raw(bai, b.conj().T, budget)
    prod = matcore.herm(Mat(np.asarray(prod))).to_array()
    schur = np.asarray(fparith.fl_sub(c, prod, budget), dtype=np.complex128)
    # cheap positivity scan; the full eigenvalue check is test-only
    if np.any(schur.diagonal().real <= 0.0):
        raise BreakdownError("loss of positive-definiteness in a Schur complement")
    schur = matcore.herm(Mat(schur)).to_array()
    l22, d2 = _chol_raw(schur, budget, depth + 1)
    out = np.zeros((n, n), dtype=np.complex128)
    out[:h, :h] = l11
    out[h:, :h] = l21
    out[h:, h:] = l22
    return out, max(d1, d2)


def chol(
    m: Mat,
    budget: PrecisionBudget = NATIVE,
    eps: float = 1e-8,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
    require_budget: bool = False,
) -> CholResult:
    """Cholesky factor of a Hermitian positive-definite matrix.

    ``eps`` is the targeted relative backward error; the returned
    ``backward_bound`` evaluates eps * ||M|| with a norm estimate.  With
    ``require_budget`` the theoretical precision requirement (which uses a
    condition-number estimate) is enforced before running; the default is
    to run and let breakdown detection do its job, since the conservative
    constants put the formal requirement far below any hardware precision.
    """
    if not m.hermitian_certified:
        raise NotHermitianError("chol requires a Hermitian-certified input")
    n = m.rows
    if require_budget:
        norm = matcore.norm_estimate(m)
        inv_norm = matcore.norm_estimate(matcore._inv_raw(m.to_array(), NATIVE))
        kappa = max(1.0, norm * inv_norm)
        budget.require(fparith.budget_chol(n, kappa, eps, consts), "chol")
    arr, depth = _chol_raw(m.to_array(), budget, 0)
    if not np.all(np.isfinite(arr)):
        raise BreakdownError("loss of positive-definiteness (non-finite factor)")
    bound = eps * matcore.norm_estimate(m)
    return CholResult(l=Mat(arr), backward_bound=bound, recursion_depth=depth)
