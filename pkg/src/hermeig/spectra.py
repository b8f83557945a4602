"""Gap-independent Hermitian eigenvalue algorithms.

``evalsh`` computes every eigenvalue of a Hermitian matrix to additive
accuracy eps regardless of eigenvalue multiplicities: it perturbs the
input so a minimum gap appears (shattering), then hands the perturbed
matrix to a backward-approximate diagonalization backend.  ``evalsh_rel``
and ``norm_rel`` wrap it in a precision-doubling loop to reach relative
accuracy for invertible inputs, which also yields singular values and
condition numbers of rectangular matrices.

The diagonalization backend is a Hermitian spectral divide-and-conquer:
pick a split point, compute the matrix sign of the shifted block by Newton
iteration, extract the two invariant subspaces with a column-pivoted
Householder QR of the spectral projector, and recurse.  Its backward error
at native precision is measured and reported rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import fparith, matcore
from ._rng import child_seed, philox
from .errors import (
    BitBudgetExhaustedError,
    BudgetInfeasibleError,
    ConvergenceError,
    NotHermitianError,
    PreconditionError,
    SingularMatrixError,
)
from .fparith import NATIVE, NATIVE_BITS, DEFAULT_CONSTANTS, PrecisionBudget, StabilityConstants
from .matcore import Mat
from .shatter import shatterh

__all__ = [
    "SpectralResult",
    "eig_backward",
    "evalsh",
    "evalsh_rel",
    "norm_rel",
    "singular_values",
    "condition_number",
]

DEFAULT_MAX_BITS = 1.0e6
_SPLIT_ATTEMPTS = 10
_EIG_ATTEMPTS = 3
_BASE_SIZE = 4


@dataclass(frozen=True)
class SpectralResult:
    """Eigenvalue output with an oracle-checkable backward certificate."""

    eigenvalues: np.ndarray  # real, nondecreasing
    eigenvectors: Optional[Mat]
    backward_error: float
    precision_used: PrecisionBudget
    trials_log: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# Small dense base case
# ---------------------------------------------------------------------------

def _jacobi_small(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a tiny Hermitian block by cyclic rotations."""
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=np.complex128)
    if n == 1:
        return np.array([a[0, 0].real]), v
    for _ in range(40):
        off = np.abs(np.triu(a, 1)).max() if n > 1 else 0.0
        if off <= 1e-16 * max(1.0, np.abs(np.diagonal(a)).max()):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                f = apq / r
                tau = (a[p, p].real - a[q, q].real) / (2.0 * r)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                j = np.eye(n, dtype=np.complex128)
                j[p, p] = c
                j[p, q] = -s
                j[q, p] = s * np.conj(f)
                j[q, q] = c * np.conj(f)
                a = j.conj().T @ a @ j
                a[p, q] = a[q, p] = 0.0
                v = v @ j
    evals = a.diagonal().real.copy()
    order = np.argsort(evals, kind="stable")
    return evals[order], v[:, order]


# ---------------------------------------------------------------------------
# Column-pivoted Householder QR (rank-revealing basis extraction)
# ---------------------------------------------------------------------------

def _qr_colpivot_q(a: np.ndarray) -> np.ndarray:
    """Unitary Q whose leading columns span the column space of ``a``."""
    a = a.copy().astype(np.complex128)
    n, m = a.shape
    steps = min(n, m)
    vs = []
    norms = np.sum(np.abs(a) ** 2, axis=0)
    for j in range(steps):
        piv = j + int(np.argmax(norms[j:]))
        if piv != j:
            a[:, [j, piv]] = a[:, [piv, j]]
            norms[[j, piv]] = norms[[piv, j]]
        x = a[j:, j]
        nx = np.linalg.norm(x)
        if nx == 0.0:
            vs.append(None)
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0.0 else 1.0
        u = x.copy()
        u[0] += phase * nx
        nu = np.linalg.norm(u)
        if nu == 0.0:
            vs.append(None)
            continue
        u = u / nu
        vs.append(u)
        a[j:, j:] -= 2.0 * np.outer(u, u.conj() @ a[j:, j:])
        norms[j:] = np.sum(np.abs(a[:, j:]) ** 2, axis=0)
        norms[j] = 0.0
    q = np.eye(n, dtype=np.complex128)
    for j in range(steps - 1, -1, -1):
        u = vs[j]
        if u is None:
            continue
        q[j:, :] -= 2.0 * np.outer(u, u.conj() @ q[j:, :])
    return q


# ---------------------------------------------------------------------------
# Spectral divide and conquer
# ---------------------------------------------------------------------------

def _newton_sign_adaptive(x: np.ndarray, budget: PrecisionBudget) -> np.ndarray:
    norm0 = np.linalg.norm(x, ord="fro")
    for _ in range(100):
        xi = matcore._inv_raw(x, budget)
        nxt = 0.5 * (x + xi)
        if not np.all(np.isfinite(nxt)):
            raise ConvergenceError("sign iteration diverged")
        step = np.linalg.norm(nxt - x, ord="fro")
        x = nxt
        if step <= 1e-14 * max(np.linalg.norm(x, ord="fro"), 1e-30):
            break
        if np.linalg.norm(x, ord="fro") > 1e13 * max(norm0, 1.0):
            raise ConvergenceError("sign iteration diverged")
    return x


def _split_block(
    arr: np.ndarray, seed: int, budget: PrecisionBudget
) -> Optional[tuple[np.ndarray, int]]:
    """Find a shift whose sign function splits the spectrum nontrivially.

    Returns (sign_matrix, k) with k eigenvalues below the shift, or None
    when the block is numerically a multiple of the identity.
    """
    n = arr.shape[0]
    diag = arr.diagonal().real
    radii = np.sum(np.abs(arr), axis=1) - np.abs(arr.diagonal())
    lo = float(np.min(diag - radii))
    hi = float(np.max(diag + radii))
    spread = hi - lo
    scale = max(np.abs(arr).max(), 1e-300)
    if spread <= 4e-16 * scale * n:
        return None
    rng = philox(seed, "split", n)
    mu = float(np.median(diag))
    lo_b, hi_b = lo, hi
    for attempt in range(_SPLIT_ATTEMPTS):
        shifted = arr - mu * np.eye(n, dtype=np.complex128)
        try:
            s = _newton_sign_adaptive(shifted, budget)
        except (ConvergenceError, SingularMatrixError):
            mu = mu + spread * (1e-3 + 1e-2 * attempt) * float(rng.uniform(-1.0, 1.0))
            continue
        tr = float(np.trace(s).real)
        k = round((n - tr) / 2.0)
        if abs((n - tr) / 2.0 - k) < 0.1 and 1 <= k <= n - 1:
            return -s, k  # flip sign: +1 on the low side
        if k <= 0:
            lo_b = mu
            mu = 0.5 * (mu + hi_b)
        elif k >= n:
            hi_b = mu
            mu = 0.5 * (mu + lo_b)
        else:
            mu = mu + spread * 1e-2 * float(rng.uniform(-1.0, 1.0))
    raise ConvergenceError("did not converge: no usable spectral split found")


def _divide_conquer(
    arr: np.ndarray, seed: int, budget: PrecisionBudget
) -> tuple[np.ndarray, np.ndarray]:
    n = arr.shape[0]
    if n <= _BASE_SIZE:
        return _jacobi_small(arr)
    split = _split_block(arr, seed, budget)
    if split is None:
        return arr.diagonal().real.copy(), np.eye(n, dtype=np.complex128)
    s_low, k = split
    eye = np.eye(n, dtype=np.complex128)
    p_low = (eye + s_low) / 2.0
    p_low = (p_low + p_low.conj().T) / 2.0
    q = _qr_colpivot_q(p_low)
    q1, q2 = q[:, :k], q[:, k:]
    a1 = q1.conj().T @ arr @ q1
    a2 = q2.conj().T @ arr @ q2
    a1 = (a1 + a1.conj().T) / 2.0
    a2 = (a2 + a2.conj().T) / 2.0
    e1, v1 = _divide_conquer(a1, child_seed(seed, "lo", n), budget)
    e2, v2 = _divide_conquer(a2, child_seed(seed, "hi", n), budget)
    evals = np.concatenate([e1, e2])
    vecs = np.empty((n, n), dtype=np.complex128)
    vecs[:, :k] = q1 @ v1
    vecs[:, k:] = q2 @ v2
    order = np.argsort(evals, kind="stable")
    return evals[order], vecs[:, order]


def eig_backward(
    a: Mat,
    delta: float,
    budget: PrecisionBudget = NATIVE,
    seed: int = 0,
    strict: bool = False,
    backend: str = "dc",
    max_attempts: int = _EIG_ATTEMPTS,
) -> SpectralResult:
    """Backward-approximate diagonalization of a Hermitian matrix.

    Returns eigenvalues (nondecreasing), an eigenvector matrix V, and a
    measured backward residual ||A - V D V^-1|| (Frobenius upper bound).
    In ``strict`` mode the call fails with a retry-exhausted error when no
    attempt reaches the requested ``delta``; otherwise the best attempt is
    returned with its honest residual, which is how the shattering-based
    eigenvalue pipeline consumes it.

    ``backend="lapack"`` switches to the platform eigensolver for
    differential testing.
    """
    if not a.hermitian_certified:
        raise NotHermitianError("eig_backward requires a Hermitian-certified input")
    if delta <= 0.0:
        raise PreconditionError("delta must be positive")
    if budget.is_emulated and budget.bits < NATIVE_BITS:
        raise BudgetInfeasibleError(
            "budget infeasible: the diagonalization backend requires more bits "
            "than any emulated width"
        )
    arr = a.to_array()
    n = a.rows

    if backend == "lapack":
        evals, vecs = np.linalg.eigh(arr)
        residual = _backward_residual(arr, evals, vecs, budget)
        return SpectralResult(evals, Mat(vecs), residual, budget, [{"backend": "lapack"}])
    if backend != "dc":
        raise PreconditionError(f"unknown eig backend {backend!r}")

    best = None
    log = []
    for attempt in range(max_attempts):
        try:
            evals, vecs = _divide_conquer(arr, child_seed(seed, "eig", attempt), budget)
            residual = _backward_residual(arr, evals, vecs, budget)
        except (ConvergenceError, SingularMatrixError) as exc:
            log.append({"attempt": attempt, "error": str(exc)})
            continue
        log.append({"attempt": attempt, "residual": residual})
        if best is None or residual < best[2]:
            best = (evals, vecs, residual)
        if residual <= delta:
            break
    if best is None:
        raise ConvergenceError("did not converge: all diagonalization attempts failed")
    if strict and best[2] > delta:
        raise ConvergenceError(
            f"did not converge: residual {best[2]:.3e} above requested {delta:.3e}"
        )
    evals, vecs, residual = best
    return SpectralResult(evals, Mat(vecs), residual, budget, log)


def _backward_residual(
    arr: np.ndarray, evals: np.ndarray, vecs: np.ndarray, budget: PrecisionBudget
) -> float:
    try:
        vinv = matcore._inv_raw(vecs, budget)
    except Exception:
        return float("inf")
    recon = (vecs * evals[None, :]) @ vinv
    return float(np.linalg.norm(arr - recon, ord="fro"))


# ---------------------------------------------------------------------------
# Gap-independent additive-error eigenvalues
# ---------------------------------------------------------------------------

def _power_of_two_at_least(x: float) -> float:
    return float(2.0 ** math.ceil(math.log2(max(x, 1e-300))))


def evalsh(
    a: Mat,
    eps: float,
    budget: PrecisionBudget = NATIVE,
    seed: int = 0,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
) -> SpectralResult:
    """All eigenvalues of a Hermitian matrix within additive error eps.

    No eigenvalue-gap assumption is made; repeated eigenvalues are fine.
    Succeeds with high probability (the random perturbation or the
    diagonalization backend can fail on unlucky draws).
    """
    if not a.hermitian_certified:
        raise NotHermitianError("evalsh requires a Hermitian-certified input")
    if not (0.0 < eps <= 0.5):
        raise PreconditionError("eps must lie in (0, 1/2]")
    n = a.rows
    arr = a.to_array()
    fro = float(np.linalg.norm(arr, ord="fro"))
    phi = _power_of_two_at_least(16.0 * max(1.0, fro))
    scaled = Mat(arr / phi, hermitian_certified=True)
    eps_scaled = eps / phi
    gamma = eps_scaled / 16.0
    shat = shatterh(scaled, gamma, budget, child_seed(seed, "shatter"), consts)
    delta_eig = 0.25 * gamma / (2.0 * float(n) ** 3)
    dec = eig_backward(shat.x, delta_eig, budget, child_seed(seed, "eig"), strict=False)
    evals = np.sort(dec.eigenvalues) * phi
    return SpectralResult(
        eigenvalues=evals,
        eigenvectors=None,
        backward_error=dec.backward_error * phi,
        precision_used=budget,
        trials_log=[
            {
                "phi": phi,
                "gamma": gamma,
                "delta_eig": delta_eig,
                "shatter_seed": child_seed(seed, "shatter"),
                "eig_residual": dec.backward_error,
            }
        ],
    )


# ---------------------------------------------------------------------------
# Relative-error loops
# ---------------------------------------------------------------------------

def _halving_loop(
    a: Mat,
    eps: float,
    budget: PrecisionBudget,
    seed: int,
    consts: StabilityConstants,
    max_bits: float,
    statistic,
    guard_factor: float,
):
    """Shared delta-halving schedule: run evalsh at delta = 1/2, 1/4, ...
    until delta < guard_factor * statistic(estimates)."""
    if not (0.0 < eps < 0.5):
        raise PreconditionError("eps must lie in (0, 1/2)")
    n = a.rows
    delta = 0.5
    deltas = [delta]
    result = evalsh(a, delta, budget, child_seed(seed, "rel", 0), consts)
    t = 0
    while delta >= guard_factor * statistic(result.eigenvalues):
        t += 1
        delta = delta / 2.0
        requirement = fparith.budget_evalsh(n, delta, consts)
        if requirement.bits > max_bits:
            raise BitBudgetExhaustedError(
                f"bit budget exhausted: delta={delta:.3e} would need "
                f"{requirement.bits:.0f} bits (ceiling {max_bits:.0f})"
            )
        result = evalsh(a, delta, budget, child_seed(seed, "rel", t), consts)
        deltas.append(delta)
    return result, deltas, delta


def evalsh_rel(
    a: Mat,
    eps: float,
    budget: PrecisionBudget = NATIVE,
    seed: int = 0,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
    max_bits: float = DEFAULT_MAX_BITS,
) -> SpectralResult:
    """Relative-error eigenvalues of an invertible Hermitian matrix.

    Accuracy doubles each round until the additive error drops below
    eps/(1+eps) times the smallest eigenvalue magnitude estimate.  A
    singular input cannot satisfy the guard and surfaces as bit-budget
    exhaustion.
    """
    result, deltas, delta = _halving_loop(
        a,
        eps,
        budget,
        seed,
        consts,
        max_bits,
        statistic=lambda ev: float(np.min(np.abs(ev))),
        guard_factor=eps / (1.0 + eps),
    )
    return SpectralResult(
        eigenvalues=result.eigenvalues,
        eigenvectors=None,
        backward_error=result.backward_error,
        precision_used=budget,
        trials_log=deltas,
    )


def norm_rel(
    a: Mat,
    eps: float,
    budget: PrecisionBudget = NATIVE,
    seed: int = 0,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
    max_bits: float = DEFAULT_MAX_BITS,
) -> float:
    """Spectral norm of a Hermitian matrix within relative error eps."""
    result, _, _ = _halving_loop(
        a,
        eps,
        budget,
        seed,
        consts,
        max_bits,
        statistic=lambda ev: float(np.max(np.abs(ev))),
        guard_factor=eps / (1.0 + eps),
    )
    return float(np.max(np.abs(result.eigenvalues)))


# ---------------------------------------------------------------------------
# Rectangular by-products
# ---------------------------------------------------------------------------

def singular_values(
    a: Mat,
    eps: float,
    budget: PrecisionBudget = NATIVE,
    seed: int = 0,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
    max_bits: float = DEFAULT_MAX_BITS,
) -> np.ndarray:
    """Relative-error singular values of a full-column-rank m x n matrix.

    Two steps: form the Gram matrix with a symmetrized product, then take
    square roots of its relative-error eigenvalues.  Rank deficiency
    surfaces as bit-budget exhaustion in the eigenvalue loop.
    """
    if a.rows < a.cols:
        raise PreconditionError("singular_values requires m >= n")
    gram = matcore.herm_mm(a.conj_t(), a, budget)
    rel = evalsh_rel(gram, eps, budget, seed, consts, max_bits)
    lam = np.clip(rel.eigenvalues, 0.0, None)
    return np.sqrt(lam)


def condition_number(
    a: Mat,
    eps: float,
    budget: PrecisionBudget = NATIVE,
    seed: int = 0,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
    max_bits: float = DEFAULT_MAX_BITS,
) -> float:
    """2-norm condition number from the relative-error singular values."""
    sv = singular_values(a, eps, budget, seed, consts, max_bits)
    if sv[0] <= 0.0:
        raise PreconditionError("condition number undefined for singular input")
    return float(sv[-1] / sv[0])
