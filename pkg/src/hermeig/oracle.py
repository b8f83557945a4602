"""Independent reference computations for tests and differential runs.

Everything here is a brute-force textbook construction executed at native
double precision with compensated accumulation where sums matter.  None of
these routines call the production matrix kernels; they exist so that every
accuracy claim in the library can be checked against code that shares no
path with the implementation under test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, PreconditionError

_MAX_SWEEPS = 60
_OFF_TOL = 1e-14
_DESK_LIMIT = 512


def _arr(a) -> np.ndarray:
    if hasattr(a, "to_array"):
        a = a.to_array()
    return np.array(a, dtype=np.complex128, copy=True)


def _off_norm_sq(a: np.ndarray) -> float:
    # compensated accumulation of the squared off-diagonal magnitudes
    mags = (np.abs(a) ** 2).astype(np.float64)
    np.fill_diagonal(mags, 0.0)
    return math.fsum(mags.ravel().tolist())


@dataclass(frozen=True)
class OracleEig:
    """Reference spectral decomposition: A = V diag(eigenvalues) V^H."""

    eigenvalues: np.ndarray  # real, nondecreasing
    eigenvectors: np.ndarray  # unitary columns
    residual: float


def eig_reference(a) -> OracleEig:
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Sweeps until the off-diagonal Frobenius mass falls below
    1e-14 * ||A||_F, with a hard cap of 60 sweeps.
    """
    a = _arr(a)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise PreconditionError("eig_reference requires a square matrix")
    if n > _DESK_LIMIT:
        raise PreconditionError(f"eig_reference is desk-scale only (n <= {_DESK_LIMIT})")
    if not np.allclose(a, a.conj().T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise PreconditionError("eig_reference requires a Hermitian input")
    a0 = a.copy()
    scale = math.sqrt(math.fsum((np.abs(a) ** 2).ravel().tolist()))
    v = np.eye(n, dtype=np.complex128)
    if n == 1:
        return OracleEig(np.array([a[0, 0].real]), v, 0.0)
    tol_sq = (_OFF_TOL * max(scale, 1e-300)) ** 2
    for _ in range(_MAX_SWEEPS):
        if _off_norm_sq(a) <= tol_sq:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                f = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (app - aqq) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # unitary J acting on the (p, q) plane
                jpp, jpq = c, -s
                jqp, jqq = s * np.conj(f), c * np.conj(f)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = col_p * jpp + col_q * jqp
                a[:, q] = col_p * jpq + col_q * jqq
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = np.conj(jpp) * row_p + np.conj(jqp) * row_q
                a[q, :] = np.conj(jpq) * row_p + np.conj(jqq) * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vcol_p = v[:, p].copy()
                vcol_q = v[:, q].copy()
                v[:, p] = vcol_p * jpp + vcol_q * jqp
                v[:, q] = vcol_p * jpq + vcol_q * jqq
    else:
        raise ConvergenceError("Jacobi sweep cap (60) exceeded")
    evals = a.diagonal().real.copy()
    order = np.argsort(evals, kind="stable")
    evals = evals[order]
    v = v[:, order]
    residual = float(np.linalg.norm(a0 @ v - v * evals[None, :], ord="fro"))
    return OracleEig(evals, v, residual)


def mm_reference(a, b) -> np.ndarray:
    """Matrix product with compensated per-entry accumulation."""
    a = _arr(a)
    b = _arr(b)
    if a.shape[1] != b.shape[0]:
        raise PreconditionError("inner dimensions disagree")
    out = np.empty((a.shape[0], b.shape[1]), dtype=np.complex128)
    for i in range(a.shape[0]):
        prods = a[i, :][:, None] * b
        out[i, :] = [
            complex(math.fsum(prods[:, j].real.tolist()), math.fsum(prods[:, j].imag.tolist()))
            for j in range(b.shape[1])
        ]
    return out


def norm_reference(a) -> float:
    """Spectral norm: largest |eigenvalue| for Hermitian inputs, largest
    singular value otherwise."""
    a = _arr(a)
    if a.shape[0] == a.shape[1] and np.allclose(
        a, a.conj().T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(a).max())
    ):
        return float(np.max(np.abs(eig_reference(a).eigenvalues)))
    g = a.conj().T @ a
    g = (g + g.conj().T) / 2.0
    lam = eig_reference(g).eigenvalues
    return float(math.sqrt(max(lam[-1], 0.0)))


def cond_reference(a) -> float:
    """2-norm condition number via the singular values of the input."""
    a = _arr(a)
    g = a.conj().T @ a
    g = (g + g.conj().T) / 2.0
    lam = eig_reference(g).eigenvalues
    if lam[0] <= 0.0:
        return float("inf")
    return float(math.sqrt(lam[-1] / lam[0]))


def gap_reference(a) -> float:
    """Minimum eigenvalue spacing min_{i != j} |lambda_i - lambda_j|."""
    evals = eig_reference(a).eigenvalues
    if evals.size < 2:
        return float("inf")
    return float(np.min(np.diff(evals)))


def sgn_reference(a) -> np.ndarray:
    """Matrix sign via the reference eigendecomposition."""
    dec = eig_reference(a)
    if np.any(dec.eigenvalues == 0.0):
        raise PreconditionError("sign undefined: eigenvalue on the imaginary axis")
    signs = np.sign(dec.eigenvalues)
    return (dec.eigenvectors * signs[None, :]) @ dec.eigenvectors.conj().T


def density_reference(a, k: int) -> np.ndarray:
    """Spectral projector onto the k lowest eigenvectors."""
    dec = eig_reference(a)
    n = dec.eigenvalues.size
    if not (1 <= k <= n):
        raise PreconditionError("k out of range")
    vk = dec.eigenvectors[:, :k]
    return vk @ vk.conj().T


def fermi_reference(a, k: int) -> tuple[float, float]:
    """Reference Fermi level and Fermi gap over nondecreasing eigenvalues."""
    evals = eig_reference(a).eigenvalues
    n = evals.size
    if not (1 <= k <= n - 1):
        raise PreconditionError("k out of range")
    mu = (evals[k - 1] + evals[k]) / 2.0
    gap = abs(evals[k] - evals[k - 1])
    return float(mu), float(gap)


def chol_reference(m) -> np.ndarray:
    """Naive O(n^3) Cholesky of a Hermitian positive-definite matrix."""
    m = _arr(m)
    n = m.shape[0]
    if m.shape[0] != m.shape[1]:
        raise PreconditionError("chol_reference requires a square matrix")
    if not np.allclose(m, m.conj().T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(m).max())):
        raise PreconditionError("chol_reference requires a Hermitian input")
    low = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(i + 1):
            prods = low[i, :j] * low[j, :j].conj()
            acc = complex(
                m[i, j].real - math.fsum(prods.real.tolist()),
                m[i, j].imag - math.fsum(prods.imag.tolist()),
            )
            if i == j:
                val = acc.real
                if val <= 0.0:
                    raise PreconditionError("chol_reference: input is not positive-definite")
                low[i, i] = math.sqrt(val)
            else:
                low[i, j] = acc / low[j, j]
    return low


def _solve_lower(low: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Forward substitution L x = b for lower-triangular L."""
    n = low.shape[0]
    x = np.zeros_like(b, dtype=np.complex128)
    for i in range(n):
        x[i] = (b[i] - low[i, :i] @ x[:i]) / low[i, i]
    return x


def generalized_eig_reference(h, s) -> np.ndarray:
    """Eigenvalues of the pencil (H, S) via Cholesky whitening of S."""
    h = _arr(h)
    s = _arr(s)
    low = chol_reference(s)
    # W = L^-1 H L^-H
    y = np.column_stack([_solve_lower(low, h[:, j]) for j in range(h.shape[1])])
    w = np.column_stack([_solve_lower(low, y.conj().T[:, j]) for j in range(h.shape[0])])
    w = w.conj().T
    w = (w + w.conj().T) / 2.0
    return eig_reference(w).eigenvalues


def random_unitary(n: int, seed: int) -> np.ndarray:
    """Haar-ish random unitary from the QR of a complex Gaussian matrix."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    phases = d / np.abs(d)
    return q * phases.conj()[None, :]
