"""Dense complex matrices and the three contracted primitives.

Everything else in the library is built from three operations with
norm-wise error contracts: multiplication (``mm``), symmetrization
(``herm``), and inversion (``inv``).  Each runs either at native double
precision or at an emulated mantissa width; emulated execution rounds
after every scalar operation with a fixed, deterministic evaluation order.

Matrices are immutable values.  The ``hermitian_certified`` flag is a hard
guarantee: entries satisfy A[i, j] == conj(A[j, i]) bit-exactly and the
diagonal is exactly real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import fparith
from ._rng import philox
from .errors import (
    DimensionMismatchError,
    NotHermitianError,
    PreconditionError,
    SingularMatrixError,
)
from .fparith import NATIVE, DEFAULT_CONSTANTS, PrecisionBudget, StabilityConstants

_STRASSEN_BASE = 64
_NORM_EST_ITERS = 30
_NORM_EST_SEED = 0x5EED


# ---------------------------------------------------------------------------
# The matrix value type
# ---------------------------------------------------------------------------

class Mat:
    """Immutable dense complex matrix with row-major storage.

    Parameters
    ----------
    data:
        Anything ``np.asarray`` accepts; stored as complex128, C-order.
    hermitian_certified:
        Assert the bit-exact Hermitian invariant.  Verified at
        construction time; invalid certification raises.
    """

    __slots__ = ("_data", "hermitian_certified")

    def __init__(self, data, hermitian_certified: bool = False):
        arr = np.array(data, dtype=np.complex128, order="C", copy=True)
        if arr.ndim != 2:
            raise PreconditionError("Mat requires a 2-D array")
        if not np.all(np.isfinite(arr)):
            raise PreconditionError("Mat entries must be finite")
        if hermitian_certified:
            if arr.shape[0] != arr.shape[1]:
                raise NotHermitianError("certified matrices must be square")
            if not np.array_equal(arr, arr.conj().T) or np.any(
                np.diagonal(arr).imag != 0.0
            ):
                raise NotHermitianError(
                    "certification requires exact conjugate symmetry"
                )
        arr.setflags(write=False)
        self._data = arr
        self.hermitian_certified = bool(hermitian_certified)

    # -- structure ---------------------------------------------------------

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def to_array(self) -> np.ndarray:
        """Read-only view of the underlying complex128 array."""
        return self._data

    def conj_t(self) -> "Mat":
        return Mat(self._data.conj().T, hermitian_certified=self.hermitian_certified)

    def __repr__(self):
        tag = ", hermitian" if self.hermitian_certified else ""
        return f"Mat({self.rows}x{self.cols}{tag})"

    def __eq__(self, other):
        return isinstance(other, Mat) and np.array_equal(self._data, other._data)

    # -- constructors --------------------------------------------------------

    @staticmethod
    def identity(n: int) -> "Mat":
        return Mat(np.eye(n, dtype=np.complex128), hermitian_certified=True)

    @staticmethod
    def zeros(rows: int, cols: Optional[int] = None) -> "Mat":
        cols = rows if cols is None else cols
        m = Mat(np.zeros((rows, cols), dtype=np.complex128))
        return m

    @staticmethod
    def diag(values) -> "Mat":
        values = np.asarray(values, dtype=np.complex128)
        certified = bool(np.all(values.imag == 0.0))
        return Mat(np.diag(values), hermitian_certified=certified)


def _as_array(m) -> np.ndarray:
    return m.to_array() if isinstance(m, Mat) else np.asarray(m, dtype=np.complex128)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OpReport:
    """Evaluated error-bound certificate attached to a primitive's output."""

    op_name: str
    bound_claimed: float
    precision_used: PrecisionBudget

    def __post_init__(self):
        if self.bound_claimed < 0.0:
            raise PreconditionError("bound_claimed must be nonnegative")

    def as_dict(self) -> dict:
        return {
            "op": self.op_name,
            "bound_claimed": self.bound_claimed,
            "precision_bits": float(self.precision_used.bits),
            "precision_source": self.precision_used.source,
        }


def norm_estimate(a, iters: int = _NORM_EST_ITERS, seed: int = _NORM_EST_SEED) -> float:
    """Spectral norm estimate by fixed-seed power iteration.

    An estimate for reporting only; correctness statements in the tests use
    the independent reference routines instead.
    """
    arr = _as_array(a)
    if arr.size == 0:
        return 0.0
    rng = philox(seed, "norm_est", arr.shape[0], arr.shape[1])
    v = rng.standard_normal(arr.shape[1]) + 1j * rng.standard_normal(arr.shape[1])
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return 0.0
    v = v / nv
    sigma = 0.0
    for _ in range(iters):
        w = arr @ v
        v2 = arr.conj().T @ w
        n2 = np.linalg.norm(v2)
        if n2 == 0.0 or not np.isfinite(n2):
            break
        sigma = math.sqrt(n2)
        v = v2 / n2
    return float(sigma)


# ---------------------------------------------------------------------------
# Multiplication backends
# ---------------------------------------------------------------------------

def _matmul_classical(a: np.ndarray, b: np.ndarray, budget: PrecisionBudget) -> np.ndarray:
    if not fparith._is_strict(budget):
        return a @ b
    # One rounded multiply and one rounded add per scalar operation, with a
    # fixed accumulation order over the inner index.
    m, k = a.shape
    _, n = b.shape
    acc = np.zeros((m, n), dtype=np.complex128)
    for t in range(k):
        prod = fparith.fl_mul(a[:, t][:, None], b[t, :][None, :], budget)
        if t == 0:
            acc = np.asarray(prod, dtype=np.complex128)
        else:
            acc = fparith.fl_add(acc, prod, budget)
    return acc


def _matmul_strassen(a: np.ndarray, b: np.ndarray, budget: PrecisionBudget) -> np.ndarray:
    n = a.shape[0]
    if n <= _STRASSEN_BASE or n % 2 == 1:
        return _matmul_classical(a, b, budget)
    h = n // 2
    a11, a12, a21, a22 = a[:h, :h], a[:h, h:], a[h:, :h], a[h:, h:]
    b11, b12, b21, b22 = b[:h, :h], b[:h, h:], b[h:, :h], b[h:, h:]
    add = lambda x, y: fparith.fl_add(x, y, budget)
    sub = lambda x, y: fparith.fl_sub(x, y, budget)
    rec = lambda x, y: _matmul_strassen(x, y, budget)
    m1 = rec(add(a11, a22), add(b11, b22))
    m2 = rec(add(a21, a22), b11)
    m3 = rec(a11, sub(b12, b22))
    m4 = rec(a22, sub(b21, b11))
    m5 = rec(add(a11, a12), b22)
    m6 = rec(sub(a21, a11), add(b11, b12))
    m7 = rec(sub(a12, a22), add(b21, b22))
    c = np.empty((n, n), dtype=np.complex128)
    c[:h, :h] = add(sub(add(m1, m4), m5), m7)
    c[:h, h:] = add(m3, m5)
    c[h:, :h] = add(m2, m4)
    c[h:, h:] = add(add(sub(m1, m2), m3), m6)
    return c


def _pad_pow2(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    size = 1 << (n - 1).bit_length()
    if size == n:
        return x
    out = np.zeros((size, size), dtype=np.complex128)
    out[:n, :n] = x
    return out


def matmul_raw(
    a: np.ndarray,
    b: np.ndarray,
    budget: PrecisionBudget = NATIVE,
    backend: str = "classical",
) -> np.ndarray:
    """Product of two raw arrays under the given budget, no report."""
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatchError(
            f"inner dimensions disagree: {a.shape} x {b.shape}"
        )
    if backend == "classical":
        return _matmul_classical(a, b, budget)
    if backend == "strassen":
        if a.shape[0] == a.shape[1] == b.shape[1] and a.shape[0] > _STRASSEN_BASE:
            n = a.shape[0]
            c = _matmul_strassen(_pad_pow2(a), _pad_pow2(b), budget)
            return np.ascontiguousarray(c[:n, :n])
        return _matmul_classical(a, b, budget)
    raise PreconditionError(f"unknown multiply backend {backend!r}")


def mm(
    a: Mat,
    b: Mat,
    budget: PrecisionBudget = NATIVE,
    backend: str = "classical",
    consts: StabilityConstants = DEFAULT_CONSTANTS,
) -> tuple[Mat, OpReport]:
    """Matrix product with its evaluated stability bound.

    The claimed bound is mu_mm(n) * u * ||A|| * ||B|| with power-iteration
    norm estimates; n is the largest participating dimension.
    """
    c = matmul_raw(_as_array(a), _as_array(b), budget, backend)
    n = max(a.rows, a.cols, b.cols)
    u = budget.u if budget.u is not None else 0.0
    bound = consts.mu_mm(n, subcubic=(backend == "strassen")) * u * norm_estimate(
        a
    ) * norm_estimate(b)
    return Mat(c), OpReport("mm", bound, budget)


# ---------------------------------------------------------------------------
# Symmetrization
# ---------------------------------------------------------------------------

def herm(a: Mat) -> Mat:
    """Replace the strictly lower triangle with the conjugate upper triangle.

    The diagonal keeps its real part only.  The output is always
    Hermitian-certified; entries are unchanged selections/conjugations, so
    no rounding occurs at any precision.
    """
    if not a.is_square:
        raise NotHermitianError("herm requires a square matrix")
    arr = a.to_array()
    upper = np.triu(arr, k=1)
    out = upper + upper.conj().T + np.diag(arr.diagonal().real.astype(np.complex128))
    return Mat(out, hermitian_certified=True)


def herm_mm(
    a: Mat,
    b: Mat,
    budget: PrecisionBudget = NATIVE,
    backend: str = "classical",
    consts: StabilityConstants = DEFAULT_CONSTANTS,
) -> Mat:
    """Symmetrized product for operands whose exact product is Hermitian."""
    c, _ = mm(a, b, budget, backend, consts)
    return herm(c)


# ---------------------------------------------------------------------------
# Inversion by recursive Schur complements
# ---------------------------------------------------------------------------

def _inv_raw(x: np.ndarray, budget: PrecisionBudget) -> np.ndarray:
    n = x.shape[0]
    if n == 1:
        v = x[0, 0]
        if v == 0.0:
            raise SingularMatrixError("singular to working precision")
        r = fparith.fl_div(np.asarray(1.0 + 0.0j), np.asarray(v), budget)
        r = np.asarray(r, dtype=np.complex128).reshape(1, 1)
        if not np.all(np.isfinite(r)):
            raise SingularMatrixError("singular to working precision")
        return r
    h = n // 2
    a, b = x[:h, :h], x[:h, h:]
    c, d = x[h:, :h], x[h:, h:]
    ai = _inv_raw(a, budget)
    cai = _matmul_classical(c, ai, budget)
    s = fparith.fl_sub(d, _matmul_classical(cai, b, budget), budget)
    si = _inv_raw(np.asarray(s, dtype=np.complex128), budget)
    aib = _matmul_classical(ai, b, budget)
    t = _matmul_classical(aib, si, budget)  # A^-1 B S^-1
    tl = fparith.fl_add(ai, _matmul_classical(t, cai, budget), budget)
    out = np.empty((n, n), dtype=np.complex128)
    out[:h, :h] = tl
    out[:h, h:] = -t
    out[h:, :h] = -_matmul_classical(si, cai, budget)
    out[h:, h:] = si
    if not np.all(np.isfinite(out)):
        raise SingularMatrixError("singular to working precision")
    return out


def inv(
    a: Mat,
    budget: PrecisionBudget = NATIVE,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
) -> tuple[Mat, OpReport]:
    """Inverse via recursive 2x2 block Schur complements.

    The report's claimed bound is mu_inv(n) * u * kappa^(c_inv * log2 n)
    * ||A^-1||, with kappa estimated from power-iteration norms of the
    input and the computed inverse.
    """
    if not a.is_square:
        raise DimensionMismatchError("inv requires a square matrix")
    c = _inv_raw(a.to_array(), budget)
    n = a.rows
    norm_a = norm_estimate(a)
    norm_ainv = norm_estimate(c)
    kappa = max(1.0, norm_a * norm_ainv)
    u = budget.u if budget.u is not None else 0.0
    log_n = max(1.0, math.log2(max(n, 2)))
    exponent = consts.c_inv * log_n
    # kappa^exponent overflows fast; clamp the report to the float range
    log_bound = (
        math.log2(consts.mu_inv(n)) + exponent * math.log2(kappa) + math.log2(max(u, 1e-300))
        + math.log2(max(norm_ainv, 1e-300))
    )
    bound = float("inf") if log_bound > 1020 else consts.mu_inv(n) * u * kappa**exponent * norm_ainv
    return Mat(c), OpReport("inv", bound, budget)


def herm_inv(
    a: Mat,
    budget: PrecisionBudget = NATIVE,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
) -> Mat:
    """Symmetrized inverse of a Hermitian matrix."""
    if not a.hermitian_certified:
        raise NotHermitianError("herm_inv requires a Hermitian-certified input")
    c, _ = inv(a, budget, consts)
    return herm(c)
