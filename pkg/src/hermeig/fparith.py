"""Floating-point precision emulation and machine-precision budgets.

The library runs every matrix algorithm either at native double precision
or at an emulated mantissa width.  Emulation rounds the real and imaginary
parts of every scalar add, subtract, multiply, divide, and square root to
the requested number of significand bits (round-to-nearest, ties to even);
fused operations are never used in emulated mode.

The ``budget_*`` functions evaluate the closed-form machine-precision
requirements of the individual algorithms so callers can compare a running
precision against them.  All logarithms are base 2, consistent with bit
counting.  Several of these bounds are far below what any hardware float
can represent; in that case the budget stores a bit count only and its
unit roundoff is ``None``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import BudgetInfeasibleError, PreconditionError, PrecisionOverflowError

NATIVE_BITS = 53
_UNDERFLOW_BITS = 1000.0  # beyond this, store bits only


# ---------------------------------------------------------------------------
# Precision budgets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrecisionBudget:
    """A unit roundoff ``u`` together with its bit count.

    ``source`` is one of ``"native"``, ``"emulated"``, or ``"theorem"``.
    Theorem budgets are requirements produced by the ``budget_*`` functions;
    they are not runnable precisions themselves.  When a theorem's ``u``
    underflows the representable range, ``u`` is ``None`` and only ``bits``
    is meaningful.
    """

    u: Optional[float]
    bits: float
    source: str = "native"
    theorem: Optional[str] = None

    def __post_init__(self):
        if self.source not in ("native", "emulated", "theorem"):
            raise PreconditionError(f"unknown budget source {self.source!r}")
        if self.bits < 2:
            raise PreconditionError("a precision budget needs at least 2 bits")
        if self.u is not None:
            if not (self.u > 0.0):
                raise PreconditionError("unit roundoff must be positive")
            if self.source == "emulated" and self.u > 2.0 ** (1 - self.bits):
                raise PreconditionError("u exceeds 2^(1-bits)")

    @staticmethod
    def native() -> "PrecisionBudget":
        return PrecisionBudget(u=2.0**-NATIVE_BITS, bits=NATIVE_BITS, source="native")

    @staticmethod
    def emulated(bits: int) -> "PrecisionBudget":
        """Emulated budget with a ``bits``-bit significand (implicit bit included)."""
        bits = int(bits)
        if bits < 2:
            raise PreconditionError("emulated mantissa needs at least 2 bits")
        if bits > NATIVE_BITS:
            raise PreconditionError(
                f"cannot emulate more than {NATIVE_BITS} significand bits on doubles"
            )
        return PrecisionBudget(u=2.0**-bits, bits=bits, source="emulated")

    @staticmethod
    def from_theorem(name: str, log2_inv_u: float) -> "PrecisionBudget":
        """Build a theorem budget from ``log2(1/u)``."""
        bits = max(2.0, math.ceil(log2_inv_u))
        u = 2.0**-log2_inv_u if log2_inv_u < _UNDERFLOW_BITS else None
        return PrecisionBudget(u=u, bits=bits, source="theorem", theorem=name)

    @property
    def is_native(self) -> bool:
        return self.source == "native"

    @property
    def is_emulated(self) -> bool:
        return self.source == "emulated"

    def runnable(self) -> bool:
        """Whether matrix kernels can actually execute at this budget."""
        return self.source == "native" or (
            self.source == "emulated" and 2 <= self.bits <= NATIVE_BITS
        )

    def satisfies(self, requirement: "PrecisionBudget") -> bool:
        """True when this running precision meets a theorem requirement."""
        if requirement.u is None:
            return False
        if self.u is None:
            return False
        return self.u <= requirement.u

    def require(self, requirement: "PrecisionBudget", context: str) -> None:
        if not self.satisfies(requirement):
            raise BudgetInfeasibleError(
                f"budget infeasible for {context}: running u={self.u!r} "
                f"exceeds required u={requirement.u!r} "
                f"({requirement.bits:.0f} bits needed)"
            )


NATIVE = PrecisionBudget.native()


# ---------------------------------------------------------------------------
# Stability constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StabilityConstants:
    """The constant family parameterizing every error bound.

    ``c_n`` is the Gaussian-sampler stability constant, ``c_inv`` the
    inversion exponent constant (upper bound 8), and ``c_herm`` the
    symmetrization constant.  ``mm_exponent`` fixes mu_mm(n) = n**mm_exponent
    for the default (classical) multiply backend; the sub-cubic backend uses
    ``mm_exponent_subcubic``.  The Cholesky and eigenproblem-transform
    budget constants (c1, c2, c3) and (rho1, rho2, rho3) default to
    conservative placeholders and are overridable via configuration.
    """

    c_n: float = 1.0
    c_inv: float = 8.0
    c_herm: float = 2.0
    mm_exponent: float = 2.0
    mm_exponent_subcubic: float = 2.2
    chol_c1: float = 1.0e3
    chol_c2: float = 3.0
    chol_c3: float = 20.0
    transh_rho1: float = 1.0e3
    transh_rho2: float = 3.0
    transh_rho3: float = 20.0

    def __post_init__(self):
        for name in ("c_n", "c_inv", "c_herm"):
            if getattr(self, name) < 1.0:
                raise PreconditionError(f"{name} must be >= 1")

    def mu_mm(self, n: int, subcubic: bool = False) -> float:
        exp = self.mm_exponent_subcubic if subcubic else self.mm_exponent
        return max(1.0, float(n) ** exp)

    def mu_inv(self, n: int) -> float:
        # classical multiply exponent plus the log2(10) inflation of the
        # logarithmically-stable inversion contract
        return max(1.0, float(n) ** (self.mm_exponent + math.log2(10.0)))

    def mu(self, n: int) -> float:
        """Global upper bound dominating mu_mm, c_herm*log2(n)*mu_mm, mu_inv."""
        log_n = max(1.0, math.log2(max(n, 2)))
        return max(
            self.mu_mm(n),
            self.c_herm * log_n * self.mu_mm(n),
            self.mu_inv(n),
        )

    def with_overrides(self, **kwargs) -> "StabilityConstants":
        return replace(self, **kwargs)

    @staticmethod
    def from_mapping(mapping: dict) -> "StabilityConstants":
        return StabilityConstants(**mapping)


DEFAULT_CONSTANTS = StabilityConstants()


# ---------------------------------------------------------------------------
# Rounding
# ---------------------------------------------------------------------------

def _round_real(x: np.ndarray, bits: int) -> np.ndarray:
    """Round a real array to ``bits`` significand bits, nearest, ties to even.

    Works through frexp/ldexp so the result is exact for every finite input:
    the significand is scaled to an integer range, rounded by ``rint``, and
    scaled back without further rounding.
    """
    if bits >= NATIVE_BITS:
        return np.asarray(x, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    m, e = np.frexp(x)
    r = np.rint(np.ldexp(m, bits))
    return np.ldexp(r, e - bits)


def round_array(x: np.ndarray, budget: PrecisionBudget) -> np.ndarray:
    """Round every entry (real and imaginary part) at the budget's width."""
    if not budget.runnable():
        raise BudgetInfeasibleError("budget infeasible: not a runnable precision")
    x = np.asarray(x)
    if budget.is_native or budget.bits >= NATIVE_BITS:
        return x.astype(np.complex128 if np.iscomplexobj(x) else np.float64, copy=False)
    bits = int(budget.bits)
    if np.iscomplexobj(x):
        out = _round_real(x.real, bits) + 1j * _round_real(x.imag, bits)
    else:
        out = _round_real(x, bits)
    if not np.all(np.isfinite(np.atleast_1d(out))) and np.all(
        np.isfinite(np.atleast_1d(x))
    ):
        raise PrecisionOverflowError("precision overflow")
    return out


def round_to(x: complex, budget: PrecisionBudget) -> complex:
    """Round a scalar to the budget's mantissa width (native budgets pass through)."""
    if not np.isfinite(complex(x).real) or not np.isfinite(complex(x).imag):
        raise PreconditionError("round_to requires a finite input")
    out = round_array(np.asarray(complex(x)), budget)
    z = complex(out)
    return z if isinstance(x, complex) or z.imag != 0.0 else z.real


# ---------------------------------------------------------------------------
# Emulated elementary operations
#
# Each fl_* helper applies one rounding per scalar floating-point operation,
# decomposing complex arithmetic into its real constituents.  At a native
# budget they reduce to the plain numpy operation.
# ---------------------------------------------------------------------------

def _is_strict(budget: PrecisionBudget) -> bool:
    return budget.is_emulated and budget.bits < NATIVE_BITS


def fl_add(x, y, budget: PrecisionBudget):
    if not _is_strict(budget):
        return x + y
    return round_array(np.asarray(x) + np.asarray(y), budget)


def fl_sub(x, y, budget: PrecisionBudget):
    if not _is_strict(budget):
        return x - y
    return round_array(np.asarray(x) - np.asarray(y), budget)


def fl_mul(x, y, budget: PrecisionBudget):
    if not _is_strict(budget):
        return x * y
    x = np.asarray(x)
    y = np.asarray(y)
    if not (np.iscomplexobj(x) or np.iscomplexobj(y)):
        return round_array(x * y, budget)
    xr, xi = np.real(x), np.imag(x)
    yr, yi = np.real(y), np.imag(y)
    rr = round_array(xr * yr, budget)
    ii = round_array(xi * yi, budget)
    ri = round_array(xr * yi, budget)
    ir = round_array(xi * yr, budget)
    re = round_array(rr - ii, budget)
    im = round_array(ri + ir, budget)
    return re + 1j * im


def fl_div(x, y, budget: PrecisionBudget):
    if not _is_strict(budget):
        return x / y
    x = np.asarray(x)
    y = np.asarray(y)
    if not (np.iscomplexobj(x) or np.iscomplexobj(y)):
        return round_array(x / y, budget)
    xr, xi = np.real(x), np.imag(x)
    yr, yi = np.real(y), np.imag(y)
    den = round_array(
        round_array(yr * yr, budget) + round_array(yi * yi, budget), budget
    )
    nr = round_array(
        round_array(xr * yr, budget) + round_array(xi * yi, budget), budget
    )
    ni = round_array(
        round_array(xi * yr, budget) - round_array(xr * yi, budget), budget
    )
    return round_array(nr / den, budget) + 1j * round_array(ni / den, budget)


def fl_sqrt(x, budget: PrecisionBudget):
    """Square root of a nonnegative real quantity under the budget."""
    if not _is_strict(budget):
        return np.sqrt(x)
    return round_array(np.sqrt(np.asarray(x, dtype=np.float64)), budget)


def fl_scale_pow2(x, factor: float):
    """Multiply by an exact power of two (no rounding at any width)."""
    return np.asarray(x) * factor


# ---------------------------------------------------------------------------
# Budget formulas
# ---------------------------------------------------------------------------

def budget_shatterh(
    n: int, gamma: float, consts: StabilityConstants = DEFAULT_CONSTANTS
) -> PrecisionBudget:
    """Precision required by Hermitian shattering at perturbation scale gamma."""
    if n < 2:
        raise PreconditionError("shattering needs n >= 2")
    if not (0.0 < gamma < 0.5):
        raise PreconditionError("gamma must lie in (0, 1/2)")
    u = gamma / (152.0 * (2.0 * consts.c_n + 1.0) * float(n) ** 3.5)
    return PrecisionBudget(
        u=u, bits=math.ceil(math.log2(1.0 / u)), source="theorem", theorem="SHATTERH"
    )


def sgn_iterations(alpha: float, delta: float, eps: float) -> int:
    """Newton iteration count for the sign function at the given parameters."""
    if not (0.0 < 1.0 - alpha < 1.0 / 100.0):
        raise PreconditionError("alpha out of range: need 0 < 1 - alpha < 1/100")
    if not (0.0 < delta < 1.0 / 12.0):
        raise PreconditionError("delta must lie in (0, 1/12)")
    if not (0.0 < eps < 1.0):
        raise PreconditionError("eps must lie in (0, 1)")
    la = math.log2(1.0 / (1.0 - alpha))
    return math.ceil(
        la + 3.0 * math.log2(la) + math.log2(math.log2(1.0 / (delta * eps))) + 7.79
    )


def budget_sgn(
    n: int,
    alpha: float,
    delta: float,
    eps: float,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
) -> tuple[PrecisionBudget, int]:
    """Precision and iteration count for the Newton sign iteration.

    The raw unit roundoff value underflows native floats for every
    interesting parameter choice, so the budget usually carries only the
    bit count, computed exactly in log space.
    """
    iters = sgn_iterations(alpha, delta, eps)
    log2_inv_u = (
        -(2.0 ** (iters + 1))
        * (consts.c_inv * math.log2(max(n, 2)) + 3.0)
        * math.log2(alpha)
        + math.log2(consts.mu_inv(n) * math.sqrt(n) * iters)
    )
    return PrecisionBudget.from_theorem("SGN", log2_inv_u), iters


def budget_chol(
    n: int,
    kappa: float,
    eps: float,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
) -> PrecisionBudget:
    """Precision for the recursive Cholesky at condition number kappa."""
    if kappa < 1.0:
        raise PreconditionError("kappa must be >= 1")
    if not (0.0 < eps < 1.0):
        raise PreconditionError("eps must lie in (0, 1)")
    log_n = math.log2(n) if n > 1 else 0.0
    log2_inv_u = (
        math.log2(consts.chol_c1)
        + consts.chol_c2 * log_n
        + consts.chol_c3 * log_n * math.log2(kappa)
        + math.log2(1.0 / eps)
    )
    return PrecisionBudget.from_theorem("CHOL", log2_inv_u)


def budget_transh(
    n: int,
    kappa_s: float,
    eps: float,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
) -> PrecisionBudget:
    """Precision for the generalized-to-Hermitian eigenproblem transform."""
    if kappa_s < 1.0:
        raise PreconditionError("kappa_s must be >= 1")
    if not (0.0 < eps < 1.0):
        raise PreconditionError("eps must lie in (0, 1)")
    log_n = math.log2(n) if n > 1 else 0.0
    log2_inv_u = (
        math.log2(consts.transh_rho1)
        + consts.transh_rho2 * log_n
        + consts.transh_rho3 * log_n * math.log2(kappa_s)
        + math.log2(1.0 / eps)
    )
    return PrecisionBudget.from_theorem("TRANSH", log2_inv_u)


def budget_evalsh(
    n: int, eps: float, consts: StabilityConstants = DEFAULT_CONSTANTS
) -> PrecisionBudget:
    """Bit requirement of one gap-independent eigenvalue run at accuracy eps.

    Evaluated with unit constants: log2(n/eps)^4 * log2(n).  Used by the
    adaptive relative-error loops to notice when the configured bit ceiling
    would be exceeded.
    """
    if not (0.0 < eps):
        raise PreconditionError("eps must be positive")
    log_term = math.log2(max(n, 2) / eps)
    log2_inv_u = log_term**4 * math.log2(max(n, 2))
    return PrecisionBudget.from_theorem("EVALSH", log2_inv_u)
