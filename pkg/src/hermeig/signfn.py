"""Matrix sign function by Newton iteration.

The iterate X <- (X + X^-1) / 2 converges to the matrix sign when no
eigenvalue sits on the imaginary axis.  The certified region is a pair of
disks around +-1 (the image of the right and left half-planes under the
Moebius map z -> (1 - z)/(1 + z) at level alpha); the iteration count is a
closed-form function of alpha and the accuracy targets, and the iteration
runs for exactly that count unless early exit is requested.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fparith, matcore
from .errors import ConvergenceError, PreconditionError
from .fparith import NATIVE, DEFAULT_CONSTANTS, PrecisionBudget, StabilityConstants
from .matcore import Mat

__all__ = ["ApolloniusRegion", "SgnResult", "alpha_for_gap", "sgn", "projectors_from_sign"]

GAP_VALIDITY_LIMIT = 17.0 / (6.0 * 199.0)


@dataclass(frozen=True)
class ApolloniusRegion:
    """Paired disks around +-1 certifying the Newton sign iteration."""

    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise PreconditionError("alpha must lie in (0, 1)")

    @property
    def center(self) -> float:
        return (1.0 + self.alpha**2) / (1.0 - self.alpha**2)

    @property
    def radius(self) -> float:
        return 2.0 * self.alpha / (1.0 - self.alpha**2)

    @property
    def inner_edge(self) -> float:
        """Distance of the right disk from the imaginary axis."""
        return (1.0 - self.alpha) / (1.0 + self.alpha)

    def contains(self, z: complex) -> bool:
        if z == -1.0:
            return True  # pole of the Moebius map, interior of the left disk
        m = (1.0 - z) / (1.0 + z)
        am = abs(m)
        return am <= self.alpha or (am > 0.0 and 1.0 / am <= self.alpha)


def alpha_for_gap(gap_estimate: float) -> float:
    """Disk level alpha for a given (small) spectral gap estimate.

    Valid for gap estimates below 17/(6*199); larger inputs must be
    rescaled by the caller (halve the matrix and the gap together).
    """
    if not (0.0 < gap_estimate < GAP_VALIDITY_LIMIT):
        raise PreconditionError(
            "gap too large; rescale input (need 0 < gap < 17/1194)"
        )
    return (17.0 - 6.0 * gap_estimate) / (17.0 + 6.0 * gap_estimate)


@dataclass(frozen=True)
class SgnResult:
    s: Mat
    iterations_run: int
    delta: float
    eps_pseudo: float
    rescale_halvings: int = 0


def _newton_iterations(
    x: np.ndarray,
    count: int,
    budget: PrecisionBudget,
    early_exit_tol: float | None,
) -> tuple[np.ndarray, int]:
    norm0 = np.linalg.norm(x, ord="fro")
    run = 0
    for _ in range(count):
        xi = matcore._inv_raw(x, budget)
        nxt = fparith.fl_scale_pow2(fparith.fl_add(x, xi, budget), 0.5)
        nxt = np.asarray(nxt, dtype=np.complex128)
        run += 1
        if not np.all(np.isfinite(nxt)):
            raise ConvergenceError("iteration diverged")
        if np.linalg.norm(nxt, ord="fro") > 1e12 * max(norm0, 1.0):
            raise ConvergenceError("iteration diverged")
        step = np.linalg.norm(nxt - x, ord="fro")
        x = nxt
        if early_exit_tol is not None and step <= early_exit_tol:
            break
    return x, run


def sgn(
    a: Mat,
    delta: float,
    eps_pseudo: float,
    budget: PrecisionBudget = NATIVE,
    alpha: float | None = None,
    gap_estimate: float | None = None,
    consts: StabilityConstants = DEFAULT_CONSTANTS,
    early_exit: bool = False,
    require_budget: bool = False,
) -> SgnResult:
    """Approximate the matrix sign of ``a`` to accuracy ``delta``.

    The caller certifies, via ``alpha`` directly or via ``gap_estimate``,
    that the eps_pseudo-pseudospectrum stays inside the Apollonius region.
    When only a gap estimate is given, the input is halved until the
    estimate enters the validity range of ``alpha_for_gap``; halving by
    powers of two is exact at any precision and leaves the sign unchanged.
    """
    if not a.is_square:
        raise PreconditionError("sgn requires a square matrix")
    if not (0.0 < delta < 1.0 / 12.0):
        raise PreconditionError("delta must lie in (0, 1/12)")
    if not (0.0 < eps_pseudo < 1.0):
        raise PreconditionError("eps_pseudo must lie in (0, 1)")

    halvings = 0
    x = a.to_array()
    if alpha is None:
        g = 17.0 * eps_pseudo if gap_estimate is None else gap_estimate
        while g >= GAP_VALIDITY_LIMIT:
            x = fparith.fl_scale_pow2(x, 0.5)
            g *= 0.5
            halvings += 1
        alpha = alpha_for_gap(g)

    count = fparith.sgn_iterations(alpha, delta, eps_pseudo)
    if require_budget:
        requirement, _ = fparith.budget_sgn(a.rows, alpha, delta, eps_pseudo, consts)
        budget.require(requirement, "sgn")

    tol = delta / 4.0 if early_exit else None
    s, run = _newton_iterations(np.array(x, dtype=np.complex128), count, budget, tol)
    return SgnResult(
        s=Mat(s),
        iterations_run=run,
        delta=delta,
        eps_pseudo=eps_pseudo,
        rescale_halvings=halvings,
    )


def projectors_from_sign(s: Mat, budget: PrecisionBudget = NATIVE) -> tuple[Mat, Mat]:
    """Spectral projectors (P_plus, P_minus) from an approximate sign matrix."""
    if not s.is_square:
        raise PreconditionError("projectors_from_sign requires a square matrix")
    arr = s.to_array()
    eye = np.eye(s.rows, dtype=np.complex128)
    p_plus = fparith.fl_scale_pow2(fparith.fl_add(eye, arr, budget), 0.5)
    p_minus = fparith.fl_scale_pow2(fparith.fl_sub(eye, arr, budget), 0.5)
    return (
        matcore.herm(Mat(np.asarray(p_plus))),
        matcore.herm(Mat(np.asarray(p_minus))),
    )
