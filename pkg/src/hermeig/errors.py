"""Exception hierarchy shared by every module in the package."""


class HermeigError(Exception):
    """Base class for all library errors."""


class PreconditionError(HermeigError, ValueError):
    """An input violates a documented precondition."""


class DimensionMismatchError(PreconditionError):
    """Operand shapes are incompatible."""


class NotHermitianError(PreconditionError):
    """A Hermitian-certified matrix was required."""


class PrecisionOverflowError(HermeigError, OverflowError):
    """Rounding at the requested mantissa width produced a non-finite value."""


class BudgetInfeasibleError(HermeigError):
    """The machine precision does not satisfy the required bound."""


class SingularMatrixError(HermeigError):
    """A matrix is singular to working precision."""


class BreakdownError(HermeigError):
    """A factorization lost positive-definiteness."""


class ConvergenceError(HermeigError):
    """An iterative or probabilistic routine failed after bounded retries."""


class BitBudgetExhaustedError(HermeigError):
    """An adaptive-precision loop would need more bits than allowed."""


EXIT_CODES = {
    PreconditionError: 2,
    BudgetInfeasibleError: 3,
    ConvergenceError: 4,
    BitBudgetExhaustedError: 4,
    SingularMatrixError: 4,
    BreakdownError: 4,
    OSError: 5,
}


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit code convention."""
    for klass, code in EXIT_CODES.items():
        if isinstance(exc, klass):
            return code
    return 1
