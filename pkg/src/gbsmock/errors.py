"""Exception types shared across the package."""


class GBSMockError(Exception):
    """Base class for all package errors."""


class DimensionError(GBSMockError, ValueError):
    """Array shapes or index ranges are inconsistent."""


class DomainError(GBSMockError, ValueError):
    """An input value lies outside its mathematically valid domain."""


class ConditioningError(GBSMockError, ArithmeticError):
    """A matrix factorization failed or an invariant was violated numerically."""


class BudgetError(GBSMockError, RuntimeError):
    """A configured cost budget (click count, subset size, memory) was exceeded."""


class ConvergenceError(GBSMockError, RuntimeError):
    """An iterative solver did not reach its tolerance within the iteration budget."""


class ParseError(GBSMockError, ValueError):
    """A file could not be parsed into a valid record."""


class UsageError(GBSMockError, ValueError):
    """Command-line flags are inconsistent with the chosen subcommand."""
