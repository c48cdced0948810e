"""Exception types shared across the package."""


class WalkgenError(Exception):
    """Base class for all errors raised by walkgen."""


class UsageError(WalkgenError, ValueError):
    """Arguments violate an operation's preconditions."""


class NonUnitError(WalkgenError, ZeroDivisionError):
    """Reciprocal requested for a series whose constant term vanishes."""


class NotASquareError(WalkgenError, ValueError):
    """Square root requested for a series (or scalar) that is not a square."""


class InsufficientOrderError(WalkgenError, ValueError):
    """The truncation order is too short for the requested evaluation."""


class ResourceBudgetError(WalkgenError, RuntimeError):
    """A computation would exceed its configured size budget."""


class GraphFormatError(WalkgenError, ValueError):
    """A graph description could not be parsed."""
