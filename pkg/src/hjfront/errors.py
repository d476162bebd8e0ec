"""Exception types shared across the solver modules."""


class ProblemError(ValueError):
    """Invalid input data: malformed functions, bad intervals, bad problem files."""


class EmptyIntervalError(ProblemError):
    """An operation received an interval [a, b] with a >= b."""


class ConvexityError(ProblemError):
    """An operation requiring convexity received a non-convex function."""


class NumericalError(RuntimeError):
    """A computation failed for numerical reasons rather than bad input."""


class BoxTooSmallError(NumericalError):
    """The fiber box could not be enlarged enough to dominate the saddle region."""


class CollisionBudgetError(NumericalError):
    """Front tracking exceeded its collision budget."""
