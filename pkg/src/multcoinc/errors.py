"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """A precondition of an operation was violated."""


class BudgetExceeded(RuntimeError):
    """A requested computation exceeds the configured cost guard."""
