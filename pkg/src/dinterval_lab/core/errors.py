# src/dinterval_lab/core/errors.py

from typing import List, Sequence


class DIntervalError(Exception):
    """Base class for every error raised by dinterval-lab."""
    pass


class InvalidFamilyError(DIntervalError):
    """Raised when a family or weight system fails validation."""

    def __init__(self, violations: Sequence[object]):
        self.violations: List[object] = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        more = f" (+{len(self.violations) - 5} more)" if len(self.violations) > 5 else ""
        super().__init__(f"invalid family: {lines}{more}")


class SearchBudgetExceededError(DIntervalError):
    """Raised when an exact search exceeds its configured budget. Never a silent approximation."""

    def __init__(self, what: str, budget: int):
        self.what = what
        self.budget = budget
        super().__init__(f"{what} exceeded its budget of {budget}")


class PreconditionError(DIntervalError):
    """Raised when the input of an operation violates its precondition."""
    pass


class GeneratorSizeError(DIntervalError):
    """Raised when a generator would emit more edges than allowed."""
    pass


class GeneratorRejectionError(DIntervalError):
    """Raised when the random generator cannot draw a valid edge within its retries."""
    pass


class BoundViolationError(DIntervalError):
    """Raised when a proven inequality fails. This always indicates an implementation bug."""
    pass
