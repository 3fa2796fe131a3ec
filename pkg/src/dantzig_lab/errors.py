"""Exception types raised across the package."""


class DantzigLabError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(DantzigLabError):
    """Base class for failures of a numerical routine (CLI exit code 2)."""


class ZeroColumnError(DantzigLabError, ValueError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column} is identically zero")


class IndexOutOfRangeError(DantzigLabError, IndexError):
    pass


class NotSymmetricError(DantzigLabError, ValueError):
    pass


class InvalidSpecError(DantzigLabError, ValueError):
    pass


class InvalidArgsError(DantzigLabError, ValueError):
    pass


class RankDeficientError(NumericalError):
    def __init__(self, subset, message=None):
        self.subset = tuple(int(i) for i in subset)
        super().__init__(message or f"design restricted to {self.subset} is rank deficient")


class NumericalFailure(NumericalError):
    pass


class DegenerateFitError(NumericalError):
    pass


class DegenerateFoldError(NumericalError):
    pass


class DegenerateCoefficientError(DantzigLabError, ZeroDivisionError):
    pass


class BudgetExceededError(DantzigLabError):
    """Raised when an exact subset enumeration would exceed its cap."""

    def __init__(self, count, budget):
        self.count = int(count)
        self.budget = int(budget)
        super().__init__(f"enumeration of {self.count} subsets exceeds budget {self.budget}")
