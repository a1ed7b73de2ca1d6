"""Exception hierarchy shared by every module."""


class SpecRangeError(Exception):
    """Base class for library errors."""


class NonConvergence(SpecRangeError):
    def __init__(self, message: str, iterations: int):
        super().__init__(f"{message} (after {iterations} iterations)")
        self.iterations = iterations


class DimensionMismatch(SpecRangeError, ValueError):
    pass


class InvalidSpec(SpecRangeError, ValueError):
    pass


class DegenerateRange(SpecRangeError):
    """Raised when a polygon or hull collapses to a point or segment."""


class GridMismatch(SpecRangeError, ValueError):
    pass


class DomainError(SpecRangeError, ValueError):
    pass
