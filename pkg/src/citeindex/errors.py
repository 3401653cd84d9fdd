"""Exception hierarchy.

Data errors (bad input files, invalid records) map to CLI exit code 2,
numerical failures (degenerate samples, non-convergence) to exit code 3.
"""


class CiteIndexError(Exception):
    exit_code = 2


class DataError(CiteIndexError):
    exit_code = 2


class ParseError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ParseError):
    pass


class DuplicateKeyError(ParseError):
    pass


class NotFoundError(DataError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class EmptyDataError(DataError):
    pass


class NumericalError(CiteIndexError):
    exit_code = 3


class UndefinedIndexError(NumericalError):
    """An index whose denominator is zero."""


class ShapeError(NumericalError, ValueError):
    pass


class DegenerateSampleError(NumericalError):
    pass


class InsufficientDataError(NumericalError):
    pass


class DomainError(NumericalError, ValueError):
    pass


class DisjointSupportError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    """Optimizer ran out of budget; ``best`` holds the best parameters seen."""

    def __init__(self, message, best=None, objective=None):
        super().__init__(message)
        self.best = best
        self.objective = objective
