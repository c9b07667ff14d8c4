"""Exception hierarchy shared by every module of the package."""


class PropmineError(Exception):
    """Base class for all package errors."""


class InvalidSelection(PropmineError, ValueError):
    """A selection names elements outside the dataset universes."""


class UndefinedCoverage(PropmineError, ZeroDivisionError):
    """Coverage requested for a subject that owns no triplet."""


class UndefinedDensity(PropmineError, ZeroDivisionError):
    """Density requested over a block with no cells."""


class MalformedPredicate(PropmineError, ValueError):
    """A predicate constrains the subject dimension or is otherwise ill-formed."""


class UnsupportedThresholdForm(PropmineError, ValueError):
    """Thresholded propositions only accept positive block predicates."""


class InvalidCut(PropmineError, ValueError):
    """A cut subset is empty or spans the whole universe."""


class InvalidPartition(PropmineError, ValueError):
    """Color classes overlap or do not cover the universe."""


class BudgetExceeded(PropmineError, RuntimeError):
    """Exhaustive enumeration would exceed the configured budget."""


class InternalInvariantError(PropmineError, AssertionError):
    """An invariant that the algorithms guarantee was violated."""


class DataError(PropmineError, ValueError):
    """Input data could not be parsed.

    ``line`` is the 1-based line number of the offending row, when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class PropositionSyntaxError(PropmineError, ValueError):
    """Proposition text could not be parsed; ``pos`` is the 0-based offset."""

    def __init__(self, message, text, pos):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos
