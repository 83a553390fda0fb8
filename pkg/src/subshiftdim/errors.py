"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`SubshiftDimError`. The CLI maps the subclasses onto exit codes.
"""


class SubshiftDimError(Exception):
    """Base class for library errors."""

    exit_code = 1


class InputError(SubshiftDimError, ValueError):
    """Malformed or out-of-range input (bad letters, schema violations, ...)."""

    exit_code = 2


class ContractViolation(InputError):
    """A precondition of an operation was not met by the caller."""


class PresentationError(InputError):
    """The presentation cannot be used for the requested operation."""


class EmptyLanguageError(SubshiftDimError):
    """The subshift has no infinite sequences, so pressure is -inf."""

    exit_code = 3


class ConvergenceError(SubshiftDimError, ArithmeticError):
    """An iterative method did not reach its tolerance.

    ``best`` carries the last estimate when one is available.
    """

    exit_code = 4

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ResourceLimitError(SubshiftDimError):
    """An enumeration would exceed the configured word cap."""

    exit_code = 5


class NotApplicableError(SubshiftDimError):
    """The computation is only defined for a different class of input."""

    exit_code = 2


class PresentationWarning(UserWarning):
    """Non-fatal problem with a presentation (e.g. not right-resolving)."""
