"""Exception hierarchy shared by all perigrowth modules.

Two top-level branches matter for the CLI exit-code contract:
`InputError` (bad files, violated guards, blown resource caps -> exit 2)
and `MathError` (a computation that ran fine but failed to certify a
result, e.g. no rational fit at the requested ansatz -> exit 1).
"""


class PerigrowthError(Exception):
    """Base class for all errors raised by this package."""


class InputError(PerigrowthError):
    """Invalid input data or violated precondition."""


class FormatError(InputError):
    """Syntax error in one of the text formats (.pg/.vag/.eqn/.set)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GuardError(InputError):
    """A tractability guard was violated (e.g. too many orbits, huge box)."""


class ResourceLimitError(InputError):
    """A configured resource cap (ball size, cycle count, ...) was exceeded."""


class CoverageError(InputError):
    """Supplied data reaches outside the computed ball, so counts would be wrong."""


class DisjointnessError(InputError):
    """Pieces declared disjoint turned out to overlap on the enumerated set."""


class MathError(PerigrowthError):
    """A verification or certification step failed honestly."""


class NoFitError(MathError):
    """No rational form matched the supplied terms at the given ansatz."""
