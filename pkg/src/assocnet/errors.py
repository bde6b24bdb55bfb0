"""Exception taxonomy shared by every stage of the toolkit.

Exit codes follow the CLI contract: 2 for configuration problems, 3 for
bad input data, 4 for failures inside a computation.
"""


class AssocnetError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 4


class ConfigError(AssocnetError):
    """Invalid run configuration: missing paths, bad fields, lock conflicts."""

    exit_code = 2


class DataError(AssocnetError):
    """Problem with an input data file. Carries a 1-based line number when known."""

    exit_code = 3

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParseError(DataError):
    """Structurally malformed row (wrong column count, unparseable field)."""


class ValidationError(DataError):
    """Well-formed row that violates a value constraint."""


class ComputeError(AssocnetError):
    """Failure raised by an algorithm (empty network, missing prime, degenerate test)."""

    exit_code = 4
