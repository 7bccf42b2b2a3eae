"""Exception hierarchy shared across the package.

ConfigError maps to CLI exit code 2 (usage / configuration problems),
DataError to exit code 1 (problems with the content of input files).
"""


class GramprofError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(GramprofError):
    """Invalid configuration: bad flag combination, malformed dataset
    description, duplicate targets, missing input path."""


class DataError(GramprofError):
    """Invalid data content: malformed records, mismatched word sets,
    degenerate inputs a metric cannot handle."""


class ConlluParseError(DataError):
    """A token line violating the 10-column layout.

    Carries the 1-based line number so callers can decide whether to
    skip the line or abort.
    """

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number
