"""Exception types shared across the library, mapped to CLI exit codes."""

EXIT_OK = 0
EXIT_INVALID_ARGUMENT = 2
EXIT_NUMERICAL = 3
EXIT_RESOURCE = 4


class KerlapError(Exception):
    """Base class for all library errors."""

    exit_code = EXIT_NUMERICAL


class InvalidArgumentError(KerlapError, ValueError):
    """Caller passed inputs that violate a documented precondition."""

    exit_code = EXIT_INVALID_ARGUMENT


class SingularPencilError(KerlapError):
    """The second pencil matrix is not positive definite (even after jitter)."""

    exit_code = EXIT_NUMERICAL

    def __init__(self, message: str, pivot: int | None = None):
        super().__init__(message)
        self.pivot = pivot


class NumericalConsistencyError(KerlapError):
    """A computed quantity failed a consistency check it is contracted to meet."""

    exit_code = EXIT_NUMERICAL


class ResourceLimitError(KerlapError):
    """A configured resource cap (e.g. the dense basis cap) was exceeded."""

    exit_code = EXIT_RESOURCE
