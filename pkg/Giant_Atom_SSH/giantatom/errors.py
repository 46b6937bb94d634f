class GiantAtomError(Exception):
    """Parent Class for every error raised by the giantatom package."""

    exit_code = 1


class ConfigError(GiantAtomError):
    """Invalid user configuration. The message names the offending field."""

    exit_code = 2

    def __init__(self, message: str, field: str = None):
        """
        Constructor.

        :param message: Human readable description.
        :param field: Dotted path of the offending field, if known.
        """
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class NumericalError(GiantAtomError):
    """Eigensolver, biorthogonalization or propagation failure."""

    exit_code = 3


class PreconditionError(GiantAtomError):
    """An operation was called outside the regime where it is defined."""

    exit_code = 4
