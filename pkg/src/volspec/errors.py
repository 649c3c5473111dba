"""Exception types shared across the package."""


class VolspecError(Exception):
    """Base class for all package errors."""


class DomainError(VolspecError, ValueError):
    """An argument lies outside the domain of a formula (e.g. x <= 0)."""


class ConfigError(VolspecError, ValueError):
    """Invalid model or experiment configuration."""


class ParseError(ConfigError):
    """A config file could not be parsed.

    ``line`` and ``field`` point at the offending location when known.
    """

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class NonFiniteError(VolspecError, ArithmeticError):
    """A simulated state became NaN or infinite."""

    def __init__(self, message, step):
        self.step = step
        super().__init__(f"{message} (step {step})")


class TooShortError(VolspecError, ValueError):
    pass


class InsufficientPointsError(VolspecError, ValueError):
    pass


class GridMismatchError(VolspecError, ValueError):
    pass


class EmptyInputError(VolspecError, ValueError):
    pass


class AllZeroError(VolspecError, ValueError):
    pass
