"""Exception types shared across the toolkit."""


class RankstratError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(RankstratError):
    """A configuration value is inconsistent or out of its allowed range."""


class DataError(RankstratError):
    """Input data violates a documented invariant (range, uniqueness, labels)."""


class SchemaError(RankstratError):
    """A required column or field is missing, duplicated, or unknown."""


class ParseError(RankstratError):
    """Input bytes could not be parsed; carries the offending line when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MissingParameter(RankstratError):
    """An operation needed a parameter score that the record does not carry."""


class DimensionError(RankstratError):
    """Sequence lengths do not line up."""


class DegenerateInput(RankstratError):
    """Input is too small or too uniform for the statistic to be defined."""


class InvalidSplit(RankstratError):
    """A split threshold produced an empty child subset."""


class NoSupport(RankstratError):
    """No records of the requested class satisfy the given path conditions."""


class NoPath(RankstratError):
    """The tree has no leaf predicting the requested class."""


class EmptyInput(RankstratError):
    """An emitter was handed nothing to render."""
