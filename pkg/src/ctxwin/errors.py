"""Exception hierarchy shared across the package."""

from __future__ import annotations


class CtxwinError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CtxwinError):
    """A corpus input could not be parsed.

    Carries the 1-based line number of the offending record when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownClassError(CtxwinError):
    """A sense string does not start with one of the four class labels."""

    def __init__(self, sense: str):
        self.sense = sense
        super().__init__(f"sense {sense!r} has no recognizable class head")


class CorpusInvariantError(CtxwinError):
    """A corpus value violates a structural invariant."""


class ConfigError(CtxwinError):
    """An invalid configuration value or combination."""


class InfeasibleConfigError(ConfigError):
    """A synthetic-corpus request that cannot be satisfied."""


class SchemaError(CtxwinError):
    """A JSONL record violates the documented schema."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TrainingDivergedError(CtxwinError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int, loss: float):
        self.epoch = epoch
        self.loss = loss
        super().__init__(f"non-finite loss {loss!r} at epoch {epoch}")
