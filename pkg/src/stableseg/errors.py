"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class StableSegError(Exception):
    """Base class for all errors raised by stableseg."""


class ValidationError(StableSegError, ValueError):
    """An object violates one of its structural invariants."""


class EmptyCoalition(ValidationError):
    pass


class NegativeMass(ValidationError):
    pass


class InvalidSegment(ValidationError):
    """The price of a segment is not optimal for its coalition."""


class PartitionError(ValidationError):
    """Segment coalitions do not add up to the market."""


class PlanError(ValidationError):
    """Transport plan marginals do not match its segmentations."""


class WrongArity(StableSegError, ValueError):
    pass


class NotApplicable(StableSegError):
    pass


class EmptyCore(StableSegError):
    pass


class NotBlocking(StableSegError):
    pass


class MalformedChain(ValidationError):
    def __init__(self, message: str, step: int | None = None) -> None:
        self.step = step
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)


class CapExceeded(StableSegError):
    pass


class ParseError(StableSegError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
