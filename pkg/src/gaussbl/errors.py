"""Exception types shared across the package."""


class RankError(ValueError):
    """A matrix expected to have full row rank does not."""


class DomainError(ValueError):
    """A scalar argument lies outside the function's domain."""


class StateInvalidError(ValueError):
    """A covariance matrix violates the quantum uncertainty bound."""


class DegeneratePushforwardError(ValueError):
    """B @ alpha @ B.T is numerically singular for a full-row-rank map."""


class NumericalError(RuntimeError):
    """A numerical routine failed to produce a finite, trustworthy value."""


class CapacityError(RuntimeError):
    """Problem size exceeds the configured enumeration capacity."""


class ParseError(ValueError):
    """An input file could not be parsed."""

    def __init__(self, message: str, path=None, line=None):
        self.path = path
        self.line = line
        loc = ""
        if path is not None:
            loc = f"{path}: "
        if line is not None:
            loc += f"line {line}: "
        super().__init__(loc + message)


class KindMismatchError(ParseError):
    """A declared map kind disagrees with the matrix structure."""
