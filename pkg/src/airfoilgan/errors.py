"""Exception types raised across the package."""


class AirfoilGanError(ValueError):
    """Base class for all input/domain errors."""


class ParseError(AirfoilGanError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InsufficientDataError(AirfoilGanError):
    pass


class GeometryError(AirfoilGanError):
    pass


class DomainError(AirfoilGanError):
    pass


class SchemaError(AirfoilGanError):
    pass


class UnknownAirfoilError(AirfoilGanError):
    """A record refers to an airfoil id that is not present."""


class NumericalError(ArithmeticError):
    """Training or an update produced a non-finite value."""
