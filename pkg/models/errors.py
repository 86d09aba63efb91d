"""
Error types raised by the numerics and fixture layers
"""

from typing import Optional


class QDistError(Exception):
    """Base class for every qdist failure"""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual

    def __str__(self) -> str:
        message = super().__str__()
        if self.residual is None:
            return message
        return f"{message} (residual {self.residual:.3e})"


class ValidationError(QDistError):
    """Input violates a documented precondition"""


class NonFiniteValue(ValidationError):
    pass


class NonSquare(ValidationError):
    pass


class NotHermitian(ValidationError):
    pass


class NotPSD(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class InvalidProbability(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class NotTracePreserving(ValidationError):
    pass


class IncompletePOVM(ValidationError):
    pass


class NotUnitary(ValidationError):
    pass


class NotSU2(ValidationError):
    pass


class FixtureError(ValidationError):
    pass


class ConfigurationError(ValidationError):
    pass


class NeverDistinguishable(QDistError):
    """Two unitaries coincide up to a global phase; no copy count helps"""


class UnknownSuite(QDistError):
    pass


class CrossCheckFailed(QDistError):
    """A closed form and its independent check disagree"""
