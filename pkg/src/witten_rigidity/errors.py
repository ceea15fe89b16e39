"""Exception hierarchy shared by every engine module."""


class RigidityError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(RigidityError, ValueError):
    """An argument lies outside the domain of the function (e.g. Im tau <= 0)."""


class PrecisionError(RigidityError, ArithmeticError):
    """The requested precision cannot be delivered (overflow, lost digits)."""


class PoleError(RigidityError, ZeroDivisionError):
    """Evaluation hit a zero of a theta function sitting in a denominator."""

    def __init__(self, message, *, kind=None, argument=None, component=None):
        super().__init__(message)
        self.kind = kind
        self.argument = argument
        self.component = component


class CaseError(RigidityError, ValueError):
    """Malformed case selector or a case/input combination that makes no sense."""


class ArityError(RigidityError, ValueError):
    """Too few derivatives were supplied for an analytic composition."""


class InversionError(RigidityError, ZeroDivisionError):
    """A series with non-invertible constant term was inverted."""


class DivergenceError(RigidityError, ValueError):
    """An infinite product schedule does not converge below the truncation."""


class QuadratureError(RigidityError, ArithmeticError):
    """Doubling the quadrature order changed the result beyond tolerance."""


class OddDegreeError(RigidityError, ValueError):
    """A product would contain two odd-degree form factors."""


class InstanceError(RigidityError, ValueError):
    """An instance file failed schema or semantic validation."""
