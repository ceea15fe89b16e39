"""Theta functions, equivariant q-series and rigidity checks for circle actions."""
from .errors import (
    ArityError,
    CaseError,
    DivergenceError,
    DomainError,
    InstanceError,
    InversionError,
    OddDegreeError,
    PoleError,
    PrecisionError,
    QuadratureError,
    RigidityError,
)
from .precision import DEFAULT_PRECISION, PrecisionConfig, Tau, parse_complex

__version__ = "0.1.0"
