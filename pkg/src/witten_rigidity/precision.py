"""Precision configuration, the modular parameter and complex-number parsing.

All evaluation happens in :mod:`mpmath` at ``digits + GUARD_DIGITS`` decimal
digits; results are meaningful to ``digits``.
"""
from __future__ import annotations

import math
import re
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Union

import mpmath
from mpmath import mp

from .errors import DomainError

GUARD_DIGITS = 15

ComplexLike = Union[str, int, float, complex, "mpmath.mpc", "mpmath.mpf"]

_IMAG_UNIT = re.compile(r"(?<![A-Za-z])[ij](?![A-Za-z])")


def parse_complex(value: ComplexLike) -> mpmath.mpc:
    """Parse a decimal string such as ``"0.3+0.8i"``, ``"i"`` or ``"-2j"``.

    Strings are parsed at the current working precision, so
    ``"0.1"`` is the decimal 0.1 and not its binary float approximation.
    """
    if isinstance(value, mpmath.mpc):
        return value
    if isinstance(value, (mpmath.mpf, int)):
        return mpmath.mpc(value)
    if isinstance(value, float):
        return mpmath.mpc(repr(value))
    if isinstance(value, complex):
        return mpmath.mpc(repr(value.real), repr(value.imag))
    if not isinstance(value, str):
        raise TypeError(f"cannot parse {value!r} as a complex number")
    text = value.strip().replace(" ", "")
    if not text:
        raise DomainError("empty complex literal")
    # mpmath wants a trailing 'j' with an explicit coefficient
    text = re.sub(r"(^|[+\-])([ij])", r"\g<1>1\2", text)
    text = _IMAG_UNIT.sub("j", text)
    text = text.replace("*j", "j")
    try:
        return mpmath.mpc(mpmath.mpmathify(text))
    except (ValueError, TypeError) as exc:
        raise DomainError(f"cannot parse complex literal {value!r}") from exc


@dataclass(frozen=True)
class PrecisionConfig:
    """Decimal precision ``digits`` and an optional fixed product order.

    With ``product_order=None`` the order is chosen per evaluation so that
    the neglected tail of every theta product is below ``10**-(digits+10)``.
    """

    digits: int = 60
    product_order: int | None = None
    max_jet_degree: int = 24

    def __post_init__(self):
        if self.digits < 1:
            raise DomainError("digits must be positive")
        if self.product_order is not None and self.product_order < 1:
            raise DomainError("product_order must be positive")

    @property
    def working_digits(self) -> int:
        return self.digits + GUARD_DIGITS

    def doubled(self, order: int) -> "PrecisionConfig":
        return PrecisionConfig(self.digits, 2 * order, self.max_jet_degree)

    def tolerance(self, headroom: int = 10):
        """``10**-(digits - headroom)`` as an mpf."""
        return mpmath.mpf(10) ** (-(self.digits - headroom))


DEFAULT_PRECISION = PrecisionConfig()


@contextmanager
def working_precision(cfg: PrecisionConfig):
    """Raise mpmath's precision to the config's working digits (never lower it)."""
    dps = max(mp.dps, cfg.working_digits)
    with mp.workdps(dps):
        yield


class Tau:
    """A point of the upper half plane together with both nome conventions.

    ``q_full = exp(2 pi i tau)`` is the nome of the product definitions;
    ``q_half = exp(pi i tau)`` is the nome printed in the quasi-periodicity
    table. Only ``q_full`` feeds the internal series.
    """

    __slots__ = ("_source",)

    def __init__(self, value: ComplexLike | "Tau"):
        if isinstance(value, Tau):
            value = value._source
        self._source = value
        if self.value.imag <= 0:
            raise DomainError(f"tau must lie in the upper half plane, got {value!r}")

    @property
    def value(self) -> mpmath.mpc:
        return parse_complex(self._source)

    @property
    def q_full(self) -> mpmath.mpc:
        return mpmath.exp(2j * mpmath.pi * self.value)

    @property
    def q_half(self) -> mpmath.mpc:
        return mpmath.exp(1j * mpmath.pi * self.value)

    @property
    def q_eighth(self) -> mpmath.mpc:
        """The branch ``q^{1/8} = exp(pi i tau / 4)`` used by the theta prefactors."""
        return mpmath.exp(1j * mpmath.pi * self.value / 4)

    def s_image(self) -> "Tau":
        return Tau(-1 / self.value)

    def t_image(self) -> "Tau":
        return Tau(self.value + 1)

    def __repr__(self):
        return f"Tau({mpmath.nstr(self.value, 15)})"

    def __eq__(self, other):
        return isinstance(other, Tau) and self.value == other.value

    def __hash__(self):
        return hash(complex(self.value))


def product_order(cfg: PrecisionConfig, tau: Tau, v_imag=0) -> int:
    """Number of product factors needed for ``cfg`` at ``tau``.

    ``v_imag`` is the imaginary part of the theta argument; factors
    ``exp(+-2 pi i v) q^j`` only start to decay once ``j Im(tau) > |Im v|``.
    """
    if cfg.product_order is not None:
        return cfg.product_order
    im_tau = float(tau.value.imag)
    target = (cfg.digits + 10) * math.log(10)
    n = (target + 2 * math.pi * abs(float(v_imag))) / (2 * math.pi * im_tau)
    return int(math.ceil(n)) + 2
