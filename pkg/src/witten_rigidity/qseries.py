"""Truncated series in the nome with exponents on the grid (1/8)Z>=0.

Exponents are stored as integer *eighths*; ``QSeries({8: 1})`` is ``q``.
Coefficients are mpmath scalars or :class:`~witten_rigidity.jets.Jet` values.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable

import mpmath

from .errors import DivergenceError, DomainError, InversionError
from .jets import Jet

DEFAULT_TRUNCATION = 40  # q^5


def to_eighths(exponent) -> int:
    """Convert an exponent (int, Fraction, or ``"1/2"``) to eighths, exactly."""
    frac = Fraction(exponent)
    e = frac * 8
    if e.denominator != 1 or e < 0:
        raise DomainError(f"exponent {exponent} is not a non-negative multiple of 1/8")
    return int(e)


def _is_ring_element(c) -> bool:
    """Jets, virtual bundles and similar objects manage their own arithmetic."""
    return hasattr(c, "is_zero")


def _is_zero(c) -> bool:
    if _is_ring_element(c):
        return c.is_zero()
    return c == 0


def _size(c):
    if isinstance(c, Jet):
        return c.max_abs()
    if _is_ring_element(c):
        raise DomainError("size is only defined for scalar and Jet coefficients")
    return abs(c)


class QSeries:
    """``sum_e coeffs[e] * q^(e/8)`` for ``e <= truncation``."""

    __slots__ = ("truncation", "coeffs")

    def __init__(self, coeffs: dict | None = None, truncation: int = DEFAULT_TRUNCATION):
        if truncation < 0:
            raise DomainError("truncation must be non-negative")
        self.truncation = int(truncation)
        self.coeffs: dict = {}
        for e, c in (coeffs or {}).items():
            e = int(e)
            if e < 0:
                raise DomainError("negative exponent")
            if e <= self.truncation and not _is_zero(c):
                self.coeffs[e] = c if _is_ring_element(c) else mpmath.mpmathify(c)

    @classmethod
    def constant(cls, value, truncation: int = DEFAULT_TRUNCATION) -> "QSeries":
        return cls({0: value}, truncation)

    @classmethod
    def monomial(cls, value, eighths: int, truncation: int = DEFAULT_TRUNCATION) -> "QSeries":
        return cls({eighths: value}, truncation)

    def coefficient(self, eighths: int, default=0):
        return self.coeffs.get(int(eighths), mpmath.mpc(default) if default == 0 else default)

    def coefficient_at(self, exponent):
        return self.coefficient(to_eighths(exponent))

    def exponents(self) -> list[int]:
        return sorted(self.coeffs)

    def with_truncation(self, truncation: int) -> "QSeries":
        """Drop terms above ``truncation`` (never raises the truncation)."""
        return QSeries(self.coeffs, min(truncation, self.truncation))

    def map(self, fn: Callable) -> "QSeries":
        return QSeries({e: fn(c) for e, c in self.coeffs.items()}, self.truncation)

    def _lift(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            return other
        return QSeries.constant(other, self.truncation)

    def __add__(self, other):
        other = self._lift(other)
        trunc = min(self.truncation, other.truncation)
        out = {e: c for e, c in self.coeffs.items() if e <= trunc}
        for e, c in other.coeffs.items():
            if e <= trunc:
                out[e] = out[e] + c if e in out else c
        return QSeries(out, trunc)

    __radd__ = __add__

    def __neg__(self):
        return self.map(lambda c: -c)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.map(lambda c: c * other)
        trunc = min(self.truncation, other.truncation)
        out: dict = {}
        for ea, ca in self.coeffs.items():
            for eb, cb in other.coeffs.items():
                e = ea + eb
                if e > trunc:
                    continue
                prod = ca * cb
                out[e] = out[e] + prod if e in out else prod
        return QSeries(out, trunc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QSeries):
            return self * qs_invert(other)
        return self * (1 / mpmath.mpmathify(other))

    def __pow__(self, n: int):
        out = QSeries.constant(1, self.truncation)
        for _ in range(n):
            out = out * self
        return out

    def max_abs_diff(self, other) -> object:
        diff = self - self._lift(other)
        return max((_size(c) for c in diff.coeffs.values()), default=mpmath.mpf(0))

    def evaluate(self, tau=None, q_eighth=None):
        """Sum the series at ``q^{1/8} = exp(pi i tau / 4)`` (or a given ``q_eighth``)."""
        if q_eighth is None:
            if tau is None:
                raise DomainError("evaluate needs tau or q_eighth")
            from .precision import Tau

            q_eighth = (tau if isinstance(tau, Tau) else Tau(tau)).q_eighth
        total = 0
        for e, c in sorted(self.coeffs.items()):
            total = total + c * q_eighth ** e
        return total

    def render(self, digits: int = 15) -> str:
        """Text form ``c0 + c1*q^(1/8) + ...`` with reduced-fraction exponents."""
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs):
            c = self.coeffs[e]
            text = repr(c) if _is_ring_element(c) else _format_scalar(c, digits)
            frac = Fraction(e, 8)
            if e == 0:
                parts.append(text)
            elif frac == 1:
                parts.append(f"({text})*q")
            else:
                exp = str(frac.numerator) if frac.denominator == 1 else f"{frac.numerator}/{frac.denominator}"
                parts.append(f"({text})*q^({exp})")
        return " + ".join(parts) + f" + O(q^({_frac_text(self.truncation + 1)}))"

    def __repr__(self):
        return f"QSeries({self.render(8)})"


def _frac_text(eighths: int) -> str:
    frac = Fraction(eighths, 8)
    return str(frac.numerator) if frac.denominator == 1 else f"{frac.numerator}/{frac.denominator}"


def _format_scalar(c, digits: int) -> str:
    c = mpmath.mpmathify(c)
    if isinstance(c, mpmath.mpc) and c.imag == 0:
        c = c.real
    if isinstance(c, mpmath.mpc):
        return f"{mpmath.nstr(c.real, digits)}{'+' if c.imag >= 0 else '-'}{mpmath.nstr(abs(c.imag), digits)}i"
    return mpmath.nstr(c, digits)


def qs_invert(series: QSeries) -> QSeries:
    """Multiplicative inverse modulo the truncation."""
    a0 = series.coeffs.get(0)
    if a0 is None or (isinstance(a0, Jet) and a0.constant_term == 0):
        raise InversionError("series with non-invertible constant term")
    inv0 = a0.inverse() if isinstance(a0, Jet) else 1 / a0
    trunc = series.truncation
    out = {0: inv0}
    nonconst = [(e, c) for e, c in sorted(series.coeffs.items()) if e > 0]
    for n in range(1, trunc + 1):
        acc = None
        for e, c in nonconst:
            if e > n:
                break
            prev = out.get(n - e)
            if prev is None:
                continue
            term = c * prev
            acc = term if acc is None else acc + term
        if acc is not None:
            out[n] = -(inv0 * acc)
    return QSeries(out, trunc)


def product_expand(factor_at: Callable[[int], QSeries], min_exponent_of: Callable[[int], int],
                   truncation: int = DEFAULT_TRUNCATION, max_stall: int | None = None) -> QSeries:
    """Product of the factors ``j = 1, 2, ...`` modulo ``q^(truncation/8 + ...)``.

    ``min_exponent_of(j)`` is the lowest exponent (in eighths) at which factor
    ``j`` differs from 1. Factors are multiplied until that exponent passes the
    truncation; a schedule that decreases, starts at 0 or stalls raises
    :class:`DivergenceError`.
    """
    stall_limit = max_stall if max_stall is not None else truncation + 2
    out = QSeries.constant(1, truncation)
    prev = None
    stall = 0
    j = 1
    while True:
        m = int(min_exponent_of(j))
        if m <= 0:
            raise DivergenceError(f"factor {j} deviates from 1 at q^0")
        if prev is not None:
            if m < prev:
                raise DivergenceError(f"exponent schedule decreases at j={j}")
            stall = stall + 1 if m == prev else 0
            if stall > stall_limit:
                raise DivergenceError("exponent schedule does not grow")
        if m > truncation:
            return out
        out = out * factor_at(j).with_truncation(truncation)
        prev = m
        j += 1
