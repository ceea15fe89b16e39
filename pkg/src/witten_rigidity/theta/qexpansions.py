"""Closed-form q-expansions of the logarithmic derivatives of theta1..theta3.

Taking d/dv log of the product definitions gives, with ``q = exp(2 pi i tau)``::

    theta1'/theta1 = -pi tan(pi v) + 4 pi sum_{j,n>=1} (-1)^n q^{jn} sin(2 pi n v)
    theta2'/theta2 =                 4 pi sum_{j,n>=1} q^{(j-1/2)n} sin(2 pi n v)
    theta3'/theta3 =                 4 pi sum_{j,n>=1} (-1)^n q^{(j-1/2)n} sin(2 pi n v)

These are used as an independent check on the product-based evaluators.
"""
from __future__ import annotations

import mpmath

from ..errors import DomainError
from ..qseries import QSeries
from .core import ThetaKind


def _tan_taylor(order: int) -> list:
    """Taylor coefficients of tan(x) through ``x^order``."""
    out = [mpmath.mpf(0)] * (order + 1)
    n = 1
    while 2 * n - 1 <= order:
        b = mpmath.bernoulli(2 * n)
        out[2 * n - 1] = (-1) ** (n - 1) * 2 ** (2 * n) * (2 ** (2 * n) - 1) * b / mpmath.factorial(2 * n)
        n += 1
    return out


def log_derivative_series(kind, order: int, truncation: int) -> list:
    """``[c_0, ..., c_order]`` with ``theta_j'/theta_j(v) = sum_k c_k(q) v^k``.

    Each ``c_k`` is a :class:`QSeries` truncated at ``truncation`` eighths.
    """
    kind = ThetaKind.coerce(kind)
    if kind is ThetaKind.THETA:
        raise DomainError("theta'/theta has a pole at v=0; only theta1..theta3 are supported")
    pi = mpmath.pi
    coeffs = [dict() for _ in range(order + 1)]
    if kind is ThetaKind.THETA1:
        for k, c in enumerate(_tan_taylor(order)):
            if c:
                coeffs[k][0] = -pi * c * pi ** k
    half = kind in (ThetaKind.THETA2, ThetaKind.THETA3)
    alternating = kind in (ThetaKind.THETA1, ThetaKind.THETA3)
    j = 1
    while True:
        base = 8 * j - 4 if half else 8 * j
        if base > truncation:
            break
        n = 1
        while base * n <= truncation:
            e = base * n
            sign = (-1) ** n if alternating else 1
            for l in range((order - 1) // 2 + 1):
                k = 2 * l + 1
                if k > order:
                    break
                term = sign * 4 * pi * (-1) ** l * (2 * pi * n) ** k / mpmath.factorial(k)
                coeffs[k][e] = coeffs[k].get(e, 0) + term
            n += 1
        j += 1
    return [QSeries(c, truncation) for c in coeffs]
