"""Pure-Python (mpmath) kernel for truncated theta products.

This is the reference implementation; ``_product.pyx`` mirrors it on libmpc.
"""
from __future__ import annotations

import mpmath


def product_taylor(z, p1, q, sign, nterms, order, e_plus, e_minus):
    """Taylor coefficients in ``eps`` of a truncated triple product.

    Computes ``prod_{j=1}^{nterms} (1 - q^j)(1 + sign*z*E*p_j)(1 + sign*E^{-1}*p_j/z)``
    with ``E = exp(2 pi i eps)`` and ``p_j = p1 * q^(j-1)``, through ``eps^order``.
    ``e_plus[k]`` and ``e_minus[k]`` hold the Taylor coefficients of ``E`` and
    ``E^{-1}`` (so ``e_plus[0] == e_minus[0] == 1``). Returns ``order + 1``
    mpc values.
    """
    series = [mpmath.mpc(1)] + [mpmath.mpc(0)] * order
    zinv = 1 / z
    pj = mpmath.mpc(p1)
    qj = mpmath.mpc(q)
    for _ in range(nterms):
        _mul_factor(series, sign * z * pj, e_plus, order)
        _mul_factor(series, sign * zinv * pj, e_minus, order)
        scale = 1 - qj
        for k in range(order + 1):
            series[k] *= scale
        pj *= q
        qj *= q
    return series


def _mul_factor(series, c, e, order):
    """In place: ``series *= 1 + c * (1 + e[1] eps + e[2] eps^2 + ...)``."""
    a0 = 1 + c
    for k in range(order, -1, -1):
        acc = mpmath.mpc(0)
        for i in range(k):
            acc += series[i] * e[k - i]
        series[k] = series[k] * a0 + c * acc
