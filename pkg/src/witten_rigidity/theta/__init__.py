"""Jacobi theta functions and their transformation data.

The truncated product kernel comes from the compiled ``_product`` extension
when it is importable and from ``_product_py`` otherwise. Setting
``WITTEN_RIGIDITY_BACKEND=python`` forces the fallback.
"""
from __future__ import annotations

import os

import mpmath

from . import _product_py

BACKEND = "python"
_compiled = None

if os.environ.get("WITTEN_RIGIDITY_BACKEND", "").lower() != "python":
    try:
        import gmpy2

        from . import _product as _compiled  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        _compiled = None


def _to_gmpy(x, prec):
    x = mpmath.mpc(x)
    return gmpy2.mpc(_mpf_to_gmpy(x.real, prec), _mpf_to_gmpy(x.imag, prec), precision=prec)


def _mpf_to_gmpy(x, prec):
    sign, man, exp, bc = mpmath.mpf(x)._mpf_
    if sign:
        man = -man
    with gmpy2.context(gmpy2.get_context(), precision=max(prec, bc + 1)):
        return gmpy2.mul_2exp(gmpy2.mpfr(man), exp)


def _from_gmpy(c):
    re_man, re_exp = c.real.as_mantissa_exp()
    im_man, im_exp = c.imag.as_mantissa_exp()
    return mpmath.mpc(mpmath.mpf((int(re_man), int(re_exp))), mpmath.mpf((int(im_man), int(im_exp))))


def product_taylor(z, p1, q, sign, nterms, order, e_plus, e_minus, backend=None):
    """Dispatch to the selected kernel; all values are mpmath in and out."""
    use = backend or BACKEND
    if use == "python" or _compiled is None:
        return _product_py.product_taylor(z, p1, q, sign, nterms, order, e_plus, e_minus)
    prec = mpmath.mp.prec
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        out = _compiled.product_taylor(
            _to_gmpy(z, prec), _to_gmpy(p1, prec), _to_gmpy(q, prec), int(sign),
            int(nterms), int(order),
            [_to_gmpy(e, prec) for e in e_plus], [_to_gmpy(e, prec) for e in e_minus],
        )
    return [_from_gmpy(c) for c in out]


from .core import (  # noqa: E402
    KINDS,
    ThetaKind,
    jacobi_identity_residual,
    modular_image,
    quasi_period_factor,
    theta_derivative_at_zero,
    s_root,
    theta_eval,
    theta_prime_s_factor,
    theta_taylor,
    theta_v_deriv,
)

__all__ = [
    "BACKEND",
    "KINDS",
    "ThetaKind",
    "jacobi_identity_residual",
    "modular_image",
    "product_taylor",
    "quasi_period_factor",
    "s_root",
    "theta_derivative_at_zero",
    "theta_eval",
    "theta_prime_s_factor",
    "theta_taylor",
    "theta_v_deriv",
]

from .qexpansions import log_derivative_series  # noqa: E402

__all__.append("log_derivative_series")
