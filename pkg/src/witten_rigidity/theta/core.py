"""The four Jacobi theta functions as truncated products.

With ``q = exp(2 pi i tau)``::

    theta(v)  = 2 q^{1/8} sin(pi v) prod (1-q^j)(1-e^{2pi i v} q^j)(1-e^{-2pi i v} q^j)
    theta1(v) = 2 q^{1/8} cos(pi v) prod (1-q^j)(1+e^{2pi i v} q^j)(1+e^{-2pi i v} q^j)
    theta2(v) =                     prod (1-q^j)(1-e^{2pi i v} q^{j-1/2})(1-e^{-2pi i v} q^{j-1/2})
    theta3(v) =                     prod (1-q^j)(1+e^{2pi i v} q^{j-1/2})(1+e^{-2pi i v} q^{j-1/2})

``q^{1/8}`` always means ``exp(pi i tau / 4)``. Everything here works on
Taylor coefficients in the shift ``eps`` of ``theta(v + eps)``, which gives
values and exact v-derivatives from one product pass.
"""
from __future__ import annotations

import enum
import functools
from typing import NamedTuple

import mpmath

from ..errors import DomainError, PrecisionError
from ..precision import (
    DEFAULT_PRECISION,
    PrecisionConfig,
    Tau,
    parse_complex,
    product_order,
    working_precision,
)


class ThetaKind(str, enum.Enum):
    THETA = "theta"
    THETA1 = "theta1"
    THETA2 = "theta2"
    THETA3 = "theta3"

    @classmethod
    def coerce(cls, value) -> "ThetaKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown theta kind {value!r}") from None

    @property
    def is_odd(self) -> bool:
        return self is ThetaKind.THETA


KINDS = tuple(ThetaKind)

# (sign inside the product, nome offset in halves: p1 = q or q^{1/2})
_PRODUCT_SHAPE = {
    ThetaKind.THETA: (-1, "full"),
    ThetaKind.THETA1: (1, "full"),
    ThetaKind.THETA2: (-1, "half"),
    ThetaKind.THETA3: (1, "half"),
}


def _exp_taylor(c, order):
    """Taylor coefficients of exp(c*eps)."""
    out = [mpmath.mpc(1)]
    for k in range(1, order + 1):
        out.append(out[-1] * c / k)
    return out


def _prefactor_taylor(kind, v, tau, order):
    if kind in (ThetaKind.THETA2, ThetaKind.THETA3):
        return [mpmath.mpc(1)] + [mpmath.mpc(0)] * order
    pi = mpmath.pi
    x = pi * v
    base = 2 * tau.q_eighth
    trig = mpmath.sin if kind is ThetaKind.THETA else mpmath.cos
    # d^k/dx^k sin(x) = sin(x + k pi/2), same for cos
    vals = [trig(x), None, None, None]
    if kind is ThetaKind.THETA:
        vals[1:] = [mpmath.cos(x), -vals[0], -mpmath.cos(x)]
    else:
        vals[1:] = [-mpmath.sin(x), -vals[0], mpmath.sin(x)]
    out = []
    scale = mpmath.mpf(1)
    for k in range(order + 1):
        out.append(base * vals[k % 4] * scale)
        scale = scale * pi / (k + 1)
    return out


@functools.lru_cache(maxsize=8192)
def _taylor_cached(kind, v, tau_value, order, nterms, prec, backend):
    from . import product_taylor

    with mpmath.workprec(prec):
        tau = Tau(tau_value)
        q = tau.q_full
        sign, shape = _PRODUCT_SHAPE[kind]
        p1 = q if shape == "full" else tau.q_half
        z = mpmath.exp(2j * mpmath.pi * v)
        two_pi_i = 2j * mpmath.pi
        prod = product_taylor(
            z, p1, q, sign, nterms, order,
            _exp_taylor(two_pi_i, order), _exp_taylor(-two_pi_i, order),
            backend=backend,
        )
        pre = _prefactor_taylor(kind, v, tau, order)
        out = []
        for k in range(order + 1):
            acc = mpmath.mpc(0)
            for i in range(k + 1):
                acc += pre[i] * prod[k - i]
            out.append(acc)
    for c in out:
        if not (mpmath.isfinite(c.real) and mpmath.isfinite(c.imag)):
            raise PrecisionError(f"{kind.value} overflowed at v={v}, tau={tau_value}")
    return tuple(out)


def theta_taylor(kind, v, tau, order: int = 0, cfg: PrecisionConfig = DEFAULT_PRECISION,
                 backend: str | None = None) -> list:
    """Taylor coefficients ``c_k`` with ``theta_kind(v + eps) = sum c_k eps^k``.

    Computed at the config's working precision; ``order`` is the highest power.
    """
    kind = ThetaKind.coerce(kind)
    if order < 0:
        raise DomainError("order must be non-negative")
    tau = tau if isinstance(tau, Tau) else Tau(tau)
    with working_precision(cfg):
        v = parse_complex(v)
        nterms = product_order(cfg, tau, v.imag)
        return list(_taylor_cached(kind, v, tau.value, order, nterms,
                                   mpmath.mp.prec, backend))


def theta_eval(kind, v, tau, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Value of ``theta_kind(v, tau)``."""
    return theta_taylor(kind, v, tau, 0, cfg)[0]


def theta_v_deriv(kind, v, tau, order: int, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """The ``order``-th derivative in ``v``, from the product's Taylor expansion."""
    if order > cfg.max_jet_degree:
        raise DomainError(f"derivative order {order} exceeds max_jet_degree={cfg.max_jet_degree}")
    coeffs = theta_taylor(kind, v, tau, order, cfg)
    return coeffs[order] * mpmath.factorial(order)


def theta_derivative_at_zero(tau, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """``theta'(0, tau)``."""
    return theta_taylor(ThetaKind.THETA, 0, tau, 1, cfg)[1]


def jacobi_identity_residual(tau, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """``|theta'(0) - pi theta1(0) theta2(0) theta3(0)|``."""
    with working_precision(cfg):
        lhs = theta_derivative_at_zero(tau, cfg)
        rhs = mpmath.pi
        for kind in (ThetaKind.THETA1, ThetaKind.THETA2, ThetaKind.THETA3):
            rhs = rhs * theta_eval(kind, 0, tau, cfg)
        return abs(lhs - rhs)


def quasi_period_factor(kind, shift, v, tau):
    """Multiplier ``c`` with ``theta_kind(v + shift) = c * theta_kind(v)``.

    ``shift`` is ``"one"`` (or 1) or ``"tau"``. For the tau shift the factor is
    ``+-q^{-1/2} e^{-2 pi i v}`` with ``q = exp(2 pi i tau)``, so
    ``q^{-1/2} = exp(-pi i tau)``.
    """
    kind = ThetaKind.coerce(kind)
    tau = tau if isinstance(tau, Tau) else Tau(tau)
    if shift in ("one", 1, "1"):
        return mpmath.mpc(-1 if kind in (ThetaKind.THETA, ThetaKind.THETA1) else 1)
    if shift != "tau":
        raise DomainError(f"shift must be 'one' or 'tau', got {shift!r}")
    v = parse_complex(v)
    sign = -1 if kind in (ThetaKind.THETA, ThetaKind.THETA2) else 1
    return sign * mpmath.exp(-1j * mpmath.pi * tau.value - 2j * mpmath.pi * v)


class ModularImage(NamedTuple):
    kind: ThetaKind
    prefactor: object
    v: object
    tau: Tau


_S_TARGET = {
    ThetaKind.THETA: ThetaKind.THETA,
    ThetaKind.THETA1: ThetaKind.THETA2,
    ThetaKind.THETA2: ThetaKind.THETA1,
    ThetaKind.THETA3: ThetaKind.THETA3,
}
_T_TARGET = {
    ThetaKind.THETA: ThetaKind.THETA,
    ThetaKind.THETA1: ThetaKind.THETA1,
    ThetaKind.THETA2: ThetaKind.THETA3,
    ThetaKind.THETA3: ThetaKind.THETA2,
}


def s_root(tau):
    """Principal branch of ``sqrt(tau / i)``; ``tau / i`` has positive real part."""
    tau = tau if isinstance(tau, Tau) else Tau(tau)
    return mpmath.sqrt(tau.value / 1j)


def modular_image(kind, gen, v, tau) -> ModularImage:
    """Transformation law of ``theta_kind`` under ``S`` or ``T``.

    For ``S`` the left side is ``theta_kind(v/tau, -1/tau)``, for ``T`` it is
    ``theta_kind(v, tau + 1)``; the result ``(kind', c, v, tau)`` says that
    this equals ``c * theta_kind'(v, tau)``.
    """
    kind = ThetaKind.coerce(kind)
    tau = tau if isinstance(tau, Tau) else Tau(tau)
    v = parse_complex(v)
    gen = str(gen).upper()
    if gen == "S":
        c = s_root(tau) * mpmath.exp(1j * mpmath.pi * v * v / tau.value)
        if kind is ThetaKind.THETA:
            c = c / 1j
        return ModularImage(_S_TARGET[kind], c, v, tau)
    if gen == "T":
        if kind in (ThetaKind.THETA, ThetaKind.THETA1):
            c = mpmath.exp(1j * mpmath.pi / 4)
        else:
            c = mpmath.mpc(1)
        return ModularImage(_T_TARGET[kind], c, v, tau)
    raise DomainError(f"generator must be 'S' or 'T', got {gen!r}")


def theta_prime_s_factor(tau):
    """``(tau/i)^{3/2}``, the weight-3/2 factor of ``theta'(0, -1/tau)``."""
    return s_root(tau) ** 3
