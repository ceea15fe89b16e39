"""The odd Chern-character factor ``ch(Q_j(E), g, d, tau)`` under the trace model.

With ``f_j = theta_j'/theta_j`` (derivative in v) the factor is::

    c_j * sum_i w_i * int_0^1 f_j((u^2 - u) a_i, tau) du

where ``c_j = -2^{N/2}/(8 pi^2)`` for ``j = 1`` or ``"all"`` (then
``f = f_1 + f_2 + f_3``) and ``c_j = -1/(8 pi^2)`` for ``j = 2, 3``. Because
``a_i`` is nilpotent the integrand is a polynomial in ``u`` and Gauss-Legendre
quadrature with enough nodes is exact.
"""
from __future__ import annotations

import functools

import mpmath

from .errors import QuadratureError
from .jets import Jet, taylor_inverse, taylor_mul
from .model import OddEData, coerce_lambda
from .precision import DEFAULT_PRECISION, PrecisionConfig, Tau, working_precision
from .qseries import QSeries
from .theta import log_derivative_series, theta_taylor

DEFAULT_QUADRATURE_POINTS = 32

_KINDS = {1: "theta1", 2: "theta2", 3: "theta3"}


@functools.lru_cache(maxsize=64)
def _gauss_legendre_cached(n: int, prec: int):
    with mpmath.workprec(prec + 20):
        nodes, weights = [], []
        for i in range(1, n // 2 + 1):
            x = mpmath.cos(mpmath.pi * (i - mpmath.mpf(1) / 4) / (n + mpmath.mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mpmath.mpf(1), x
                for k in range(2, n + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mpmath.mpf(2) ** (-(prec + 10)):
                    break
            p0, p1 = mpmath.mpf(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            w = 2 / ((1 - x * x) * dp * dp)
            nodes += [x, -x]
            weights += [w, w]
        if n % 2:
            p0, p1 = mpmath.mpf(1), mpmath.mpf(0)
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * 0 * p1 - (k - 1) * p0) / k
            # P_n'(0) = n P_{n-1}(0)
            dp = n * p0
            nodes.append(mpmath.mpf(0))
            weights.append(2 / (dp * dp))
    # map [-1, 1] -> [0, 1]
    return tuple((x + 1) / 2 for x in nodes), tuple(w / 2 for w in weights)


def gauss_legendre(n: int):
    """Nodes and weights of ``n``-point Gauss-Legendre quadrature on [0, 1]."""
    if n < 1:
        raise ValueError("need at least one quadrature node")
    return _gauss_legendre_cached(n, mpmath.mp.prec)


def quadrature_moments(n: int, kmax: int) -> list:
    """``sum_nodes w (u^2 - u)^k`` for ``k = 0..kmax``."""
    nodes, weights = gauss_legendre(n)
    out = []
    for k in range(kmax + 1):
        out.append(mpmath.fsum(w * (x * x - x) ** k for x, w in zip(nodes, weights)))
    return out


def exact_moment(k: int):
    """``int_0^1 (u^2 - u)^k du = (-1)^k (k!)^2 / (2k+1)!``."""
    return (-1) ** k * mpmath.factorial(k) ** 2 / mpmath.factorial(2 * k + 1)


def prefactor(j, N: int):
    j = coerce_lambda(j)
    base = -1 / (8 * mpmath.pi ** 2)
    return base * 2 ** (mpmath.mpf(N) / 2) if j in (1, "all") else base


def log_derivative_taylor(j, tau, order: int, cfg: PrecisionConfig = DEFAULT_PRECISION) -> list:
    """Taylor coefficients at 0 of ``theta_j'/theta_j`` (summed over j for ``"all"``)."""
    j = coerce_lambda(j)
    if j == "all":
        parts = [log_derivative_taylor(i, tau, order, cfg) for i in (1, 2, 3)]
        return [a + b + c for a, b, c in zip(*parts)]
    coeffs = theta_taylor(_KINDS[j], 0, tau, order + 1, cfg)
    deriv = [(k + 1) * coeffs[k + 1] for k in range(order + 1)]
    return taylor_mul(deriv, taylor_inverse(coeffs[: order + 1], order), order)


def _assemble(E: OddEData, f_coeffs, moments, degrees, cap, scale) -> Jet:
    total = Jet.zero(cap, degrees)
    for w, a in E.jets(degrees, cap):
        power = Jet.constant(1, cap, degrees)
        acc = Jet.zero(cap, degrees)
        for k in range(len(f_coeffs)):
            if k > 0:
                power = power * a
                if power.is_zero():
                    break
            c = f_coeffs[k] * moments[k]
            if c != 0:
                acc = acc + power * c
        total = total + w * acc
    return total * scale


def odd_chern_factor(j, E: OddEData, tau, quadrature_points: int = DEFAULT_QUADRATURE_POINTS,
                     cfg: PrecisionConfig = DEFAULT_PRECISION, degrees: dict | None = None,
                     cap: int = 7, check: bool = True) -> Jet:
    """The odd factor as a Jet, by Gauss-Legendre quadrature in ``u``.

    The integrand at each node is the Jet ``sum_k f_k (u^2-u)^k a_i^k``; summing
    over nodes first gives the moments used below. With ``check=True`` the
    result is recomputed with twice the nodes and a change above
    ``10^-(digits-10)`` raises :class:`QuadratureError`.
    """
    degrees = dict(degrees or {})
    tau = tau if isinstance(tau, Tau) else Tau(tau)
    with working_precision(cfg):
        order = cap // 2
        f = log_derivative_taylor(j, tau, order, cfg)
        scale = prefactor(j, E.N)
        result = _assemble(E, f, quadrature_moments(quadrature_points, order), degrees, cap, scale)
        if check:
            doubled = _assemble(E, f, quadrature_moments(2 * quadrature_points, order), degrees, cap, scale)
            change = result.distance(doubled)
            if change > cfg.tolerance(10):
                raise QuadratureError(
                    f"doubling quadrature points changed the odd factor by {mpmath.nstr(change, 5)}")
        return result


def odd_chern_factor_exact(j, E: OddEData, tau, cfg: PrecisionConfig = DEFAULT_PRECISION,
                           degrees: dict | None = None, cap: int = 7) -> Jet:
    """Same factor using the closed-form moments instead of quadrature."""
    degrees = dict(degrees or {})
    with working_precision(cfg):
        order = cap // 2
        f = log_derivative_taylor(j, tau, order, cfg)
        moments = [exact_moment(k) for k in range(order + 1)]
        return _assemble(E, f, moments, degrees, cap, prefactor(j, E.N))


def odd_chern_factor_series(j, E: OddEData, truncation: int, degrees: dict | None = None,
                            cap: int = 7) -> QSeries:
    """q-expansion of the odd factor from the closed-form log-derivative series."""
    degrees = dict(degrees or {})
    j = coerce_lambda(j)
    order = cap // 2
    kinds = [_KINDS[i] for i in ((1, 2, 3) if j == "all" else (j,))]
    f = None
    for kind in kinds:
        part = log_derivative_series(kind, order, truncation)
        f = part if f is None else [x + y for x, y in zip(f, part)]
    moments = [exact_moment(k) for k in range(order + 1)]
    scale = prefactor(j, E.N)
    out = QSeries({}, truncation)
    for w, a in E.jets(degrees, cap):
        power = Jet.constant(1, cap, degrees)
        for k in range(order + 1):
            if k > 0:
                power = power * a
                if power.is_zero():
                    break
            if f[k].coeffs:
                out = out + f[k] * (w * power * (moments[k] * scale))
    return out


def c3_residual(E: OddEData, degrees: dict, cap: int = 7):
    """Size of ``sum_i w_i a_i``; zero exactly when the degree-3 class vanishes in the model."""
    total = Jet.zero(cap, degrees)
    for w, a in E.jets(degrees, cap):
        total = total + w * a
    return total.max_abs()


def s_identity_residuals(E: OddEData, tau, cfg: PrecisionConfig = DEFAULT_PRECISION,
                         degrees: dict | None = None, cap: int = 7,
                         quadrature_points: int = DEFAULT_QUADRATURE_POINTS) -> dict:
    """Residuals of the S-relations between odd factors, per degree ``4i-1``.

    Checks ``F_1(-1/tau) = 2^{N/2} tau^{2i} F_2(tau)``,
    ``F_2(-1/tau) = 2^{-N/2} tau^{2i} F_1(tau)`` and
    ``F_3(-1/tau) = tau^{2i} F_3(tau)`` on each degree-(4i-1) part.
    """
    tau = tau if isinstance(tau, Tau) else Tau(tau)
    out = {}
    with working_precision(cfg):
        s_tau = tau.s_image()
        half_n = 2 ** (mpmath.mpf(E.N) / 2)
        F = {jj: odd_chern_factor(jj, E, tau, quadrature_points, cfg, degrees, cap) for jj in (1, 2, 3)}
        G = {jj: odd_chern_factor(jj, E, s_tau, quadrature_points, cfg, degrees, cap) for jj in (1, 2, 3)}
        for left, right, const in ((1, 2, half_n), (2, 1, 1 / half_n), (3, 3, 1)):
            worst = mpmath.mpf(0)
            i = 1
            while 4 * i - 1 <= cap:
                d = 4 * i - 1
                lhs = G[left].homogeneous_part(d)
                rhs = F[right].homogeneous_part(d) * (const * tau.value ** (2 * i))
                worst = max(worst, lhs.distance(rhs))
                i += 1
            out[f"{left}->{right}"] = worst
    return out
