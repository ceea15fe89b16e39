"""Equivariant index densities of the twisted Witten operators.

Two independent routes are provided:

* :func:`lefschetz_component` evaluates the fixed-point contribution as a
  quotient of theta functions at a given ``(t, tau)``;
* :func:`lefschetz_oracle` builds the same quantity as a q-series by taking
  equivariant Chern characters of the Witten bundles line by line.

:func:`theta_path_series` recovers q-coefficients of the first route by
discrete Fourier sampling along a horizontal line in the upper half-plane, so
the two can be compared coefficient by coefficient.
"""
from __future__ import annotations

import mpmath

from .bundles import (EquivariantBundle, LineBasis, WeightedSummand, ch_equivariant,
                      witten_bundle)
from .errors import DomainError, PoleError
from .jets import Jet, compose_taylor, integrate, taylor_inverse
from .model import CaseSelector, EquivariantData, FixedComponent, OddEData
from .odd_factor import DEFAULT_QUADRATURE_POINTS, odd_chern_factor, odd_chern_factor_series
from .precision import DEFAULT_PRECISION, PrecisionConfig, Tau, parse_complex, working_precision
from .qseries import QSeries
from .theta import theta_taylor

CONVENTIONS = ("derived", "printed")
_V_KINDS = {1: ("theta1",), 2: ("theta2",), 3: ("theta3",), "all": ("theta1", "theta2", "theta3")}


def prefactor(case: CaseSelector, comp: FixedComponent, convention: str = "derived"):
    """Normalising constant multiplying the integrated theta quotient.

    ``"derived"`` makes the theta route agree with the index-form oracle.
    ``"printed"`` is the alternative normalisation; it coincides with the
    derived one for ``lam = 1`` and differs by ``(-1)^{r+1}`` for ``lam = 2, 3``.
    """
    if convention not in CONVENTIONS:
        raise DomainError(f"convention must be one of {CONVENTIONS}")
    r, l = comp.r_bar, comp.l_bar
    two_pi_i = 2j * mpmath.pi
    lam = case.lam
    if convention == "printed" and lam in (2, 3):
        return -(1j / (2 * mpmath.pi)) ** r
    if convention == "printed" and lam == 1:
        return mpmath.mpf(2) ** (l - r) * (-1j / mpmath.pi) ** r
    if lam in (1, "all"):
        return mpmath.mpf(2) ** l * two_pi_i ** (-r)
    return two_pi_i ** (-r)


def _theta_of_jet(kind, base, jet: Jet, tau, cfg) -> Jet:
    """``theta_kind(base + jet)`` for a nilpotent ``jet``."""
    order = jet.nilpotency_order() if not jet.is_zero() else 0
    coeffs = theta_taylor(kind, base, tau, order, cfg)
    if jet.is_zero():
        return Jet.constant(coeffs[0], jet.cap, jet.degrees)
    return compose_taylor(coeffs, jet)


def _tangent_factor(y: Jet, tau, cfg, theta_p0) -> Jet:
    """``y theta'(0) / theta(y)``."""
    if y.is_zero():
        return Jet.constant(1, y.cap, y.degrees)
    order = y.nilpotency_order()
    coeffs = theta_taylor("theta", 0, tau, order + 1, cfg)
    shifted = coeffs[1:]
    inv = taylor_inverse(shifted, order)
    return compose_taylor([theta_p0 * c for c in inv], y)


def _check_pole(value, scale, cfg, what, argument, component, raise_on_pole):
    if abs(value) < cfg.tolerance(10) * abs(scale):
        if raise_on_pole:
            raise PoleError(f"{what} vanishes at {mpmath.nstr(argument, 10)} on component {component!r}",
                            kind=what, argument=argument, component=component)
        return True
    return False


def theta_density(case: CaseSelector, comp: FixedComponent, E: OddEData | None, t, tau,
                  cfg: PrecisionConfig = DEFAULT_PRECISION, raise_on_pole: bool = True,
                  quadrature_points: int = DEFAULT_QUADRATURE_POINTS) -> Jet:
    """The integrand (before integration and prefactor) as a Jet."""
    tau = tau if isinstance(tau, Tau) else Tau(tau)
    t = parse_complex(t)
    cap, degrees = comp.cap, comp.degrees
    with working_precision(cfg):
        theta_p0 = theta_taylor("theta", 0, tau, 1, cfg)[1]
        density = Jet.constant(1, cap, degrees)
        for root in comp.tangent_roots:
            density = density * _tangent_factor(comp.jet(root), tau, cfg, theta_p0)
        for ns in comp.normal:
            base = ns.rotation * t
            value = theta_taylor("theta", base, tau, 0, cfg)[0]
            if _check_pole(value, theta_p0, cfg, "theta", base, comp.name, raise_on_pole):
                return Jet.constant(mpmath.mpc(mpmath.inf), cap, degrees)
            factor = _theta_of_jet("theta", base, comp.jet(ns.root), tau, cfg).inverse() * theta_p0
            density = density * factor ** ns.multiplicity
        # the line bundle L
        u = comp.jet(comp.u)
        base = comp.sigma * t
        t123_0 = mpmath.fprod(theta_taylor(k, 0, tau, 0, cfg)[0] for k in ("theta1", "theta2", "theta3"))
        if case.is_star:
            line = _theta_of_jet("theta", base, u, tau, cfg) * (1j / t123_0)
        else:
            line = Jet.constant(1 / t123_0, cap, degrees)
            for k in ("theta1", "theta2", "theta3"):
                line = line * _theta_of_jet(k, base, u, tau, cfg)
        density = density * line
        # the bundle V
        for vs in comp.V:
            base = vs.rotation * t
            z = comp.jet(vs.root)
            for k in _V_KINDS[case.lam]:
                ratio = _theta_of_jet(k, base, z, tau, cfg) * (1 / theta_taylor(k, 0, tau, 0, cfg)[0])
                density = density * ratio ** vs.multiplicity
        if case.is_odd:
            if E is None:
                raise DomainError("odd dimension classes need odd-factor data E")
            density = density * odd_chern_factor(case.odd_index, E, tau, quadrature_points, cfg,
                                                 degrees, cap)
        return density


def lefschetz_component(case: CaseSelector, comp: FixedComponent, E: OddEData | None, t, tau,
                        cfg: PrecisionConfig = DEFAULT_PRECISION, convention: str = "derived",
                        raise_on_pole: bool = True,
                        quadrature_points: int = DEFAULT_QUADRATURE_POINTS):
    """Contribution of one fixed component to the Lefschetz number at ``(t, tau)``."""
    with working_precision(cfg):
        density = theta_density(case, comp, E, t, tau, cfg, raise_on_pole, quadrature_points)
        const = density.constant_term
        if not (mpmath.isfinite(const.real) and mpmath.isfinite(const.imag)):
            return mpmath.mpc(mpmath.inf)
        return integrate(density, comp.functional) * prefactor(case, comp, convention)


def lefschetz_total(data: EquivariantData, t, tau, cfg: PrecisionConfig = DEFAULT_PRECISION,
                    convention: str = "derived", raise_on_pole: bool = True, case=None):
    """Sum over all fixed components."""
    case = case or data.case
    with working_precision(cfg):
        total = mpmath.mpc(0)
        for comp in data.components:
            total += lefschetz_component(case, comp, data.E, t, tau, cfg, convention, raise_on_pole)
        return total


# index-form oracle -------------------------------------------------------------

def _sin_quotient(y: Jet) -> Jet:
    """``pi y / sin(pi y)`` for nilpotent ``y``."""
    if y.is_zero():
        return Jet.constant(1, y.cap, y.degrees)
    n = y.nilpotency_order()
    # taylor of sin(pi e)/e, then invert
    s = [(-1) ** k * mpmath.pi ** (2 * k + 1) / mpmath.factorial(2 * k + 1) if i == 2 * k else 0
         for i in range(n + 1) for k in [i // 2]]
    inv = taylor_inverse(s, n)
    return compose_taylor([mpmath.pi * c for c in inv], y)


def _sin_shifted(base, y: Jet, kind: str) -> Jet:
    """``sin(pi(base + y))`` or ``cos`` as a Jet."""
    n = y.nilpotency_order() if not y.is_zero() else 0
    x = mpmath.pi * base
    derivs = []
    for k in range(n + 1):
        phase = k % 4
        if kind == "sin":
            val = (mpmath.sin(x), mpmath.cos(x), -mpmath.sin(x), -mpmath.cos(x))[phase]
        else:
            val = (mpmath.cos(x), -mpmath.sin(x), -mpmath.cos(x), mpmath.sin(x))[phase]
        derivs.append(val * mpmath.pi ** k / mpmath.factorial(k))
    if y.is_zero():
        return Jet.constant(derivs[0], y.cap, y.degrees)
    return compose_taylor(derivs, y)


def oracle_prefix(case: CaseSelector, comp: FixedComponent, t, line_weight: str = "parity") -> Jet:
    """q-independent part of the index density: tangent, normal and line weight."""
    t = parse_complex(t)
    cap, degrees = comp.cap, comp.degrees
    out = Jet.constant(1, cap, degrees)
    for root in comp.tangent_roots:
        out = out * _sin_quotient(comp.jet(root))
    for ns in comp.normal:
        s = _sin_shifted(ns.rotation * t, comp.jet(ns.root), "sin") * 2j
        out = out * s.inverse() ** ns.multiplicity
    u = comp.jet(comp.u)
    base = comp.sigma * t
    if line_weight == "exp":
        w = (u * (1j * mpmath.pi)).exp() * mpmath.exp(1j * mpmath.pi * base)
    elif line_weight == "parity":
        w = _sin_shifted(base, u, "sin") * 1j if case.is_star else _sin_shifted(base, u, "cos")
    else:
        raise DomainError("line_weight must be 'parity' or 'exp'")
    return out * w


def lefschetz_oracle(case: CaseSelector, comp: FixedComponent, E: OddEData | None, t,
                     truncation: int = 32, line_weight: str = "parity",
                     cfg: PrecisionConfig = DEFAULT_PRECISION) -> QSeries:
    """q-expansion of one component's contribution from equivariant Chern characters.

    No normalising prefactor is applied; multiply the theta route by
    :func:`prefactor` (derived convention) to compare.
    """
    with working_precision(cfg):
        return _oracle(case, comp, E, parse_complex(t), truncation, line_weight)


def _oracle(case, comp, E, t, truncation, line_weight) -> QSeries:
    cap, degrees = comp.cap, comp.degrees
    basis = LineBasis(degrees)
    tangent = EquivariantBundle(
        tuple(WeightedSummand(r, 0, 1) for r in comp.tangent_roots) + tuple(comp.normal), "real-pair")
    line = WeightedSummand(comp.u, comp.sigma, 1)
    V = EquivariantBundle(comp.V, "real-pair")
    theta_case = "ThetaStar" if case.is_star else "Theta"
    q_case = {1: "Q1", 2: "Q2", 3: "Q3", "all": "QAll"}[case.lam]
    series = witten_bundle(theta_case, tangent, line, None, truncation, basis)
    if comp.V:
        series = series * witten_bundle(q_case, None, None, V, truncation, basis)
    chern = ch_equivariant(series, basis, t, cap, degrees)
    chern = chern * oracle_prefix(case, comp, t, line_weight)
    if case.is_odd:
        if E is None:
            raise DomainError("odd dimension classes need odd-factor data E")
        chern = chern * odd_chern_factor_series(case.odd_index, E, truncation, degrees, cap)
    return chern.map(lambda jet: integrate(jet, comp.functional))


def theta_path_series(case: CaseSelector, comp: FixedComponent, E: OddEData | None, t,
                      max_half: int = 8, samples: int = 48, y0="1.5",
                      cfg: PrecisionConfig = DEFAULT_PRECISION, convention: str = "derived") -> QSeries:
    """q-coefficients of the theta route at exponents ``0, 1/2, ..., max_half/2``.

    Samples ``tau_j = 2j/M + i y0`` so that ``q^{h/2}`` becomes a discrete
    Fourier mode; aliasing from exponent ``h + M`` is damped by ``exp(-pi M y0)``
    while rounding noise in coefficient ``h`` grows like ``exp(pi h y0)``. The
    coefficients themselves grow with ``|Im(m t)|``, so ``y0 = 1.5`` leaves
    more room than ``y0 = 1`` for rotations up to 3.
    """
    if max_half >= samples // 2:
        raise DomainError("too few samples for the requested number of coefficients")
    with working_precision(cfg):
        y0 = mpmath.mpf(y0)
        values = []
        for j in range(samples):
            tau = Tau(mpmath.mpc(mpmath.mpf(2 * j) / samples, y0))
            values.append(lefschetz_component(case, comp, E, t, tau, cfg, convention))
        out = {}
        for h in range(max_half + 1):
            acc = mpmath.fsum(v * mpmath.expjpi(-2 * mpmath.mpf(h * j) / samples)
                              for j, v in enumerate(values))
            out[4 * h] = acc / samples * mpmath.exp(mpmath.pi * h * y0)
        return QSeries(out, 4 * max_half)
