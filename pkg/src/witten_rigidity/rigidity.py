"""Numerical checks of the quasi-periodicity, modularity and rigidity statements.

Every check returns a :class:`CheckReport`; failures are reported, never
raised, except for pole errors coming out of the evaluators.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import mpmath

from .errors import DomainError, PoleError
from .lefschetz import lefschetz_component, lefschetz_total
from .model import CaseSelector, EquivariantData, FixedComponent
from .parallel import ordered_map
from .precision import DEFAULT_PRECISION, PrecisionConfig, Tau, parse_complex, working_precision

log = logging.getLogger(__name__)

NEGATIVE_CONTROL_THRESHOLD = mpmath.mpf("1e-3")

S_MAP = {1: 2, 2: 1, 3: 3, "all": "all"}
T_MAP = {1: 1, 2: 3, 3: 2, "all": "all"}
RELATIONS = tuple(f"S:{a}->{b}" for a, b in S_MAP.items()) + tuple(f"T:{a}->{b}" for a, b in T_MAP.items())


def pass_tolerance(cfg: PrecisionConfig):
    """``10^-(P-20)``."""
    return cfg.tolerance(20)


@dataclass
class CheckReport:
    name: str
    residual: object
    tolerance: object
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance

    def to_dict(self) -> dict:
        return {
            "check": self.name,
            "residual": _num(self.residual),
            "tolerance": _num(self.tolerance),
            "passed": self.passed,
            "detail": _jsonable(self.detail),
        }


def _num(x):
    if isinstance(x, (int, bool, str)) or x is None:
        return x
    x = mpmath.mpmathify(x)
    if isinstance(x, mpmath.mpc):
        return {"re": mpmath.nstr(x.real, 20), "im": mpmath.nstr(x.imag, 20)}
    return mpmath.nstr(x, 20)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return _num(obj)


# anomaly condition ---------------------------------------------------------------

@dataclass(frozen=True)
class AnomalyCondition:
    """``alpha p1(L) + beta p1(V) = p1(TM)`` (equivariantly)."""

    alpha: int = 3
    beta: int = 1

    def __post_init__(self):
        if self.alpha not in (1, 3) or self.beta not in (1, 3):
            raise DomainError("alpha and beta must each be 1 or 3")

    @classmethod
    def for_case(cls, case: CaseSelector) -> "AnomalyCondition":
        return cls(case.alpha, case.beta)


def _component_anomaly(comp: FixedComponent, cond: AnomalyCondition) -> dict:
    a, b = cond.alpha, cond.beta
    scalar = (a * comp.sigma ** 2 + b * sum(v.rotation ** 2 * v.multiplicity for v in comp.V)
              - sum(n.rotation ** 2 * n.multiplicity for n in comp.normal))
    u = comp.jet(comp.u)
    mixed = u * (a * comp.sigma)
    quad = u * u * a
    for v in comp.V:
        z = comp.jet(v.root)
        mixed = mixed + z * (b * v.rotation * v.multiplicity)
        quad = quad + z * z * (b * v.multiplicity)
    for n in comp.normal:
        x = comp.jet(n.root)
        mixed = mixed - x * (n.rotation * n.multiplicity)
        quad = quad - x * x * n.multiplicity
    for y in comp.tangent_roots:
        yj = comp.jet(y)
        quad = quad - yj * yj
    return {"scalar": abs(scalar), "mixed": mixed.max_abs(), "quadratic": quad.max_abs()}


def anomaly_check(data: EquivariantData, cond: AnomalyCondition,
                  cfg: PrecisionConfig = DEFAULT_PRECISION) -> CheckReport:
    """The three identities from expanding the p1 condition in powers of t."""
    with working_precision(cfg):
        detail = {c.name: _component_anomaly(c, cond) for c in data.components}
        residual = max(max(mpmath.mpf(v) for v in d.values()) for d in detail.values())
        detail["condition"] = {"alpha": cond.alpha, "beta": cond.beta}
        return CheckReport("anomaly", residual, pass_tolerance(cfg), detail)


# quasi-periodicity ----------------------------------------------------------------

def periodicity_check(data: EquivariantData, tau, t0, shift: str,
                      cfg: PrecisionConfig = DEFAULT_PRECISION, case: CaseSelector | None = None) -> CheckReport:
    """``|L(t0 + shift) - L(t0)|`` per component, for ``shift`` in ``{"2", "2tau"}``."""
    case = case or data.case
    tau = tau if isinstance(tau, Tau) else Tau(tau)
    with working_precision(cfg):
        t0 = parse_complex(t0)
        if shift == "2":
            step = mpmath.mpf(2)
        elif shift in ("2tau", "2τ"):
            step = 2 * tau.value
        else:
            raise DomainError("shift must be '2' or '2tau'")
        detail = {}
        total_a = total_b = mpmath.mpc(0)
        for comp in data.components:
            a = lefschetz_component(case, comp, data.E, t0, tau, cfg)
            b = lefschetz_component(case, comp, data.E, t0 + step, tau, cfg)
            total_a += a
            total_b += b
            detail[comp.name] = abs(b - a)
        detail["total"] = abs(total_b - total_a)
        residual = max(detail.values())
        if shift != "2":
            anomaly = anomaly_check(data, AnomalyCondition.for_case(case), cfg)
            detail["requires_anomaly_condition"] = anomaly.passed
        return CheckReport(f"periodicity[{shift}]", residual, pass_tolerance(cfg), detail)


# modular relations ----------------------------------------------------------------

def _parse_relation(relation: str):
    try:
        gen, rest = relation.split(":")
        left, right = rest.split("->")
    except ValueError:
        raise DomainError(f"relation must look like 'S:1->2', got {relation!r}") from None
    conv = lambda s: "all" if s == "all" else int(s)
    left, right = conv(left), conv(right)
    table = {"S": S_MAP, "T": T_MAP}.get(gen)
    if table is None or table.get(left) != right:
        raise DomainError(f"unknown relation {relation!r}; choose from {RELATIONS}")
    return gen, left, right


def printed_constant(data: EquivariantData, gen: str, left, case: CaseSelector, tau: Tau):
    """The constant displayed alongside each S/T relation (``None`` where none is given)."""
    if gen == "T":
        return mpmath.mpf(1)
    if left == "all":
        return None
    comp = data.components[0]
    l, r = comp.l_bar, comp.r_bar
    expo = l - r + (mpmath.mpf(data.E.N) / 2 if case.is_odd else 0)
    power = comp.s + l - 1 if case.dimension_class == "4k+2" else 2 * case.k
    two = {1: mpmath.mpf(2) ** expo, 2: mpmath.mpf(2) ** (-expo), 3: mpmath.mpf(1)}[left]
    return two * tau.value ** power


def derived_constant(data: EquivariantData, gen: str, left, case: CaseSelector, tau: Tau):
    """The constant implied by the theta transformation laws and the derived prefactors."""
    if gen == "T":
        return mpmath.mpf(1)
    expo = data.l_bar + (mpmath.mpf(data.E.N) / 2 if case.is_odd else 0)
    two = {1: mpmath.mpf(2) ** expo, 2: mpmath.mpf(2) ** (-expo), 3: 1, "all": 1}[left]
    return two * tau.value ** (2 * case.k)


def st_relation_check(data: EquivariantData, relation: str, t_sample, tau,
                      cfg: PrecisionConfig = DEFAULT_PRECISION) -> CheckReport:
    """Ratio-constancy of ``L_left(S or T image) / L_right(t, tau)`` over ``t_sample``.

    The residual is the largest relative spread of the ratio. The detail holds
    the observed constant next to the printed and derived ones; those
    comparisons are informational.
    """
    gen, left, right = _parse_relation(relation)
    tau = tau if isinstance(tau, Tau) else Tau(tau)
    table = S_MAP if gen == "S" else T_MAP
    e = data.case.e_lambda
    case_l = CaseSelector(data.case.dimension_class, left, data.case.k, e)
    case_r = CaseSelector(data.case.dimension_class, right, data.case.k, None if e is None else table[e])
    with working_precision(cfg):
        ratios = []
        for t in t_sample:
            t = parse_complex(t)
            if gen == "S":
                lhs = lefschetz_total(data, t / tau.value, tau.s_image(), cfg, case=case_l)
            else:
                lhs = lefschetz_total(data, t, tau.t_image(), cfg, case=case_l)
            rhs = lefschetz_total(data, t, tau, cfg, case=case_r)
            ratios.append(lhs / rhs)
        ref = ratios[0]
        residual = max(abs(r - ref) for r in ratios) / abs(ref)
        observed = mpmath.fsum(ratios) / len(ratios)
        printed = printed_constant(data, gen, left, case_l, tau)
        derived = derived_constant(data, gen, left, case_l, tau)
        detail = {
            "observed_constant": observed,
            "printed_constant": printed if printed is not None else "n/a",
            "derived_constant": derived,
            "printed_match_residual": abs(observed - printed) / abs(observed) if printed is not None else "n/a",
            "derived_match_residual": abs(observed - derived) / abs(observed),
        }
        return CheckReport(f"st[{relation}]", residual, pass_tolerance(cfg), detail)


# rigidity scan ---------------------------------------------------------------------

def default_grid(n: int = 5, lo=0.05, hi=0.45) -> list:
    """``n x n`` grid over ``[lo, hi] + i [lo, hi]`` (exact decimal spacing)."""
    if n < 1:
        raise DomainError("grid size must be positive")
    lo, hi = mpmath.mpf(str(lo)), mpmath.mpf(str(hi))
    step = (hi - lo) / (n - 1) if n > 1 else 0
    return [mpmath.mpc(lo + i * step, lo + j * step) for j in range(n) for i in range(n)]


@dataclass
class ScanReport:
    values: list
    max_deviation: object
    mean_value: object
    excluded: list = field(default_factory=list)

    def rows(self):
        """``(t, value, deviation)`` for each evaluated grid point."""
        return [(t, v, abs(v - self.mean_value)) for t, v in self.values]


def _scan_point(args):
    data, t, tau, cfg = args
    try:
        return lefschetz_total(data, t, tau, cfg)
    except PoleError as exc:
        return exc


def rigidity_scan(data: EquivariantData, tau, t_grid=None, cfg: PrecisionConfig = DEFAULT_PRECISION) -> ScanReport:
    """Evaluate the Lefschetz number on a grid and measure its spread."""
    tau = tau if isinstance(tau, Tau) else Tau(tau)
    grid = default_grid() if t_grid is None else [parse_complex(t) for t in t_grid]
    results = ordered_map(_scan_point, [(data, t, tau, cfg) for t in grid])
    with working_precision(cfg):
        values, excluded = [], []
        for t, r in zip(grid, results):
            if isinstance(r, PoleError):
                log.warning("grid point %s hits a pole: %s", mpmath.nstr(t, 8), r)
                excluded.append(t)
            else:
                values.append((t, r))
        if not values:
            raise DomainError("every grid point hit a pole")
        mean = mpmath.fsum(v for _, v in values) / len(values)
        dev = max(abs(v - mean) for _, v in values)
        return ScanReport(values, dev, mean, excluded)


# pole lattice -----------------------------------------------------------------------

@dataclass
class PoleScanReport:
    predicted: list
    detected: list
    unmatched: list
    near_values: list

    @property
    def passed(self) -> bool:
        return not self.unmatched


def predicted_poles(data: EquivariantData, tau: Tau, box=((0, 1), (0, 1))) -> list:
    """Points ``(a + b tau)/m`` in the box for every normal rotation ``m``."""
    (x0, x1), (y0, y1) = box
    ms = sorted({abs(n.rotation) for c in data.components for n in c.normal})
    seen, out = set(), []
    tv = tau.value
    for m in ms:
        bmin = math.floor(y0 * m / float(tv.imag)) - 1
        bmax = math.ceil(y1 * m / float(tv.imag)) + 1
        for b in range(bmin, bmax + 1):
            amin = math.floor(x0 * m - b * float(tv.real)) - 1
            amax = math.ceil(x1 * m - b * float(tv.real)) + 1
            for a in range(amin, amax + 1):
                p = (a + b * tv) / m
                if x0 <= p.real <= x1 and y0 <= p.imag <= y1:
                    key = (round(float(p.real), 12), round(float(p.imag), 12))
                    if key not in seen:
                        seen.add(key)
                        out.append(p)
    return out


def _safe_total(data, t, tau, cfg):
    try:
        return lefschetz_total(data, t, tau, cfg, raise_on_pole=False)
    except PoleError:
        return mpmath.mpc(mpmath.inf)


def _scan_value(args):
    data, t, tau, cfg = args
    return abs(_safe_total(data, t, tau, cfg))


def _refine(data, t0, h, tau, cfg, iterations: int = 60):
    """Secant iteration on ``1/L`` starting from a grid seed."""
    def g(t):
        v = _safe_total(data, t, tau, cfg)
        return 0 if not mpmath.isfinite(abs(v)) else 1 / v

    a, b = t0, t0 + h / 7
    ga, gb = g(a), g(b)
    for _ in range(iterations):
        if gb == 0:
            return b
        if gb == ga:
            return None
        c = b - gb * (b - a) / (gb - ga)
        if abs(c - b) < mpmath.mpf(10) ** (-(cfg.digits // 2)):
            return c
        if abs(c - t0) > 4 * abs(h):
            return None
        a, ga, b, gb = b, gb, c, g(c)
    return None


def pole_scan(data: EquivariantData, tau, box=((0, 1), (0, 1)), cfg: PrecisionConfig = DEFAULT_PRECISION,
              grid: int = 31, blowup=mpmath.mpf("1e10"), match=mpmath.mpf("1e-4")) -> PoleScanReport:
    """Compare predicted pole points with blow-ups found by sampling ``|L|``.

    Seeds are grid points whose value is a local maximum exceeding a hundred
    times the grid median; each is refined to a zero of ``1/L`` and kept if
    ``|L|`` exceeds ``blowup`` just beside it.
    """
    tau = tau if isinstance(tau, Tau) else Tau(tau)
    (x0, x1), (y0, y1) = box
    predicted = predicted_poles(data, tau, box)
    with working_precision(cfg):
        hx = mpmath.mpf(x1 - x0) / grid
        hy = mpmath.mpf(y1 - y0) / grid
        # shift the grid off the lattice so no sample lands on a predicted point
        pts = [[mpmath.mpc(x0 + (i + mpmath.mpf("0.4713")) * hx, y0 + (j + mpmath.mpf("0.3821")) * hy)
                for i in range(grid)] for j in range(grid)]
        flat = [p for row in pts for p in row]
        vals = ordered_map(_scan_value, [(data, p, tau, cfg) for p in flat])
        mags = [[vals[j * grid + i] for i in range(grid)] for j in range(grid)]
        finite = sorted(v for v in vals if mpmath.isfinite(v))
        median = finite[len(finite) // 2] if finite else mpmath.mpf(0)
        seeds = []
        for j in range(grid):
            for i in range(grid):
                v = mags[j][i]
                if not v > 100 * median:
                    continue
                neigh = [mags[jj][ii] for jj in range(max(0, j - 1), min(grid, j + 2))
                         for ii in range(max(0, i - 1), min(grid, i + 2)) if (ii, jj) != (i, j)]
                if all(v >= w for w in neigh):
                    seeds.append(pts[j][i])
        detected = []
        delta = mpmath.mpf("1e-15")
        for s in seeds:
            root = _refine(data, s, mpmath.mpc(hx, hy) / 2, tau, cfg)
            if root is None:
                continue
            if any(abs(root - d) < mpmath.mpf("1e-8") for d, _ in detected):
                continue
            mag = abs(_safe_total(data, root + delta * mpmath.mpc(1, 1), tau, cfg))
            if mag > blowup:
                detected.append((root, mag))
        unmatched = [d for d, _ in detected if not predicted or min(abs(d - p) for p in predicted) > match]
        near = [(p, abs(_safe_total(data, p + delta * mpmath.mpc(1, 1), tau, cfg))) for p in predicted]
        return PoleScanReport(predicted, detected, unmatched, near)
