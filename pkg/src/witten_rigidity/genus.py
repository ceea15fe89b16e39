"""Generalized Witten genera as q-series.

Chern roots here are the roots themselves (no ``2 pi i`` rescaling), so the
A-hat class is ``prod (y/2)/sinh(y/2)`` and the line factor is ``exp(c/2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import mpmath

from .bundles import EquivariantBundle, LineBasis, WeightedSummand, ch_equivariant, witten_bundle
from .errors import CaseError, DomainError
from .jets import IntegrationFunctional, Jet, compose_taylor, integrate, taylor_inverse
from .model import CaseSelector, OddEData
from .odd_factor import odd_chern_factor_series
from .precision import DEFAULT_PRECISION, PrecisionConfig, working_precision
from .qseries import DEFAULT_TRUNCATION, QSeries


@dataclass(frozen=True)
class ManifoldData:
    """Chern-root data for a whole manifold.

    ``tangent_roots`` has one root per ``+-`` pair; ``V`` lists
    :class:`WeightedSummand` root pairs (rotations are ignored). For odd
    dimensions ``E`` supplies the odd factor and ``degrees`` must contain its
    degree-1 variable.
    """

    dim: int
    tangent_roots: tuple = ()
    line_root: str = "0"
    V: tuple = ()
    E: OddEData | None = None
    functional: IntegrationFunctional = field(default_factory=IntegrationFunctional.point)
    degrees: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "tangent_roots", tuple(self.tangent_roots))
        object.__setattr__(self, "V", tuple(self.V))
        if self.dim <= 0:
            raise DomainError("dim must be positive")
        if self.functional.top_degree != self.dim:
            raise DomainError("functional top degree must equal dim")
        if self.dim % 2 and self.E is None:
            raise CaseError("odd-dimensional data needs odd-factor data E")

    def jet(self, expr: str) -> Jet:
        cap = self.functional.top_degree
        if expr in ("", "0", None):
            return Jet.zero(cap, self.degrees)
        return Jet.linear(expr, self.degrees, cap)


def _ahat_factor(y: Jet) -> Jet:
    """``(y/2)/sinh(y/2)``."""
    if y.is_zero():
        return Jet.constant(1, y.cap, y.degrees)
    n = y.nilpotency_order()
    # sinh(y/2)/(y/2) = sum (y/2)^{2k}/(2k+1)!
    s = [mpmath.mpf(2) ** (-i) / mpmath.factorial(i + 1) if i % 2 == 0 else 0 for i in range(n + 1)]
    return compose_taylor(taylor_inverse(s, n), y)


def witten_genus(case: CaseSelector, data: ManifoldData, truncation: int = DEFAULT_TRUNCATION,
                 cfg: PrecisionConfig = DEFAULT_PRECISION) -> QSeries:
    """The genus ``int A-hat(TM) exp(c/2) ch(Theta or Theta*) ch(Q_lam(V)) [ch(Q_j(E))]``."""
    if case.dim != data.dim:
        raise CaseError(f"case {case.dimension_class} with k={case.k} has dimension {case.dim}, "
                        f"data has dimension {data.dim}")
    with working_precision(cfg):
        cap, degrees = data.functional.top_degree, data.degrees
        basis = LineBasis(degrees)
        tangent = EquivariantBundle(tuple(WeightedSummand(r, 0, 1) for r in data.tangent_roots), "real-pair")
        line = WeightedSummand(data.line_root, 0, 1)
        series = witten_bundle("ThetaStar" if case.is_star else "Theta", tangent, line, None,
                               truncation, basis)
        if data.V:
            V = EquivariantBundle(tuple(WeightedSummand(v.root, 0, v.multiplicity) for v in data.V))
            q_case = {1: "Q1", 2: "Q2", 3: "Q3", "all": "QAll"}[case.lam]
            series = series * witten_bundle(q_case, None, None, V, truncation, basis)
        chern = ch_equivariant(series, basis, 0, cap, degrees, root_scale=1)
        pre = Jet.constant(1, cap, degrees)
        for r in data.tangent_roots:
            pre = pre * _ahat_factor(data.jet(r))
        pre = pre * (data.jet(data.line_root) * mpmath.mpf(0.5)).exp()
        chern = chern * pre
        if case.is_odd:
            chern = chern * odd_chern_factor_series(case.odd_index, data.E, truncation, degrees, cap)
        return chern.map(lambda jet: integrate(jet, data.functional))
