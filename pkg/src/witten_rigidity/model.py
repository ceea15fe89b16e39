"""Problem-instance data: case selector, fixed components and odd-factor data."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .bundles import WeightedSummand
from .errors import CaseError, DomainError
from .jets import IntegrationFunctional, Jet

DIMENSION_CLASSES = ("4k", "4k+2", "4k-1", "4k+1")
LAMBDAS = (1, 2, 3, "all")


def coerce_lambda(value):
    if value in ("all", "ALL", "All"):
        return "all"
    try:
        lam = int(value)
    except (TypeError, ValueError):
        raise CaseError(f"lambda must be 1, 2, 3 or 'all', got {value!r}") from None
    if lam not in (1, 2, 3):
        raise CaseError(f"lambda must be 1, 2, 3 or 'all', got {value!r}")
    return lam


@dataclass(frozen=True)
class CaseSelector:
    """Dimension class, the ``Q_lambda(V)`` index and ``k``.

    ``e_lambda`` selects the ``Q_j(E)`` factor in odd dimensions; it defaults to
    ``lam`` and may be ``"all"`` independently of ``lam``.
    """

    dimension_class: str
    lam: object = 1
    k: int = 1
    e_lambda: object = None

    def __post_init__(self):
        if self.dimension_class not in DIMENSION_CLASSES:
            raise CaseError(f"dimension class must be one of {DIMENSION_CLASSES}")
        object.__setattr__(self, "lam", coerce_lambda(self.lam))
        if self.e_lambda is not None:
            object.__setattr__(self, "e_lambda", coerce_lambda(self.e_lambda))
        if self.k < 0:
            raise CaseError("k must be non-negative")
        if self.dimension_class == "4k-1" and self.k < 1:
            raise CaseError("the 4k-1 class needs k >= 1")

    @property
    def is_star(self) -> bool:
        """Theta* cases (4k+2 and 4k+1)."""
        return self.dimension_class in ("4k+2", "4k+1")

    @property
    def is_odd(self) -> bool:
        return self.dimension_class in ("4k-1", "4k+1")

    @property
    def dim(self) -> int:
        return {"4k": 4 * self.k, "4k+2": 4 * self.k + 2,
                "4k-1": 4 * self.k - 1, "4k+1": 4 * self.k + 1}[self.dimension_class]

    @property
    def odd_index(self):
        return self.lam if self.e_lambda is None else self.e_lambda

    @property
    def alpha(self) -> int:
        """Coefficient of ``p1(L)`` in the anomaly condition for this case."""
        return 1 if self.is_star else 3

    @property
    def beta(self) -> int:
        """Coefficient of ``p1(V)``."""
        return 3 if self.lam == "all" else 1

    def with_lambda(self, lam) -> "CaseSelector":
        e = self.e_lambda
        return CaseSelector(self.dimension_class, lam, self.k, e)


@dataclass(frozen=True)
class FixedComponent:
    """One connected component of the fixed-point set.

    ``normal`` and ``V`` hold one :class:`WeightedSummand` per group of lines
    sharing a Chern root; for ``V`` the multiplicity counts root pairs.
    ``degrees`` is the variable universe (name -> cohomological degree).
    """

    name: str
    s: int
    tangent_roots: tuple = ()
    normal: tuple = ()
    V: tuple = ()
    sigma: int = 0
    u: str = "0"
    functional: IntegrationFunctional = field(default_factory=IntegrationFunctional.point)
    degrees: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "tangent_roots", tuple(self.tangent_roots))
        object.__setattr__(self, "normal", tuple(self.normal))
        object.__setattr__(self, "V", tuple(self.V))
        if self.s < 0:
            raise DomainError("s must be non-negative")
        if len(self.tangent_roots) != self.s:
            raise DomainError(f"component {self.name!r}: {len(self.tangent_roots)} tangent roots for s={self.s}")
        for ns in self.normal:
            if ns.rotation == 0:
                raise DomainError(f"component {self.name!r}: normal rotations must be non-zero")

    @property
    def r_bar(self) -> int:
        return sum(ns.multiplicity for ns in self.normal)

    @property
    def l_bar(self) -> int:
        return sum(vs.multiplicity for vs in self.V)

    @property
    def cap(self) -> int:
        return self.functional.top_degree

    def jet(self, expr: str) -> Jet:
        return Jet.linear(expr, self.degrees, self.cap) if expr not in ("", "0", None) else Jet.zero(self.cap, self.degrees)

    def with_sigma(self, sigma: int) -> "FixedComponent":
        return FixedComponent(self.name, self.s, self.tangent_roots, self.normal, self.V, sigma,
                              self.u, self.functional, self.degrees)

    def negated(self) -> "FixedComponent":
        """All rotations negated (used by the conjugation-symmetry property)."""
        neg = lambda items: tuple(WeightedSummand(x.root, -x.rotation, x.multiplicity) for x in items)
        return FixedComponent(self.name, self.s, self.tangent_roots, neg(self.normal), neg(self.V),
                              -self.sigma, self.u, self.functional, self.degrees)


@dataclass(frozen=True)
class OddEData:
    """Model of ``Tr[g^{-1}dg f(R)]`` as ``sum_i w_i f((u^2-u) a_i)``.

    ``trace_components`` holds ``(w, a)`` pairs of linear expressions; each
    ``w`` must have odd degree and each ``a`` even degree.
    """

    N: int
    trace_components: tuple = ()
    c3_is_zero: bool = True

    def __post_init__(self):
        if self.N <= 0 or self.N % 2:
            raise DomainError("N must be a positive even integer")
        object.__setattr__(self, "trace_components", tuple(tuple(p) for p in self.trace_components))

    def jets(self, degrees: dict, cap: int) -> list[tuple[Jet, Jet]]:
        out = []
        for w, a in self.trace_components:
            wj = Jet.linear(w, degrees, cap)
            aj = Jet.linear(a, degrees, cap) if a not in ("0", "") else Jet.zero(cap, degrees)
            if any(d % 2 == 0 for d in wj.degrees_present()):
                raise DomainError(f"trace component w={w!r} must have odd degree")
            if any(d % 2 == 1 for d in aj.degrees_present()):
                raise DomainError(f"trace component a={a!r} must have even degree")
            out.append((wj, aj))
        return out


@dataclass(frozen=True)
class EquivariantData:
    """A full problem: case, fixed components and optional odd-factor data."""

    case: CaseSelector
    components: tuple
    E: OddEData | None = None
    name: str = "instance"

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise DomainError("at least one fixed component is required")
        if self.case.is_odd and self.E is None:
            raise CaseError("odd dimension classes need odd-factor data E")
        dim = self.case.dim
        odd = 1 if self.case.is_odd else 0
        lbars = {c.l_bar for c in self.components}
        if len(lbars) > 1:
            raise DomainError("all components must carry the same number of V root pairs")
        for c in self.components:
            if 2 * c.s + 2 * c.r_bar + odd != dim:
                raise DomainError(
                    f"component {c.name!r}: 2s + 2r + {odd} = {2 * c.s + 2 * c.r_bar + odd} != dim {dim}")
            if c.functional.top_degree != 2 * c.s + odd:
                raise DomainError(f"component {c.name!r}: functional top degree must be {2 * c.s + odd}")

    @property
    def l_bar(self) -> int:
        return self.components[0].l_bar

    def with_case(self, case: CaseSelector) -> "EquivariantData":
        return EquivariantData(case, self.components, self.E, self.name)

    def with_components(self, components: Sequence[FixedComponent]) -> "EquivariantData":
        return EquivariantData(self.case, tuple(components), self.E, self.name)
