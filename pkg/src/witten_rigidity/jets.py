"""Truncated graded-commutative series in named form variables.

A :class:`Jet` stores a finite map from monomials to complex coefficients and
drops every monomial whose cohomological degree exceeds ``cap``. Variables
usually carry degree 2 (Chern roots); one odd-degree variable may appear per
monomial, which is all the odd-factor model needs.

Example::

    >>> x = Jet.variable("x", 2, cap=4)
    >>> (x.exp()).coefficient({"x": 2})
    mpc(real='0.5', imag='0.0')
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import mpmath

from .errors import ArityError, DomainError, InversionError, OddDegreeError

# A monomial is a sorted tuple of (variable name, positive power).
Monomial = tuple

ONE: Monomial = ()

_TOKEN = re.compile(r"\s*([+-]?)\s*([0-9]*\.?[0-9]*(?:[eE][+-]?[0-9]+)?)\s*\*?\s*([A-Za-z_][A-Za-z0-9_]*)?\s*")
_FACTOR = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^([0-9]+))?$")


def parse_monomial(text: str) -> Monomial:
    """Parse ``"x^2*y"`` (or ``"1"`` for the unit monomial)."""
    text = text.strip()
    if text in ("", "1"):
        return ONE
    powers: dict[str, int] = {}
    for part in text.split("*"):
        m = _FACTOR.match(part.strip())
        if not m:
            raise DomainError(f"bad monomial {text!r}")
        name, power = m.group(1), int(m.group(2) or 1)
        powers[name] = powers.get(name, 0) + power
    return _normalize(powers)


def format_monomial(mono: Monomial) -> str:
    if not mono:
        return "1"
    return "*".join(name if p == 1 else f"{name}^{p}" for name, p in mono)


def _normalize(powers: Mapping[str, int]) -> Monomial:
    return tuple(sorted((n, p) for n, p in powers.items() if p))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    powers = dict(a)
    for name, p in b:
        powers[name] = powers.get(name, 0) + p
    return _normalize(powers)


class Jet:
    """Truncated polynomial in graded variables with mpmath coefficients.

    ``degrees`` maps each variable name to its cohomological degree; ``cap``
    is the largest total degree kept.
    """

    __slots__ = ("cap", "degrees", "terms")

    def __init__(self, terms: Mapping | None = None, degrees: Mapping[str, int] | None = None,
                 cap: int = 0):
        if cap < 0:
            raise DomainError("cap must be non-negative")
        self.cap = int(cap)
        self.degrees = dict(degrees or {})
        self.terms: dict = {}
        for mono, coeff in (terms or {}).items():
            if isinstance(mono, str):
                mono = parse_monomial(mono)
            elif isinstance(mono, dict):
                mono = _normalize(mono)
            for name, _ in mono:
                if name not in self.degrees:
                    raise DomainError(f"variable {name!r} has no degree")
            if self._mono_degree(mono) > self.cap:
                continue
            coeff = mpmath.mpmathify(coeff)
            if coeff != 0:
                self.terms[mono] = self.terms.get(mono, 0) + coeff

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, cap: int = 0, degrees=None) -> "Jet":
        return cls({ONE: value}, degrees, cap)

    @classmethod
    def zero(cls, cap: int = 0, degrees=None) -> "Jet":
        return cls({}, degrees, cap)

    @classmethod
    def variable(cls, name: str, degree: int = 2, cap: int = 2, degrees=None) -> "Jet":
        if degree <= 0:
            raise DomainError("variable degree must be positive")
        universe = dict(degrees or {})
        universe[name] = degree
        return cls({((name, 1),): 1}, universe, cap)

    @classmethod
    def linear(cls, expr: str, degrees: Mapping[str, int], cap: int) -> "Jet":
        """Parse a linear combination like ``"x - 2*y + 0.5"``."""
        text = expr.replace(" ", "")
        if not text:
            raise DomainError("empty linear expression")
        terms: dict = {}
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos or not (m.group(2) or m.group(3)):
                raise DomainError(f"cannot parse linear expression {expr!r}")
            sign = -1 if m.group(1) == "-" else 1
            coeff = mpmath.mpf(m.group(2)) if m.group(2) else mpmath.mpf(1)
            mono = ((m.group(3), 1),) if m.group(3) else ONE
            terms[mono] = terms.get(mono, 0) + sign * coeff
            pos = m.end()
            if pos < len(text) and text[pos] not in "+-":
                raise DomainError(f"cannot parse linear expression {expr!r}")
        return cls(terms, degrees, cap)

    # bookkeeping ------------------------------------------------------
    def _mono_degree(self, mono: Monomial) -> int:
        return sum(self.degrees[n] * p for n, p in mono)

    def _is_odd(self, mono: Monomial) -> bool:
        return self._mono_degree(mono) % 2 == 1

    def _compatible(self, other: "Jet") -> tuple[dict, int]:
        degrees = dict(self.degrees)
        for name, deg in other.degrees.items():
            if degrees.setdefault(name, deg) != deg:
                raise DomainError(f"variable {name!r} has conflicting degrees")
        return degrees, min(self.cap, other.cap)

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.cap, self.degrees)

    def with_cap(self, cap: int) -> "Jet":
        return Jet(self.terms, self.degrees, cap)

    def copy(self) -> "Jet":
        out = Jet.__new__(Jet)
        out.cap, out.degrees, out.terms = self.cap, dict(self.degrees), dict(self.terms)
        return out

    @property
    def constant_term(self):
        return self.terms.get(ONE, mpmath.mpc(0))

    def coefficient(self, mono) -> object:
        if isinstance(mono, str):
            mono = parse_monomial(mono)
        elif isinstance(mono, dict):
            mono = _normalize(mono)
        return mpmath.mpc(self.terms.get(mono, 0))

    def homogeneous_part(self, degree: int) -> "Jet":
        return Jet({m: c for m, c in self.terms.items() if self._mono_degree(m) == degree},
                   self.degrees, self.cap)

    def without_constant(self) -> "Jet":
        return Jet({m: c for m, c in self.terms.items() if m != ONE}, self.degrees, self.cap)

    def degrees_present(self) -> list[int]:
        return sorted({self._mono_degree(m) for m in self.terms})

    def is_zero(self) -> bool:
        return not self.terms

    def max_abs(self):
        return max((abs(c) for c in self.terms.values()), default=mpmath.mpf(0))

    def distance(self, other) -> object:
        """Largest coefficient difference (the jets' common truncation applies)."""
        return (self - self._lift(other)).max_abs()

    def map_coefficients(self, fn) -> "Jet":
        return Jet({m: fn(c) for m, c in self.terms.items()}, self.degrees, self.cap)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        degrees, cap = self._compatible(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return Jet(terms, degrees, cap)

    __radd__ = __add__

    def __neg__(self):
        return self.map_coefficients(lambda c: -c)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            other = mpmath.mpmathify(other)
            return Jet({m: c * other for m, c in self.terms.items()}, self.degrees, self.cap)
        degrees, cap = self._compatible(other)
        probe = Jet.__new__(Jet)
        probe.degrees = degrees
        terms: dict = {}
        for ma, ca in self.terms.items():
            da = probe._mono_degree(ma)
            odd_a = da % 2 == 1
            for mb, cb in other.terms.items():
                db = probe._mono_degree(mb)
                if da + db > cap:
                    continue
                if odd_a and db % 2 == 1:
                    raise OddDegreeError("product of two odd-degree factors")
                m = _mono_mul(ma, mb)
                terms[m] = terms.get(m, 0) + ca * cb
        return Jet(terms, degrees, cap)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.inverse()
        return self * (1 / mpmath.mpmathify(other))

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise DomainError("only non-negative integer powers are supported")
        out = Jet.constant(1, self.cap, self.degrees)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other):
        if not isinstance(other, Jet):
            other = self._lift(other)
        return self.cap == other.cap and (self - other).is_zero()

    def __repr__(self):
        if not self.terms:
            return f"Jet(0, cap={self.cap})"
        parts = [f"({mpmath.nstr(c, 8)})*{format_monomial(m)}" for m, c in sorted(self.terms.items())]
        return f"Jet({' + '.join(parts)}, cap={self.cap})"

    # analytic operations -----------------------------------------------
    def nilpotency_order(self) -> int:
        """Largest ``k`` with ``self**k`` possibly non-zero (constant term ignored)."""
        degs = [self._mono_degree(m) for m in self.terms if m != ONE]
        if not degs:
            return 0
        return self.cap // min(degs)

    def exp(self) -> "Jet":
        a = self.constant_term
        nil = self.without_constant()
        coeffs = [mpmath.exp(a) / mpmath.factorial(k) for k in range(nil.nilpotency_order() + 1)]
        return compose_taylor(coeffs, nil)

    def inverse(self) -> "Jet":
        a = self.constant_term
        if a == 0:
            raise InversionError("jet with zero constant term is not invertible")
        nil = self.without_constant()
        coeffs = [(-1) ** k / a ** (k + 1) for k in range(nil.nilpotency_order() + 1)]
        return compose_taylor(coeffs, nil)


def compose_taylor(coeffs, jet: Jet) -> Jet:
    """``sum_k coeffs[k] * jet**k`` for a jet without constant term (Horner form)."""
    if jet.constant_term != 0:
        raise DomainError("composition needs a jet with zero constant term")
    needed = jet.nilpotency_order()
    if len(coeffs) < needed + 1:
        raise ArityError(f"need {needed + 1} Taylor coefficients, got {len(coeffs)}")
    out = Jet.constant(coeffs[needed], jet.cap, jet.degrees)
    for k in range(needed - 1, -1, -1):
        out = out * jet + coeffs[k]
    return out


def compose_analytic(derivatives, jet: Jet) -> Jet:
    """Taylor composition ``f(a + jet)`` from ``[f(a), f'(a), f''(a), ...]``."""
    if len(derivatives) < 1:
        raise ArityError("at least f(a) is required")
    coeffs = [mpmath.mpmathify(d) / math.factorial(k) for k, d in enumerate(derivatives)]
    return compose_taylor(coeffs, jet)


# scalar Taylor-list helpers used by the theta quotients ------------------

def taylor_mul(a, b, order: int) -> list:
    out = []
    for k in range(order + 1):
        acc = mpmath.mpc(0)
        for i in range(max(0, k - len(b) + 1), min(k, len(a) - 1) + 1):
            acc += a[i] * b[k - i]
        out.append(acc)
    return out


def taylor_inverse(a, order: int) -> list:
    if a[0] == 0:
        raise InversionError("Taylor series with zero constant term")
    out = [1 / a[0]]
    for k in range(1, order + 1):
        acc = mpmath.mpc(0)
        for i in range(1, min(k, len(a) - 1) + 1):
            acc += a[i] * out[k - i]
        out.append(-acc / a[0])
    return out


@dataclass
class IntegrationFunctional:
    """Intersection numbers for top-degree monomials; missing monomials read as 0."""

    top_degree: int
    pairings: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.top_degree < 0:
            raise DomainError("top_degree must be non-negative")
        parsed = {}
        for mono, value in self.pairings.items():
            if isinstance(mono, str):
                mono = parse_monomial(mono)
            parsed[mono] = mpmath.mpmathify(value)
        self.pairings = parsed

    @classmethod
    def point(cls) -> "IntegrationFunctional":
        return cls(0, {ONE: 1})


def integrate(jet: Jet, functional: IntegrationFunctional):
    """Pair the degree-``top_degree`` part of ``jet`` with the functional."""
    if jet.cap < functional.top_degree:
        raise DomainError(f"jet cap {jet.cap} is below the top degree {functional.top_degree}")
    if functional.top_degree == 0:
        return mpmath.mpc(jet.constant_term) * functional.pairings.get(ONE, 1)
    total = mpmath.mpc(0)
    for mono, coeff in jet.terms.items():
        if jet._mono_degree(mono) == functional.top_degree:
            total += coeff * functional.pairings.get(mono, 0)
    return total


def variables(names: Iterable[str], degree: int, cap: int, degrees=None) -> list[Jet]:
    """Convenience: several variables sharing one degree universe."""
    universe = dict(degrees or {})
    for n in names:
        universe[n] = degree
    return [Jet.variable(n, degree, cap, universe) for n in names]
