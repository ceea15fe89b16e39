"""Brute-force K-theory side: Witten bundles as q-series of virtual bundles.

Everything splits into equivariant line bundles. A tensor word of lines is
again a line, so a virtual bundle is a finite integer combination of
*weights*: vectors of (doubled) exponents over a basis of basic lines. Doubling
lets the spinor factor ``Delta(V)`` use square roots ``l^{1/2}``.

Nothing here touches theta functions; the Chern character is a plain sum of
exponentials, which is what makes this an independent check of the theta
formulas.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath

from .errors import CaseError, DomainError
from .jets import Jet
from .qseries import QSeries, product_expand


@dataclass(frozen=True)
class WeightedSummand:
    """A line-bundle summand: Chern root (linear expression), S^1 weight, multiplicity."""

    root: str = "0"
    rotation: int = 0
    multiplicity: int = 1

    def __post_init__(self):
        if self.multiplicity < 1:
            raise DomainError("multiplicity must be at least 1")


@dataclass(frozen=True)
class EquivariantBundle:
    """Sum of line summands; ``reality="real-pair"`` adds the conjugate of each."""

    summands: tuple = ()
    reality: str = "complex"

    def __post_init__(self):
        if self.reality not in ("complex", "real-pair"):
            raise DomainError(f"unknown reality flag {self.reality!r}")
        object.__setattr__(self, "summands", tuple(self.summands))

    @property
    def rank(self) -> int:
        n = sum(s.multiplicity for s in self.summands)
        return 2 * n if self.reality == "real-pair" else n


class LineBasis:
    """Registry of distinct basic lines ``(root, rotation)``.

    Conjugate lines are recognised and stored as exponent ``-1`` of the same
    basis element, so ``L`` and ``L-bar`` never produce separate keys.
    """

    def __init__(self, degrees: dict | None = None):
        self.degrees = dict(degrees or {})
        self.lines: list[tuple[tuple, int]] = []
        self._index: dict = {}

    def _root_form(self, root: str) -> tuple:
        if root is None or str(root).strip() in ("", "0"):
            return ()
        jet = Jet.linear(str(root), self.degrees, cap=2)
        if jet.constant_term != 0:
            raise DomainError(f"Chern root {root!r} must be linear without constant term")
        return tuple(sorted((mono[0][0], mpmath.mpf(c.real) if isinstance(c, mpmath.mpc) else c)
                            for mono, c in jet.terms.items()))

    def line(self, root: str, rotation: int) -> tuple[int, int]:
        """Return ``(index, sign)`` for the line with this root and weight."""
        form = self._root_form(root)
        key = (form, int(rotation))
        neg = (tuple((n, -c) for n, c in form), -int(rotation))
        if key in self._index:
            return self._index[key], 1
        if neg in self._index:
            return self._index[neg], -1
        self._index[key] = len(self.lines)
        self.lines.append(key)
        return len(self.lines) - 1, 1

    def __len__(self):
        return len(self.lines)


class VirtualBundle:
    """Integer combination of weights; keys are tuples of doubled exponents."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def one(cls) -> "VirtualBundle":
        return cls({(): 1})

    @classmethod
    def weight(cls, doubled: dict, coeff: int = 1) -> "VirtualBundle":
        return cls({_key(doubled): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, VirtualBundle):
            other = VirtualBundle({(): int(other)})
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return VirtualBundle(out)

    __radd__ = __add__

    def __neg__(self):
        return VirtualBundle({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, VirtualBundle):
            return VirtualBundle({k: v * int(other) for k, v in self.terms.items()})
        out: dict = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                k = _key_add(ka, kb)
                out[k] = out.get(k, 0) + va * vb
        return VirtualBundle(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, VirtualBundle):
            other = VirtualBundle({(): int(other)}) if other != 0 else VirtualBundle()
        return self.terms == other.terms

    def inverse(self) -> "VirtualBundle":
        if len(self.terms) != 1:
            raise DomainError("only a single weight with unit coefficient is invertible")
        (k, v), = self.terms.items()
        if v not in (1, -1):
            raise DomainError("only a single weight with unit coefficient is invertible")
        return VirtualBundle({tuple((i, -e) for i, e in k): v})

    def virtual_rank(self) -> int:
        return sum(self.terms.values())

    def __repr__(self):
        return f"VirtualBundle({self.terms})"


def _key(doubled: dict) -> tuple:
    return tuple(sorted((i, e) for i, e in doubled.items() if e))


def _key_add(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for i, e in b:
        d[i] = d.get(i, 0) + e
    return _key(d)


def _lines_of(bundle: EquivariantBundle, basis: LineBasis) -> list[tuple[int, int, int]]:
    """``(index, sign, multiplicity)`` for every line of the bundle."""
    out = []
    for s in bundle.summands:
        idx, sign = basis.line(s.root, s.rotation)
        out.append((idx, sign, s.multiplicity))
        if bundle.reality == "real-pair":
            out.append((idx, -sign, s.multiplicity))
    return out


def _line_power(idx: int, sign: int, k: int) -> VirtualBundle:
    return VirtualBundle.weight({idx: 2 * sign * k})


def _single_line_lambda(idx, sign, t_sign, shift, truncation) -> QSeries:
    """``(1 + t l)/(1 + t)`` with ``t = t_sign q^(shift/8)``."""
    coeffs = {0: VirtualBundle.one()}
    ell_minus_one = _line_power(idx, sign, 1) - VirtualBundle.one()
    k = 1
    while k * shift <= truncation:
        # t/(1+t) = sum_{k>=1} (-1)^{k-1} t^k
        c = (-1) ** (k - 1) * t_sign ** k
        coeffs[k * shift] = ell_minus_one * c
        k += 1
    return QSeries(coeffs, truncation)


def _single_line_sym(idx, sign, t_sign, shift, truncation) -> QSeries:
    """``(1 - t)/(1 - t l)`` with ``t = t_sign q^(shift/8)``."""
    coeffs = {0: VirtualBundle.one()}
    k = 1
    while k * shift <= truncation:
        c = t_sign ** k
        coeffs[k * shift] = (_line_power(idx, sign, k) - _line_power(idx, sign, k - 1)) * c
        k += 1
    return QSeries(coeffs, truncation)


def lambda_series(bundle: EquivariantBundle, sign: int, shift_eighths: int, truncation: int,
                  basis: LineBasis) -> QSeries:
    """``Lambda_t`` of the rank-reduced bundle for ``t = sign * q^(shift/8)``."""
    out = QSeries.constant(VirtualBundle.one(), truncation)
    for idx, s, mult in _lines_of(bundle, basis):
        factor = _single_line_lambda(idx, s, sign, shift_eighths, truncation)
        for _ in range(mult):
            out = out * factor
    return out


def symmetric_series(bundle: EquivariantBundle, sign: int, shift_eighths: int, truncation: int,
                     basis: LineBasis) -> QSeries:
    """``S_t`` of the rank-reduced bundle for ``t = sign * q^(shift/8)``."""
    out = QSeries.constant(VirtualBundle.one(), truncation)
    for idx, s, mult in _lines_of(bundle, basis):
        factor = _single_line_sym(idx, s, sign, shift_eighths, truncation)
        for _ in range(mult):
            out = out * factor
    return out


def spinor_weight(bundle: EquivariantBundle, basis: LineBasis) -> VirtualBundle:
    """``Delta(V)`` as the product over root pairs of ``l^{1/2} + l^{-1/2}``."""
    out = VirtualBundle.one()
    for s in bundle.summands:
        idx, sign = basis.line(s.root, s.rotation)
        pair = VirtualBundle.weight({idx: 1}) + VirtualBundle.weight({idx: -1})
        for _ in range(s.multiplicity):
            out = out * pair
    return out


WITTEN_CASES = ("Theta", "ThetaStar", "Q1", "Q2", "Q3", "QAll")


def witten_bundle(case: str, tangent: EquivariantBundle | None, line: WeightedSummand | None,
                  V: EquivariantBundle | None, truncation: int, basis: LineBasis) -> QSeries:
    """The q-series of one of the Witten bundles, as virtual weights.

    ``tangent`` is the complexified tangent bundle given by one root per
    complex line (use ``reality="real-pair"``), ``line`` is ``L`` whose real
    form is complexified to ``L + L-bar``, and ``V`` lists root pairs.
    """
    if case not in WITTEN_CASES:
        raise CaseError(f"unknown bundle case {case!r}")
    if case in ("Theta", "ThetaStar"):
        if tangent is None or line is None:
            raise CaseError(f"{case} needs tangent and line data")
        l_real = EquivariantBundle((line,), "real-pair")

        def S(n):
            return symmetric_series(tangent, 1, 8 * n, truncation, basis)

        out = product_expand(S, lambda n: 8 * n, truncation)
        if case == "Theta":
            out = out * product_expand(lambda m: lambda_series(l_real, 1, 8 * m, truncation, basis),
                                       lambda m: 8 * m, truncation)
            out = out * product_expand(lambda r: lambda_series(l_real, -1, 8 * r - 4, truncation, basis),
                                       lambda r: 8 * r - 4, truncation)
            out = out * product_expand(lambda s: lambda_series(l_real, 1, 8 * s - 4, truncation, basis),
                                       lambda s: 8 * s - 4, truncation)
        else:
            out = out * product_expand(lambda m: lambda_series(l_real, -1, 8 * m, truncation, basis),
                                       lambda m: 8 * m, truncation)
        return out
    if V is None:
        raise CaseError(f"{case} needs V data")
    v_c = EquivariantBundle(V.summands, "real-pair")
    if case == "QAll":
        return (witten_bundle("Q1", None, None, V, truncation, basis)
                * witten_bundle("Q2", None, None, V, truncation, basis)
                * witten_bundle("Q3", None, None, V, truncation, basis))
    if case == "Q1":
        out = product_expand(lambda n: lambda_series(v_c, 1, 8 * n, truncation, basis),
                             lambda n: 8 * n, truncation)
        return out * spinor_weight(V, basis)
    sign = -1 if case == "Q2" else 1
    return product_expand(lambda n: lambda_series(v_c, sign, 8 * n - 4, truncation, basis),
                          lambda n: 8 * n - 4, truncation)


def ch_equivariant(series: QSeries, basis: LineBasis, t, cap: int, degrees: dict | None = None,
                   root_scale=None) -> QSeries:
    """Equivariant Chern character: each weight becomes ``exp(2 pi i rot t) exp(root_scale*root)``.

    ``root_scale`` defaults to ``2 pi i`` (jet variables are Chern roots divided
    by ``2 pi i``); pass ``1`` for variables that are the roots themselves.
    """
    t = mpmath.mpmathify(t)
    two_pi_i = 2j * mpmath.pi
    scale = two_pi_i if root_scale is None else mpmath.mpmathify(root_scale)
    universe = dict(basis.degrees)
    universe.update(degrees or {})
    cache: dict = {}

    def ch_of(weight: VirtualBundle) -> Jet:
        total = Jet.zero(cap, universe)
        for key, mult in weight.terms.items():
            if key not in cache:
                rot = mpmath.mpf(0)
                root_terms: dict = {}
                for idx, e in key:
                    form, r = basis.lines[idx]
                    half = mpmath.mpf(e) / 2
                    rot += half * r
                    for name, c in form:
                        root_terms[((name, 1),)] = root_terms.get(((name, 1),), 0) + half * c * scale
                exponent = Jet(root_terms, universe, cap)
                cache[key] = exponent.exp() * mpmath.exp(two_pi_i * rot * t)
            total = total + cache[key] * mult
        return total

    return series.map(ch_of)


def reduced_rank_zero(series: QSeries) -> bool:
    """Every coefficient beyond q^0 has virtual rank 0 (tilde operations)."""
    return all(c.virtual_rank() == 0 for e, c in series.coeffs.items() if e > 0)
