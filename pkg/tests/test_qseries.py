from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from witten_rigidity.errors import DivergenceError, DomainError, InversionError
from witten_rigidity.jets import Jet
from witten_rigidity.qseries import QSeries, product_expand, qs_invert, to_eighths

TRUNC = 24

series = st.dictionaries(st.integers(min_value=0, max_value=TRUNC), st.integers(min_value=-4, max_value=4),
                         max_size=6).map(lambda d: QSeries(d, TRUNC))


@given(series, series, series)
def test_ring(a, b, c):
    assert ((a + b) * c).max_abs_diff(a * c + b * c) == 0
    assert ((a * b) * c).max_abs_diff(a * (b * c)) == 0
    assert (a * b).max_abs_diff(b * a) == 0
    assert (a - a).coeffs == {}


@given(series)
def test_inversion(a):
    a = a + QSeries.constant(1 if a.coefficient(0) == 0 else 0, TRUNC)
    if a.coefficient(0) == 0:
        a = a + 1
    prod = a * qs_invert(a)
    assert prod.max_abs_diff(QSeries.constant(1, TRUNC)) < mpmath.mpf(10) ** -10


def test_inversion_needs_unit():
    with pytest.raises(InversionError):
        qs_invert(QSeries({8: 1}, TRUNC))
    with pytest.raises(InversionError):
        qs_invert(QSeries({0: Jet.variable("x", 2, 2)}, TRUNC))


def test_eighths():
    assert to_eighths("1/2") == 4
    assert to_eighths(Fraction(3, 8)) == 3
    assert to_eighths(2) == 16
    with pytest.raises(DomainError):
        to_eighths("1/3")
    with pytest.raises(DomainError):
        to_eighths(-1)


def test_truncation_and_mixed():
    a = QSeries({0: 1, 8: 1}, 16)
    b = QSeries({0: 1, 8: 1}, 8)
    assert (a * b).truncation == 8
    assert (a ** 3).coefficient(16) == 3
    assert a.coefficient_at("1") == 1
    assert a.with_truncation(4).coeffs == {0: 1}


def test_euler_product():
    # prod (1 - q^n) = 1 - q - q^2 + q^5 + q^7 - ...
    out = product_expand(lambda n: QSeries({0: 1, 8 * n: -1}, 64), lambda n: 8 * n, 64)
    expected = {0: 1, 8: -1, 16: -1, 40: 1, 56: 1}
    assert {e: int(c) for e, c in out.coeffs.items()} == expected


def test_product_schedule_errors():
    with pytest.raises(DivergenceError):
        product_expand(lambda n: QSeries.constant(1, 8), lambda n: 0, 8)
    with pytest.raises(DivergenceError):
        product_expand(lambda n: QSeries.constant(1, 8), lambda n: 4 if n < 3 else 2, 8)
    with pytest.raises(DivergenceError):
        product_expand(lambda n: QSeries.constant(1, 8), lambda n: 1, 8, max_stall=3)


def test_evaluate():
    s = QSeries({0: 1, 8: 2}, 16)
    tau = mpmath.mpc(0, 1)
    assert abs(s.evaluate(tau) - (1 + 2 * mpmath.exp(-2 * mpmath.pi))) < 1e-14
    with pytest.raises(DomainError):
        s.evaluate()


def test_render():
    text = QSeries({0: 1, 4: "0.5", 8: -2}, 8).render(5)
    assert text == "1.0 + (0.5)*q^(1/2) + (-2.0)*q + O(q^(9/8))"
    assert QSeries({}, 8).render() == "0"
