import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from witten_rigidity.errors import ArityError, DomainError, InversionError, OddDegreeError
from witten_rigidity.jets import (
    IntegrationFunctional,
    Jet,
    compose_analytic,
    compose_taylor,
    format_monomial,
    integrate,
    parse_monomial,
    taylor_inverse,
    taylor_mul,
)

DEG = {"x": 2, "y": 2, "e": 1}
CAP = 6

monomials = st.sampled_from(["1", "x", "y", "x^2", "x*y", "y^2", "x^3", "x^2*y"])
odd_monomials = st.sampled_from(["e", "e*x", "e*y^2"])
coeffs = st.integers(min_value=-5, max_value=5)


@st.composite
def jets(draw):
    terms = draw(st.dictionaries(monomials, coeffs, max_size=5))
    return Jet(terms, DEG, CAP)


@given(jets(), jets(), jets())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Jet.zero(CAP, DEG)
    assert a * 1 == a


@given(jets(), jets(), st.dictionaries(odd_monomials, coeffs, max_size=3))
def test_odd_part_is_a_module(a, b, odd):
    w = Jet(odd, DEG, CAP)
    assert (a * b) * w == a * (b * w)
    assert w * a == a * w


def test_two_odd_factors_rejected():
    e = Jet.variable("e", 1, CAP, DEG)
    with pytest.raises(OddDegreeError):
        e * e


@given(jets())
def test_inverse(a):
    if a.constant_term == 0:
        a = a + 1
    one = a * a.inverse()
    assert one.distance(Jet.constant(1, CAP, DEG)) < mpmath.mpf(10) ** -12


def test_exp_of_sum():
    x = Jet.variable("x", 2, CAP, DEG)
    y = Jet.variable("y", 2, CAP, DEG)
    lhs = (x + y).exp()
    rhs = x.exp() * y.exp()
    assert lhs.distance(rhs) < mpmath.mpf(10) ** -14
    assert x.exp().coefficient({"x": 3}) == mpmath.mpf(1) / 6


def test_cap_truncates():
    x = Jet.variable("x", 2, 4, DEG)
    assert (x ** 3).is_zero()
    assert x.nilpotency_order() == 2


def test_linear_parsing():
    j = Jet.linear("x - 2*y + 0.5", DEG, 2)
    assert j.coefficient("x") == 1
    assert j.coefficient("y") == -2
    assert j.constant_term == mpmath.mpf("0.5")
    with pytest.raises(DomainError):
        Jet.linear("x**y", DEG, 2)
    with pytest.raises(DomainError):
        Jet.linear("", DEG, 2)


def test_monomial_round_trip():
    for text in ("x^2*y", "e*x", "1"):
        assert format_monomial(parse_monomial(text)) == text
    with pytest.raises(DomainError):
        parse_monomial("x^")


def test_unknown_variable():
    with pytest.raises(DomainError):
        Jet({"z": 1}, DEG, 2)


def test_compose_taylor_matches_exp():
    x = Jet.variable("x", 2, CAP, DEG)
    coeffs = [1 / mpmath.factorial(k) for k in range(4)]
    assert compose_taylor(coeffs, x) == x.exp()
    assert compose_analytic([1, 1, 1, 1], x) == x.exp()
    with pytest.raises(ArityError):
        compose_taylor([1], x)
    with pytest.raises(DomainError):
        compose_taylor(coeffs, x + 1)


def test_taylor_helpers():
    a = [mpmath.mpf(1), mpmath.mpf(2), mpmath.mpf(3)]
    inv = taylor_inverse(a, 4)
    prod = taylor_mul(a, inv, 4)
    assert abs(prod[0] - 1) < 1e-30 and all(abs(c) < 1e-30 for c in prod[1:])
    with pytest.raises(InversionError):
        taylor_inverse([0, 1], 2)
    with pytest.raises(InversionError):
        Jet.variable("x", 2, 4, DEG).inverse()


def test_integrate():
    x = Jet.variable("x", 2, 4, DEG)
    f = IntegrationFunctional(4, {"x^2": 3})
    assert integrate(x.exp(), f) == mpmath.mpf(3) / 2
    assert integrate(Jet.constant(5, 0), IntegrationFunctional.point()) == 5
    with pytest.raises(DomainError):
        integrate(Jet.constant(1, 2, DEG), f)
