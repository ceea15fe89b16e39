import mpmath
import pytest

from witten_rigidity.errors import DomainError, QuadratureError
from witten_rigidity.instance import load_instance
from witten_rigidity.jets import Jet
from witten_rigidity.model import OddEData
from witten_rigidity.odd_factor import (
    c3_residual,
    exact_moment,
    gauss_legendre,
    odd_chern_factor,
    odd_chern_factor_exact,
    odd_chern_factor_series,
    prefactor,
    quadrature_moments,
    s_identity_residuals,
)
from witten_rigidity.precision import PrecisionConfig, Tau, working_precision

DEG = {"e": 1, "p": 2, "r": 2}
TAU = Tau("0.3+0.8i")
E = OddEData(4, (("e", "p"), ("e", "r"), ("e", "-p-r")))


def test_gauss_legendre_integrates_polynomials(cfg):
    with working_precision(cfg):
        nodes, weights = gauss_legendre(5)
        assert abs(mpmath.fsum(weights) - 1) < mpmath.mpf(10) ** -70
        for k in range(10):
            approx = mpmath.fsum(w * x ** k for x, w in zip(nodes, weights))
            assert abs(approx - mpmath.mpf(1) / (k + 1)) < mpmath.mpf(10) ** -70
        with pytest.raises(ValueError):
            gauss_legendre(0)


def test_moments(cfg):
    with working_precision(cfg):
        got = quadrature_moments(8, 5)
        for k, m in enumerate(got):
            assert abs(m - exact_moment(k)) < mpmath.mpf(10) ** -70
    assert exact_moment(1) == mpmath.mpf(-1) / 6


def test_prefactor():
    base = -1 / (8 * mpmath.pi ** 2)
    assert prefactor(1, 4) == 4 * base
    assert prefactor("all", 2) == 2 * base
    assert prefactor(3, 4) == base


@pytest.mark.parametrize("j", [1, 2, 3, "all"])
def test_quadrature_matches_closed_form(cfg, j):
    with working_precision(cfg):
        a = odd_chern_factor(j, E, TAU, 32, cfg, DEG, 7)
        b = odd_chern_factor_exact(j, E, TAU, cfg, DEG, 7)
        assert a.distance(b) < mpmath.mpf(10) ** -55


@pytest.mark.parametrize("j", [1, 2, 3])
def test_series_matches_closed_form(cfg, j):
    with working_precision(cfg):
        series = odd_chern_factor_series(j, E, 160, DEG, 7)
        summed = series.evaluate(TAU)
        assert summed.distance(odd_chern_factor_exact(j, E, TAU, cfg, DEG, 7)) < mpmath.mpf(10) ** -40


def test_constant_map_gives_zero(cfg):
    empty = OddEData(4, ())
    assert odd_chern_factor(1, empty, TAU, cfg=cfg, degrees=DEG).is_zero()
    flat = OddEData(4, (("e", "0"),))
    # a = 0 leaves only the v^0 term of theta_j'/theta_j, which vanishes
    assert odd_chern_factor(2, flat, TAU, cfg=cfg, degrees=DEG).max_abs() < mpmath.mpf(10) ** -70


def test_too_few_nodes_detected(cfg):
    with pytest.raises(QuadratureError):
        odd_chern_factor(1, E, TAU, 2, cfg, DEG, 7)


def test_s_identity_holds_when_c3_vanishes(cfg):
    assert c3_residual(E, DEG) == 0
    res = s_identity_residuals(E, TAU, cfg, DEG, 7)
    assert all(v < mpmath.mpf(10) ** -40 for v in res.values())


def test_s_identity_fails_when_c3_nonzero(cfg):
    bad = OddEData(4, (("e", "p"), ("e", "r")))
    assert c3_residual(bad, DEG) > 0
    res = s_identity_residuals(bad, TAU, cfg, DEG, 7)
    assert max(res.values()) > mpmath.mpf(10) ** -3


def test_bundled_toy_instance(cfg):
    inst = load_instance("odd_toy")
    degrees = inst.data.components[0].degrees
    assert c3_residual(inst.data.E, degrees) == 0
    res = s_identity_residuals(inst.data.E, inst.tau, cfg, degrees, 7)
    assert res["1->2"] < mpmath.mpf(10) ** -40


def test_trace_degree_validation():
    with pytest.raises(DomainError):
        OddEData(4, (("p", "p"),)).jets(DEG, 7)
    with pytest.raises(DomainError):
        OddEData(4, (("e", "e"),)).jets(DEG, 7)
    with pytest.raises(DomainError):
        OddEData(3)
