import mpmath
import pytest

from witten_rigidity.bundles import WeightedSummand as W
from witten_rigidity.errors import DomainError, PoleError
from witten_rigidity.jets import IntegrationFunctional
from witten_rigidity.lefschetz import (
    lefschetz_component,
    lefschetz_oracle,
    lefschetz_total,
    oracle_prefix,
    prefactor,
    theta_density,
    theta_path_series,
)
from witten_rigidity.model import CaseSelector, EquivariantData, FixedComponent, OddEData
from witten_rigidity.precision import PrecisionConfig, working_precision

TAU = "0.3+0.8i"
T = mpmath.mpc("0.137", "0.043")
P0 = FixedComponent("zero", 0, (), (W("0", 1),), (), 1, "0")
PINF = FixedComponent("infinity", 0, (), (W("0", -1),), (), -1, "0")


def tol(cfg, headroom=20):
    return cfg.tolerance(headroom)


def test_cp1_fixed_point_is_one_half(cfg):
    case = CaseSelector("4k+2", 2, 0)
    for t in ("0.21+0.13i", "0.07-0.3i"):
        value = lefschetz_component(case, P0, None, t, TAU, cfg)
        assert abs(value - mpmath.mpf(1) / 2) < tol(cfg)


@pytest.mark.parametrize("lam", [1, 2, 3])
def test_cp1_total_is_one(cfg, lam):
    data = EquivariantData(CaseSelector("4k+2", lam, 0), (P0, PINF))
    assert abs(lefschetz_total(data, "0.31+0.02i", "-0.1+1.2i", cfg) - 1) < tol(cfg)


def test_single_component_total(cfg):
    data = EquivariantData(CaseSelector("4k+2", 1, 0), (P0,))
    assert lefschetz_total(data, T, TAU, cfg) == lefschetz_component(data.case, P0, None, T, TAU, cfg)


def test_empty_v_lambda_two_and_three_agree(cfg):
    comp = FixedComponent("p", 0, (), (W("0", 1), W("0", 2)), (), 1, "0")
    a = lefschetz_component(CaseSelector("4k", 2, 1), comp, None, T, TAU, cfg)
    b = lefschetz_component(CaseSelector("4k", 3, 1), comp, None, T, TAU, cfg)
    assert abs(a - b) < tol(cfg)
    oa = lefschetz_oracle(CaseSelector("4k", 2, 1), comp, None, T, 8, cfg=cfg)
    ob = lefschetz_oracle(CaseSelector("4k", 3, 1), comp, None, T, 8, cfg=cfg)
    assert abs(oa.coefficient(0) - ob.coefficient(0)) < tol(cfg)


def test_negated_rotations_mirror_t(cfg):
    comp = FixedComponent("p", 0, (), (W("0", 1), W("0", 2)), (W("0", 1), W("0", 1)), 1, "0")
    case = CaseSelector("4k", 1, 1)
    a = lefschetz_component(case, comp.negated(), None, T, TAU, cfg)
    b = lefschetz_component(case, comp, None, -T, TAU, cfg)
    assert abs(a - b) < tol(cfg)


def test_pole_is_reported(cfg):
    case = CaseSelector("4k+2", 2, 0)
    with pytest.raises(PoleError) as info:
        lefschetz_component(case, P0, None, 0, TAU, cfg)
    assert info.value.component == "zero"
    value = lefschetz_component(case, P0, None, 0, TAU, cfg, raise_on_pole=False)
    assert not mpmath.isfinite(abs(value))


def test_prefactor_conventions():
    comp = FixedComponent("p", 0, (), (W("0", 1), W("0", 2)), (W("0", 1),), 1, "0")
    for lam in (1, 2, 3):
        case = CaseSelector("4k", lam, 1)
        d, p = prefactor(case, comp, "derived"), prefactor(case, comp, "printed")
        sign = 1 if lam == 1 else (-1) ** (comp.r_bar + 1)
        assert abs(p - sign * d) < 1e-14
    with pytest.raises(DomainError):
        prefactor(CaseSelector("4k", 1, 1), comp, "other")


def test_oracle_q0_for_cp1_point(cfg):
    series = lefschetz_oracle(CaseSelector("4k+2", 2, 0), P0, None, T, 16, cfg=cfg)
    with working_precision(cfg):
        assert abs(series.coefficient(0) - mpmath.mpf(1) / 2) < tol(cfg)
        assert all(abs(series.coefficient(e)) < tol(cfg) for e in range(1, 17))


def _compare(case, comp, E, cfg, max_half=4, samples=32):
    with working_precision(cfg):
        oracle = lefschetz_oracle(case, comp, E, T, 4 * max_half, cfg=cfg)
        path = theta_path_series(case, comp, E, T, max_half, samples, cfg=cfg)
        return max(abs(path.coefficient(4 * h) - oracle.coefficient(4 * h)) for h in range(max_half + 1))


@pytest.mark.parametrize("lam", [1, 2, 3, "all"])
def test_theta_path_matches_oracle_even(lam):
    cfg = PrecisionConfig(40)
    comp = FixedComponent("p", 0, (), (W("0", 1), W("0", -2)), (W("0", 1), W("0", 3)), 2, "0")
    assert _compare(CaseSelector("4k", lam, 1), comp, None, cfg) < cfg.tolerance(15)


def test_theta_path_matches_oracle_with_roots():
    cfg = PrecisionConfig(40)
    deg = {"y": 2}
    comp = FixedComponent("c", 1, ("y",), (W("y", 1),), (W("y", 2),), -1, "y",
                          IntegrationFunctional(2, {"y": 2}), deg)
    assert _compare(CaseSelector("4k+2", 3, 1), comp, None, cfg) < cfg.tolerance(15)


def test_theta_path_matches_oracle_odd():
    cfg = PrecisionConfig(40)
    deg = {"e": 1, "y": 2}
    E = OddEData(4, (("e", "y"), ("e", "-0.5*y")))
    comp = FixedComponent("c", 1, ("y",), (W("2*y", 3),), (W("y", 1),), 1, "-y",
                          IntegrationFunctional(3, {"e*y": 1}), deg)
    case = CaseSelector("4k+1", 2, 1, e_lambda="all")
    assert _compare(case, comp, E, cfg) < cfg.tolerance(15)


def test_exp_line_weight_differs_from_parity(cfg):
    case = CaseSelector("4k", 1, 1)
    comp = FixedComponent("p", 0, (), (W("0", 1), W("0", 1)), (), 1, "0")
    with working_precision(cfg):
        a = oracle_prefix(case, comp, T, "parity").constant_term
        b = oracle_prefix(case, comp, T, "exp").constant_term
        assert abs(a - b) > 1e-3
        with pytest.raises(DomainError):
            oracle_prefix(case, comp, T, "other")


def test_odd_case_needs_e(cfg):
    deg = {"e": 1, "y": 2}
    comp = FixedComponent("c", 1, ("y",), (W("y", 1),), (), 1, "0", IntegrationFunctional(3, {"e*y": 1}), deg)
    with pytest.raises(DomainError):
        theta_density(CaseSelector("4k+1", 1, 1), comp, None, T, TAU, cfg)


def test_sample_count_guard(cfg):
    with pytest.raises(DomainError):
        theta_path_series(CaseSelector("4k+2", 2, 0), P0, None, T, 8, 16, cfg=cfg)
