import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from degmap.convexify import eval_pwa
from degmap.dispatch import (
    MAX_PLANES,
    DispatchProblem,
    build_lp,
    dispatch,
    epigraph_gap,
)
from degmap.errors import InvalidArgumentError
from degmap.reference import load_reference
from degmap.types import PwaMap
from oracles import brute_force_dispatch, random_dispatch_problem

LFP = load_reference("LFP").pwa
VEE = PwaMap(((0.5, 0.0, 1e-4), (-0.5, 0.0, 1e-4)))


def problem(**kw):
    base = dict(prices=[0.1, 0.3], dt=1.0, p_min=-1.0, p_max=1.0, e0=0.5, c_e=1.0,
                eta_c=0.95, eta_d=0.95, pwa=LFP, degradation_price=100.0)
    base.update(kw)
    return DispatchProblem(**base)


def test_single_plane_single_step():
    lp = build_lp(problem(prices=[0.2], pwa=PwaMap(((1e-5, 2e-5, 3e-5),))))
    assert lp.epigraph_rows == 1
    assert lp.c.size == 4


def test_lfp_day_ahead_row_count():
    lp = build_lp(problem(prices=np.ones(24)))
    assert lp.epigraph_rows == 24 * 18
    assert lp.A_eq.shape == (24, 96)


def test_soe_recursion_and_tightness():
    rng = np.random.default_rng(3)
    prob = problem(prices=rng.uniform(0, 1, 24), c_e=15.0, e0=7.5, p_min=-15.0, p_max=15.0,
                   degradation_price=500.0)
    sol = dispatch(prob)
    soe = np.append(sol.soe, sol.soe_final)
    step = prob.dt * (prob.eta_c * sol.charge - sol.discharge / prob.eta_d)
    np.testing.assert_allclose(np.diff(soe), step, atol=1e-9)
    assert np.all(np.abs(epigraph_gap(prob, sol)) <= 1e-7)
    assert sol.duality_gap <= 1e-7
    assert sol.simultaneous == ()


def test_zero_degradation_price_matches_plain_lp():
    rng = np.random.default_rng(5)
    prices = rng.uniform(0, 1, 12)
    with_pwa = dispatch(problem(prices=prices, degradation_price=0.0))
    plain = dispatch(problem(prices=prices, pwa=None, degradation_price=0.0))
    assert with_pwa.objective == pytest.approx(plain.objective, abs=1e-9)
    np.testing.assert_allclose(with_pwa.power, plain.power, atol=1e-7)


@pytest.mark.parametrize("price", [0.0, 0.02])
def test_flat_prices_rest(price):
    # marginal degradation cost 0.5 * 1.0 per kWh beats any flat price below it
    prob = problem(prices=[price] * 3, pwa=VEE, degradation_price=1.0)
    sol = dispatch(prob)
    np.testing.assert_allclose(sol.power, 0.0, atol=1e-9)
    best, profile = brute_force_dispatch(prob)
    np.testing.assert_allclose(profile, 0.0)
    assert sol.objective == pytest.approx(best, abs=1e-12)


def test_price_spread_charge_then_discharge():
    prob = problem(prices=[0.05, 1.0], pwa=VEE, degradation_price=0.01, e0=0.0)
    sol = dispatch(prob)
    assert sol.power[0] > 0 and sol.power[1] < 0
    best, profile = brute_force_dispatch(prob)
    assert profile[0] > 0 and profile[1] < 0
    assert sol.objective <= best + 1e-9


@given(st.integers(0, 10_000))
@settings(max_examples=15)
def test_objective_monotone_in_degradation_price(seed):
    rng = np.random.default_rng(seed)
    prob = random_dispatch_problem(rng, LFP, horizon=6)
    free = DispatchProblem(**{**prob.__dict__, "degradation_price": 0.0})
    assert dispatch(prob).objective >= dispatch(free).objective - 1e-9


@given(st.integers(0, 10_000))
@settings(max_examples=20)
def test_never_worse_than_grid_search(seed):
    rng = np.random.default_rng(seed)
    prob = random_dispatch_problem(rng, load_reference(rng.choice(["LFP", "NMC_LMO", "LCO"])).pwa)
    sol = dispatch(prob)
    best, _ = brute_force_dispatch(prob)
    assert sol.objective <= best + 1e-6
    if prob.degradation_price > 0:
        assert np.all(np.abs(epigraph_gap(prob, sol)) <= 1e-7)


def test_epigraph_never_below_surface_without_price():
    prob = problem(prices=[0.3, 0.1, 0.5], degradation_price=0.0)
    sol = dispatch(prob)
    assert np.all(epigraph_gap(prob, sol) >= -1e-9)


def test_deterministic():
    prob = problem(prices=np.linspace(0.1, 0.9, 10) % 0.37)
    a, b = dispatch(prob), dispatch(prob)
    assert np.array_equal(a.power, b.power) and a.objective == b.objective


def test_power_consistent_with_eval():
    prob = problem(prices=[0.4, 0.1], degradation_price=50.0)
    sol = dispatch(prob)
    for t in range(2):
        exact = eval_pwa(LFP, sol.power[t], sol.soe[t], prob.c_e).value
        assert sol.deg_cost_rate[t] == pytest.approx(exact, abs=1e-7)


@pytest.mark.parametrize("kw", [
    dict(prices=[]),
    dict(dt=0.0),
    dict(p_min=0.5),
    dict(p_max=-0.1),
    dict(e0=1.5),
    dict(c_e=0.0),
    dict(eta_c=0.0),
    dict(eta_d=1.2),
    dict(degradation_price=-1.0),
    dict(pwa=PwaMap(tuple((float(k), 0.0, 0.0) for k in range(MAX_PLANES + 1)))),
])
def test_invalid_problem(kw):
    with pytest.raises(InvalidArgumentError):
        problem(**kw)
