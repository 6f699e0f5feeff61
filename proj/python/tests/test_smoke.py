import math

import pytest

import cda_lab


def test_uniform_bne():
    mkt = cda_lab.Market.linear(0.0, 1.0, 1.0, 1.0)
    sol = cda_lab.solve_bne(mkt)
    assert sol.exists
    assert sol.a_minus == pytest.approx(0.25, abs=1e-12)
    assert sol.b_plus == pytest.approx(0.75, abs=1e-12)
    assert sol.ask(0.3) == pytest.approx(2 * 0.3 / 3 + 0.25, abs=1e-12)
    assert cda_lab.buyer_payoff(mkt, sol, 0.75, 1.0) == pytest.approx(1.0, abs=1e-9)


def test_numeric_matches_closed_form():
    mkt = cda_lab.Market.linear(0.3, 0.6, 1.0, 1.0)
    cf = cda_lab.solve_bne(mkt, "closed_form")
    num = cda_lab.solve_bne(mkt, "shooting")
    assert num.exists and cf.exists
    for x in (0.5, 0.6, 0.7):
        assert num.A(x) == pytest.approx(cf.A(x), abs=1e-6)


def test_nonexistence_is_reported():
    sol = cda_lab.solve_bne(cda_lab.Market.linear(0.0, 0.5, 1.0, 0.5))
    assert not sol.exists
    assert sol.failure


def test_welfare_equality():
    w = cda_lab.welfare(cda_lab.Market.linear(0.3, 0.6, 1.0, 1.0))
    assert w["bne"][2] == pytest.approx(0.35, abs=1e-8)
    assert w["competitive"][2] == pytest.approx(0.35, abs=1e-12)


def test_simulate_zic_is_seeded():
    mkt = cda_lab.Market.linear(0.1, 0.7, 0.55, 0.05)
    a = cda_lab.simulate(mkt, "zic", runs=5000, seed=7, workers=2)
    b = cda_lab.simulate(mkt, "zic", runs=5000, seed=7, workers=1)
    assert a["prices"] == b["prices"]
    assert abs(a["mean_price"] - 0.4385) < 0.01
    assert a["ks"] < 0.03


def test_one_price_jump():
    mkt = cda_lab.Market.linear(0.0, 1.0, 1.0, 1.0)
    value, right = cda_lab.one_price_payoff(mkt, 0.5, 0.5, 1.0)
    assert value == pytest.approx(1.0, abs=1e-10)
    assert right == pytest.approx(1.5, abs=1e-10)


def test_errors_are_translated():
    with pytest.raises(cda_lab.CdaError):
        cda_lab.Market.linear(0.6, 0.1, 0.5, 0.1)
    assert not math.isnan(cda_lab.competitive_equilibrium(cda_lab.Market.linear(0, 1, 1, 1))[0])
