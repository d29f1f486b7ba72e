import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdcovert.link import OutageInputs, log_ratio, mc_outage, outage_for, outage_probability, sinr_bob
from fdcovert.model import ChannelDraw, ChannelStats, SystemParams
from fdcovert.rng import RandomSource

STATS = ChannelStats()
FIG2 = SystemParams(p_a=1.0, p_b_max=100.0, sigma2_b=1.0, phi=0.01, rate=1.0)

# double integral of the outage event over (g_bb, P_b) after integrating g_ab,
# scipy dblquad (abs err ~2e-9)
FIG2_DELTA = 0.7450054025655729


def no_an_outage(params, stats):
    mu = (2.0**params.rate - 1.0) / params.p_a
    return 1.0 - math.exp(-mu * params.sigma2_b / stats.lambda_ab)


def test_mu():
    inputs = OutageInputs(SystemParams(p_a=2.0, rate=3.0), STATS)
    assert inputs.mu == pytest.approx(3.5, rel=1e-15)


def test_sinr_examples():
    p = SystemParams(p_a=1.0, sigma2_b=1.0, phi=0.0)
    assert sinr_bob(ChannelDraw(g_ab=1.0, p_b=5.0), p) == 1.0
    p = SystemParams(p_a=1.0, sigma2_b=1.0, phi=0.01)
    assert sinr_bob(ChannelDraw(g_ab=2.0, g_bb=1.0, p_b=100.0), p) == 1.0
    assert sinr_bob(ChannelDraw(g_ab=3.0, p_b=0.0), p.with_(sigma2_b=2.0)) == 1.5


def test_no_an_limit():
    p = FIG2.with_(p_b_max=0.0)
    assert outage_for(p, STATS) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-15)
    assert outage_for(FIG2.with_(phi=0.0), STATS) == pytest.approx(0.6321205588285577, rel=1e-15)


def test_quadrature_value():
    assert outage_for(FIG2, STATS) == pytest.approx(FIG2_DELTA, abs=1e-8)


def test_mc_fig2_point():
    est = mc_outage(OutageInputs(FIG2, STATS), 1_000_000, RandomSource(7))
    assert abs(est.value - outage_for(FIG2, STATS)) < 0.005


def test_mc_no_an():
    p = FIG2.with_(phi=0.0)
    n = 100_000
    est = mc_outage(OutageInputs(p, STATS), n, RandomSource(8))
    ref = no_an_outage(p, STATS)
    assert abs(est.value - ref) < 3 * math.sqrt(ref * (1 - ref) / n)


def test_vanishing_rate():
    p = FIG2.with_(rate=1e-9)
    assert outage_for(p, STATS) < 1e-8
    assert mc_outage(OutageInputs(p, STATS), 10_000, RandomSource(9)).value < 1e-3


def test_monotone_in_cap_fig2():
    assert outage_for(FIG2.with_(p_b_max=10.0), STATS) < outage_for(FIG2, STATS)


def test_series_branch_continuity():
    p = FIG2.with_(p_b_max=1e-8)
    ref = no_an_outage(p, STATS)
    assert abs(outage_for(p, STATS) - ref) / ref < 1e-6
    # both sides of the switch agree
    lam = 1.7
    below, above = log_ratio(0.999999e-6 * lam, lam), log_ratio(1.000001e-6 * lam, lam)
    assert below == pytest.approx(above, rel=1e-11)
    assert log_ratio(0.0, lam) == 1.0


def test_mc_independent_of_workers():
    inputs = OutageInputs(FIG2, STATS)
    assert mc_outage(inputs, 150_000, RandomSource(3), 1) == mc_outage(inputs, 150_000, RandomSource(3), 4)


params_st = st.builds(
    SystemParams,
    p_a=st.floats(0.01, 100.0),
    p_b_max=st.floats(0.0, 1000.0),
    sigma2_b=st.floats(0.01, 10.0),
    phi=st.floats(0.0, 1.0),
    rate=st.floats(0.01, 4.0),
)
stats_st = st.builds(ChannelStats, *[st.floats(0.1, 10.0)] * 4)
factor = st.floats(1.01, 10.0)


@given(params_st, stats_st)
def test_delta_is_probability(params, stats):
    assert 0.0 <= outage_for(params, stats) <= 1.0


@given(params_st, stats_st, factor)
def test_monotone_ladders(params, stats, k):
    d = outage_for(params, stats)
    tol = 1e-12
    assert outage_for(params.with_(p_b_max=params.p_b_max * k), stats) >= d - tol
    assert outage_for(params.with_(sigma2_b=params.sigma2_b * k), stats) >= d - tol
    assert outage_for(params.with_(phi=min(1.0, params.phi * k)), stats) >= d - tol
    assert outage_for(params.with_(rate=params.rate * k), stats) >= d - tol
    assert outage_for(params.with_(p_a=params.p_a * k), stats) <= d + tol


@settings(max_examples=20, deadline=None)
@given(params_st, stats_st, st.integers(0, 2**32))
def test_closed_form_vs_mc(params, stats, seed):
    n = 20_000
    d = outage_for(params, stats)
    est = mc_outage(OutageInputs(params, stats), n, RandomSource(seed))
    assert abs(est.value - d) < 5 * math.sqrt(d * (1 - d) / n) + 1e-3


def test_mc_rejects_small_samples():
    with pytest.raises(ValueError):
        mc_outage(OutageInputs(FIG2, STATS), 10, RandomSource(0))


def test_estimate_float():
    est = mc_outage(OutageInputs(FIG2, STATS), 5000, RandomSource(0))
    assert float(est) == est.value
    assert est.stderr == pytest.approx(np.sqrt(est.value * (1 - est.value) / 5000))
