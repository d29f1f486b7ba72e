"""Exit criteria. Each test prints one PASS/FAIL line; run with ``-s`` or ``-v``
to see them, or execute this file directly.
"""

import csv
import io
import math
import time

import numpy as np
import pytest

from fdcovert import covertness as cov
from fdcovert.cli import main
from fdcovert.config import ScenarioConfig
from fdcovert.detection import (
    false_alarm_rate,
    grid_search_threshold,
    grid_step,
    mc_detection_error,
    miss_detection_rate,
    optimal_threshold,
)
from fdcovert.link import OutageInputs, mc_outage, outage_probability
from fdcovert.model import ChannelStats, SystemParams, breakpoints, sample_draw
from fdcovert.rng import RandomSource
from fdcovert.sweep import run_preset
from fdcovert.verification import random_scenario

SEED = 20180101
STATS = ChannelStats()
# parameters of the maximum covert rate figure
FIG4 = SystemParams(p_a=1.0, p_b_max=1.0, sigma2_b=1.0, phi=0.01, rate=1.0)


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} {detail}".rstrip())
        assert ok, f"criterion {number} failed: {detail}"

    return emit


def binomial_tol(p, n):
    return 3.0 * math.sqrt(p * (1.0 - p) / n) + 1e-3


def test_1_false_alarm_and_miss_rates(report):
    n, pairs = 100_000, 200
    params = SystemParams(p_a=1.0, p_b_max=2.0, sigma2_w=1.0)
    start = time.perf_counter()
    worst, ok = 0.0, True
    for i in range(pairs):
        gen = RandomSource(SEED, (1, i)).generator()
        draw = sample_draw(STATS, params, gen)
        tau = gen.uniform(0.0, 1.1 * breakpoints(draw, params).rho3)
        mc = mc_detection_error(tau, draw, params, n, RandomSource(SEED, (2, i)))
        for closed, est in ((false_alarm_rate(tau, draw, params), mc.alpha),
                            (miss_detection_rate(tau, draw, params), mc.beta)):
            ratio = abs(closed - est) / binomial_tol(closed, n)
            worst = max(worst, ratio)
            ok &= ratio < 1.0
    elapsed = time.perf_counter() - start
    report(1, "alpha/beta closed vs MC", ok and elapsed < 30,
           f"(worst deviation/tolerance {worst:.3f}, {elapsed:.1f}s)")


def test_2_optimal_threshold_vs_grid(report):
    grid_points, draws = 10_000, 1000
    params = SystemParams(p_a=1.0, p_b_max=2.0, sigma2_w=1.0)
    start = time.perf_counter()
    value_ok = where_ok = True
    worst = 0.0
    for i in range(draws):
        draw = sample_draw(STATS, params, RandomSource(SEED, (3, i)))
        sol = optimal_threshold(draw, params)
        grid = grid_search_threshold(draw, params, grid_points)
        step = grid_step(draw, params, grid_points)
        bound = 2.0 * step / (params.p_b_max * draw.g_bw)
        worst = max(worst, abs(grid.xi_star - sol.xi_star) / bound)
        value_ok &= abs(grid.xi_star - sol.xi_star) <= bound
        where_ok &= sol.tau_lo - step <= grid.tau_lo <= sol.tau_hi + step
    elapsed = time.perf_counter() - start
    report(2, "grid search vs optimal threshold", value_ok and where_ok and elapsed < 10,
           f"(worst deviation/bound {worst:.3f}, argmin in interval: {where_ok}, {elapsed:.1f}s)")


def test_3_warden_noise_invariance(report):
    params = SystemParams(p_a=1.0, p_b_max=2.0)
    ok = True
    for i in range(100):
        draw = sample_draw(STATS, params, RandomSource(SEED, (4, i)))
        values = {optimal_threshold(draw, params.with_(sigma2_w=s)).xi_star for s in (0.01, 1.0, 100.0)}
        ok &= len(values) == 1
    report(3, "xi_star identical across sigma2_w in {0.01, 1, 100}", ok)


def test_4_outage_closed_vs_mc(report):
    n = 100_000
    start = time.perf_counter()
    worst, ok = 0.0, True
    for i in range(50):
        params, stats = random_scenario(RandomSource(SEED, (5, i)).generator())
        inputs = OutageInputs(params, stats)
        closed = outage_probability(inputs)
        est = mc_outage(inputs, n, RandomSource(SEED, (6, i)))
        ratio = abs(closed - est.value) / binomial_tol(closed, n)
        worst = max(worst, ratio)
        ok &= ratio < 1.0
    inputs = OutageInputs(FIG4.with_(p_b_max=1e-8), STATS)
    limit = 1.0 - math.exp(-inputs.mu * FIG4.sigma2_b / STATS.lambda_ab)
    rel = abs(outage_probability(inputs) - limit) / limit
    elapsed = time.perf_counter() - start
    report(4, "outage closed vs MC and small-cap limit", ok and rel < 1e-6 and elapsed < 60,
           f"(worst deviation/tolerance {worst:.3f}, limit rel err {rel:.2e}, {elapsed:.1f}s)")


def test_5_expected_error_closed_vs_mc(report):
    n = 100_000
    worst_direct = worst_factor = 0.0
    for i in range(50):
        params, stats = random_scenario(RandomSource(SEED, (7, i)).generator())
        closed = cov.expected_xi_star(cov.t_of_powers(params, stats))
        est = cov.mc_expected_xi(params, stats, n, RandomSource(SEED, (8, i)))
        cond = cov.mc_conditional_xi(params, stats, n, RandomSource(SEED, (9, i)))
        p_cover = cov.prob_rho1_geq_rho2(params, stats)
        worst_direct = max(worst_direct, abs(closed - est.value) / (3 * est.stderr + 1e-3))
        sigma = math.hypot(est.stderr, p_cover * cond.stderr)
        worst_factor = max(worst_factor, abs(p_cover * cond.value - est.value) / (3 * sigma + 1e-3))
    report(5, "expected detection error closed vs MC, factorisation", worst_direct < 1 and worst_factor < 1,
           f"(worst ratios {worst_direct:.3f}, {worst_factor:.3f})")


def test_6_optimal_an_power(report):
    worst_active = worst_rate = 0.0
    for eps in (0.05, 0.1, 0.2, 0.5):
        d = cov.design(FIG4, STATS, eps)
        t = cov.t_of_powers(FIG4.with_(p_b_max=d.p_b_max_star), STATS)
        worst_active = max(worst_active, abs(cov.expected_xi_star(t) - (1 - eps)))
        ref = cov.max_covert_rate_closed_form(FIG4, STATS, d.t_eps)
        worst_rate = max(worst_rate, abs(ref - d.r_c_star) / ref)
    report(6, "constraint active and rate closed form", worst_active <= 1e-9 and worst_rate <= 1e-10,
           f"(constraint residual {worst_active:.2e}, rate rel diff {worst_rate:.2e})")


def test_7_large_power_limit(report):
    ok, worst = True, 0.0
    for eps in (0.05, 0.1, 0.2):
        lim = cov.covert_rate_limit(STATS, FIG4.rate, FIG4.phi, eps)
        ratios = [cov.max_covert_rate(FIG4.with_(p_a=pa), STATS, eps) / lim for pa in (1, 10, 1e2, 1e4, 1e6)]
        worst = max(worst, abs(1 - ratios[-1]))
        ok &= abs(1 - ratios[-1]) <= 1e-4 and all(a <= b for a, b in zip(ratios, ratios[1:]))
    report(7, "rate at p_a=1e6 vs limit, monotone ratio", ok, f"(rel gap {worst:.2e})")


def _curves(table, key):
    out = {}
    for row in table.rows:
        out.setdefault(tuple(row[table.columns.index(k)] for k in key), []).append(row)
    return out


def test_8_figure_trends(report):
    cfg = ScenarioConfig(seed=SEED)
    times = {}
    start = time.perf_counter()
    fig2 = run_preset("fig2", cfg)
    times["fig2"] = time.perf_counter() - start
    d = fig2.columns.index("delta")
    curves = _curves(fig2, ("sigma2_b_db", "rate"))
    ok2 = all(all(a[d] < b[d] for a, b in zip(rs, rs[1:])) for rs in curves.values())
    last = {k: rs[-1][d] for k, rs in curves.items()}
    first = {k: rs[0][d] for k, rs in curves.items()}
    for at in (first, last):
        ok2 &= at[(-5.0, 0.5)] < at[(0.0, 0.5)] and at[(-5.0, 1.0)] < at[(0.0, 1.0)]
        ok2 &= at[(-5.0, 0.5)] < at[(-5.0, 1.0)] and at[(0.0, 0.5)] < at[(0.0, 1.0)]

    start = time.perf_counter()
    fig3 = run_preset("fig3", cfg)
    times["fig3"] = time.perf_counter() - start
    x = fig3.columns.index("expected_xi")
    curves = _curves(fig3, ("p_a_db",))
    ok3 = all(all(a[x] < b[x] for a, b in zip(rs, rs[1:])) for rs in curves.values())
    ok3 &= all(rs[-1][x] > 0.99 and rs[0][x] < 0.05 for rs in curves.values())
    pas = sorted(curves)
    ok3 &= all(all(hi[x] < lo[x] for lo, hi in zip(curves[a], curves[b])) for a, b in zip(pas, pas[1:]))

    start = time.perf_counter()
    fig4 = run_preset("fig4", cfg)
    times["fig4"] = time.perf_counter() - start
    r, lim = fig4.columns.index("r_c_star"), fig4.columns.index("r_c_limit")
    curves = _curves(fig4, ("epsilon",))
    ok4 = all(all(a[r] < b[r] for a, b in zip(rs, rs[1:])) for rs in curves.values())
    ok4 &= all((rs[-1][lim] - rs[-1][r]) / rs[-1][lim] < 0.01 for rs in curves.values())
    eps = sorted(curves)
    ok4 &= all(all(lo[r] < hi[r] for lo, hi in zip(curves[a], curves[b])) for a, b in zip(eps, eps[1:]))

    fast = all(t < 60 for t in times.values())
    report(8, "figure trends", ok2 and ok3 and ok4 and fast,
           f"(fig2 {ok2}, fig3 {ok3}, fig4 {ok4}, times " + ", ".join(f"{k} {v:.1f}s" for k, v in times.items()) + ")")


def test_9_determinism(report, tmp_path):
    runs = [["verify", "all"], ["preset", "fig2"], ["preset", "fig3"], ["preset", "fig4"]]
    same, codes = True, []
    for argv in runs:
        outputs = []
        for workers in (1, 4):
            out = tmp_path / f"{argv[-1]}_{workers}.csv"
            codes.append(main(argv + ["--seed", str(SEED), "--workers", str(workers), "--out", str(out)]))
            outputs.append(out.read_bytes())
        same &= outputs[0] == outputs[1] and len(outputs[0]) > 0
    report(9, "byte-identical CSV across thread counts", same and not any(codes), f"(exit codes {codes})")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
