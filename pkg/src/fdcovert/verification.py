"""Closed-form versus oracle checks, grouped into suites.

Each suite returns a list of :class:`Check` rows. A check that covers many
random cases reports the case with the largest deviation-to-tolerance ratio.
All randomness is drawn from sub-streams of the config seed, so a report is
reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import covertness as cov
from .config import ScenarioConfig
from .detection import (
    false_alarm_rate,
    grid_search_threshold,
    grid_step,
    mc_detection_error,
    miss_detection_rate,
    optimal_threshold,
)
from .link import OutageInputs, mc_outage, outage_probability
from .model import ChannelStats, SystemParams, breakpoints, sample_draw
from .rng import RandomSource, parallel_map

SUITES = ("lemma1", "theorem1", "lemma2", "theorem2", "theorem3")

# fixed case counts; MC sample sizes come from the config
LEMMA1_PAIRS = 200
THEOREM1_DRAWS = 1000
THEOREM1_GRID = 10_000
INVARIANCE_DRAWS = 100
INVARIANCE_NOISE = (0.01, 1.0, 100.0)
RANDOM_SETS = 50
EPSILONS = (0.05, 0.1, 0.2, 0.5)
PA_LADDER = (1.0, 10.0, 1e2, 1e4, 1e6)


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    tolerance: float
    deviation: float
    passed: bool
    cases: int = 1


def binomial_tolerance(p: float, n: int) -> float:
    return 3.0 * math.sqrt(max(p * (1.0 - p), 0.0) / n) + 1e-3


class _Worst:
    """Tracks the case closest to (or furthest past) its tolerance."""

    def __init__(self):
        self.ratio = -math.inf
        self.deviation = 0.0
        self.tolerance = 0.0
        self.cases = 0
        self.passed = True

    def add(self, deviation: float, tolerance: float, ok: bool | None = None):
        self.cases += 1
        ok = deviation <= tolerance if ok is None else ok
        self.passed &= bool(ok)
        ratio = deviation / tolerance if tolerance > 0 else (math.inf if deviation > 0 else 0.0)
        if ratio > self.ratio:
            self.ratio, self.deviation, self.tolerance = ratio, deviation, tolerance

    def check(self, suite: str, name: str) -> Check:
        return Check(suite, name, self.tolerance, self.deviation, self.passed, self.cases)


def random_scenario(gen: np.random.Generator) -> tuple[SystemParams, ChannelStats]:
    """Parameter set spread over several decades of every power."""

    def db(lo, hi):
        return 10.0 ** (gen.uniform(lo, hi) / 10.0)

    stats = ChannelStats(*(10.0 ** gen.uniform(-0.7, 0.7, 4)))
    params = SystemParams(
        p_a=db(-10, 20),
        p_b_max=db(-10, 30),
        sigma2_b=db(-10, 10),
        sigma2_w=db(-10, 10),
        phi=gen.uniform(0.0, 1.0),
        rate=gen.uniform(0.1, 3.0),
    )
    return params, stats


def lemma1(config: ScenarioConfig, workers: int = 1, pairs: int = LEMMA1_PAIRS) -> list[Check]:
    """False-alarm and miss-detection closed forms against Monte-Carlo."""
    root = RandomSource(config.seed, (1,))
    params, stats, n = config.params, config.stats, config.trials

    def case(i):
        gen = root.spawn(0, i).generator()
        draw = sample_draw(stats, params, gen)
        tau = gen.uniform(0.0, 1.1 * breakpoints(draw, params).rho3)
        mc = mc_detection_error(tau, draw, params, n, root.spawn(1, i))
        return false_alarm_rate(tau, draw, params), mc.alpha, miss_detection_rate(tau, draw, params), mc.beta

    alpha, beta = _Worst(), _Worst()
    for a, a_hat, b, b_hat in parallel_map(case, range(pairs), workers):
        alpha.add(abs(a - a_hat), binomial_tolerance(a, n))
        beta.add(abs(b - b_hat), binomial_tolerance(b, n))
    return [alpha.check("lemma1", "false alarm closed vs MC"), beta.check("lemma1", "miss detection closed vs MC")]


def theorem1(config: ScenarioConfig, workers: int = 1, draws: int = THEOREM1_DRAWS) -> list[Check]:
    """Optimal threshold against a brute-force grid, and noise invariance."""
    root = RandomSource(config.seed, (2,))
    params, stats = config.params, config.stats

    def case(i):
        draw = sample_draw(stats, params, root.spawn(0, i))
        exact = optimal_threshold(draw, params)
        grid = grid_search_threshold(draw, params, THEOREM1_GRID)
        step = grid_step(draw, params, THEOREM1_GRID)
        jam = params.p_b_max * draw.g_bw
        bound = 2.0 * step / jam if jam > 0 else 0.0
        outside = max(exact.tau_lo - grid.tau_lo, grid.tau_lo - exact.tau_hi, 0.0)
        return abs(grid.xi_star - exact.xi_star), bound, outside, step

    value, where = _Worst(), _Worst()
    for dev, bound, outside, step in parallel_map(case, range(draws), workers):
        value.add(dev, bound)
        where.add(outside, step)

    invariance = _Worst()
    for i in range(INVARIANCE_DRAWS):
        draw = sample_draw(stats, params, root.spawn(1, i))
        xs = [optimal_threshold(draw, params.with_(sigma2_w=s)).xi_star for s in INVARIANCE_NOISE]
        invariance.add(max(xs) - min(xs), 0.0, ok=len(set(xs)) == 1)
    return [
        value.check("theorem1", "grid minimum vs optimal error"),
        where.check("theorem1", "grid argmin inside optimal interval"),
        invariance.check("theorem1", "optimal error independent of warden noise"),
    ]


def lemma2(config: ScenarioConfig, workers: int = 1, sets: int = RANDOM_SETS) -> list[Check]:
    """Outage closed form against Monte-Carlo, and its small-cap limit."""
    root = RandomSource(config.seed, (3,))
    n = config.trials

    def case(i):
        params, stats = random_scenario(root.spawn(0, i).generator())
        inputs = OutageInputs(params, stats)
        return outage_probability(inputs), mc_outage(inputs, n, root.spawn(1, i)).value

    agree = _Worst()
    for closed, mc in parallel_map(case, range(sets), workers):
        agree.add(abs(closed - mc), binomial_tolerance(closed, n))

    inputs = OutageInputs(config.params.with_(p_b_max=1e-8), config.stats)
    p, s = inputs.params, inputs.stats
    limit = -math.expm1(-inputs.mu * p.sigma2_b / s.lambda_ab)
    singular = _Worst()
    singular.add(abs(outage_probability(inputs) - limit) / limit, 1e-6)
    return [
        agree.check("lemma2", "outage closed vs MC"),
        singular.check("lemma2", "outage continuity at vanishing AN cap"),
    ]


def theorem2(config: ScenarioConfig, workers: int = 1, sets: int = RANDOM_SETS) -> list[Check]:
    """Expected minimum detection error against its Monte-Carlo average."""
    root = RandomSource(config.seed, (4,))
    n = config.trials

    def case(i):
        params, stats = random_scenario(root.spawn(0, i).generator())
        closed = cov.expected_xi_star(cov.t_of_powers(params, stats), config.xi_form)
        mc = cov.mc_expected_xi(params, stats, n, root.spawn(1, i))
        cond = cov.mc_conditional_xi(params, stats, n, root.spawn(2, i))
        p_cover = cov.prob_rho1_geq_rho2(params, stats)
        return closed, mc, p_cover * cond.value, p_cover * cond.stderr

    agree, factor = _Worst(), _Worst()
    for closed, mc, product, product_err in parallel_map(case, range(sets), workers):
        agree.add(abs(closed - mc.value), 3.0 * mc.stderr + 1e-3)
        sigma = math.hypot(mc.stderr, product_err)
        factor.add(abs(product - mc.value), 3.0 * sigma + 1e-3)
    return [
        agree.check("theorem2", f"expected error ({config.xi_form}) closed vs MC"),
        factor.check("theorem2", "coverage probability x conditional mean factorisation"),
    ]


def theorem3(config: ScenarioConfig, workers: int = 1) -> list[Check]:
    """Covertness constraint activity, rate closed form, and the large-power limit."""
    params, stats, form = config.params, config.stats, config.xi_form
    active, closed = _Worst(), _Worst()
    for eps in EPSILONS:
        d = cov.design(params, stats, eps, form)
        t = cov.t_of_powers(params.with_(p_b_max=d.p_b_max_star), stats)
        active.add(abs(cov.expected_xi_star(t, form) - (1.0 - eps)), 1e-9)
        ref = cov.max_covert_rate_closed_form(params, stats, d.t_eps)
        closed.add(abs(ref - d.r_c_star) / abs(ref), 1e-10)

    limit, ladder = _Worst(), _Worst()
    for eps in EPSILONS:
        cap = cov.covert_rate_limit(stats, params.rate, params.phi, eps, form)
        ratios = [cov.max_covert_rate(params.with_(p_a=pa), stats, eps, form) / cap for pa in PA_LADDER]
        limit.add(abs(1.0 - ratios[-1]), 1e-4)
        drops = [max(a - b, 0.0) for a, b in zip(ratios, ratios[1:])]
        ladder.add(max(drops), 0.0, ok=all(b >= a for a, b in zip(ratios, ratios[1:])))
    return [
        active.check("theorem3", "covertness constraint active at optimal AN cap"),
        closed.check("theorem3", "rate closed form vs R*(1-outage)"),
        limit.check("theorem3", "rate at p_a=1e6 vs large-power limit"),
        ladder.check("theorem3", "rate/limit nondecreasing in p_a"),
    ]


RUNNERS: dict[str, Callable[..., list[Check]]] = {
    "lemma1": lemma1,
    "theorem1": theorem1,
    "lemma2": lemma2,
    "theorem2": theorem2,
    "theorem3": theorem3,
}


def verify(config: ScenarioConfig, suite: str = "all", workers: int = 1) -> list[Check]:
    names = SUITES if suite == "all" else (suite,)
    unknown = [s for s in names if s not in RUNNERS]
    if unknown:
        raise ValueError(f"unknown suite {unknown[0]!r}; choose from {SUITES + ('all',)}")
    checks: list[Check] = []
    for name in names:
        checks.extend(RUNNERS[name](config, workers=workers))
    return checks
