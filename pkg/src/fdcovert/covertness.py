"""Covertness over fading: Willie's expected minimum detection error, the
covertness root-solve, the AN-power design that maximises the effective covert
rate, and its large-``p_a`` limit.

Everything on the warden side depends on the powers only through

    t = p_a*lambda_aw / (p_a*lambda_aw + p_b_max*lambda_bw),

the probability that Alice's received power at Willie exceeds the largest AN
power he can see.

Two closed forms of the expected error are provided:

``"exact"`` (default)
    ``1 + t*ln(t)/(1 - t)``, the true mean of the per-slot minimum error over
    exponential ``g_aw`` and ``g_bw``. Agrees with :func:`mc_expected_xi`.
``"product"``
    ``1 - t**2 + t*ln(t)``, obtained by multiplying ``P[rho1 >= rho2]`` with the
    conditional mean integral *without* dividing that integral by
    ``P[rho1 >= rho2]``. It overstates the mean (0.4034 vs 0.3069 at t=0.5) and
    is kept only to reproduce curves drawn with it.

Both are strictly decreasing on (0, 1), so the covertness design logic is the
same for either.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detection import xi_star_from_powers
from .link import Estimate, OutageInputs, log_ratio, outage_probability
from .model import ChannelStats, SystemParams
from .rng import RandomSource, map_streams

XI_FORMS = ("exact", "product")

T_FLOOR = 1e-15
MAX_ITER = 200
RESIDUAL_TOL = 1e-12


class CovertnessUnsatisfiable(ValueError):
    """The covertness constraint cannot be met with finite AN power."""


@dataclass(frozen=True)
class CovertDesign:
    epsilon: float
    t_eps: float
    p_b_max_star: float
    r_c_star: float


def t_of_powers(params: SystemParams, stats: ChannelStats) -> float:
    a = params.p_a * stats.lambda_aw
    return a / (a + params.p_b_max * stats.lambda_bw)


def _check_form(form: str) -> None:
    if form not in XI_FORMS:
        raise ValueError(f"unknown expected-error form {form!r}; choose from {XI_FORMS}")


def expected_xi_star(t: float, form: str = "exact") -> float:
    """Expected minimum detection error at Willie as a function of ``t``."""
    _check_form(form)
    t = float(t)
    if not 0.0 < t <= 1.0:
        raise ValueError(f"t must lie in (0, 1], got {t}")
    if t == 1.0:
        return 0.0
    log_t = math.log1p(t - 1.0) if t > 0.5 else math.log(t)
    if form == "product":
        return 1.0 - t * t + t * log_t
    return 1.0 + t * log_t / (1.0 - t)


def prob_rho1_geq_rho2(params: SystemParams, stats: ChannelStats) -> float:
    """Probability that the AN range at Willie covers Alice's received power."""
    return 1.0 - t_of_powers(params, stats)


def _xi_star_samples(params, stats, n, gen):
    g_aw = gen.exponential(stats.lambda_aw, n)
    g_bw = gen.exponential(stats.lambda_bw, n)
    return np.asarray(xi_star_from_powers(params.p_a * g_aw, params.p_b_max * g_bw))


def _mean_estimate(parts) -> Estimate:
    n = sum(p[0] for p in parts)
    s1 = sum(p[1] for p in parts)
    s2 = sum(p[2] for p in parts)
    if n == 0:
        return Estimate(0.0, 0.0, 0)
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0)
    return Estimate(mean, math.sqrt(var / n), n)


def mc_expected_xi(
    params: SystemParams,
    stats: ChannelStats,
    draws: int,
    rng: RandomSource,
    workers: int = 1,
) -> Estimate:
    """Average of the per-slot minimum detection error over sampled warden channels."""
    if draws < 1000:
        raise ValueError(f"draws must be >= 1000, got {draws}")

    def chunk(n, gen):
        x = _xi_star_samples(params, stats, n, gen)
        return n, float(x.sum()), float(np.dot(x, x))

    return _mean_estimate(map_streams(chunk, draws, rng, workers))


def mc_conditional_xi(
    params: SystemParams,
    stats: ChannelStats,
    draws: int,
    rng: RandomSource,
    workers: int = 1,
) -> Estimate:
    """Mean minimum detection error over the slots with ``rho1 >= rho2``.

    ``samples`` of the result is the number of slots meeting the condition.
    """
    if draws < 1000:
        raise ValueError(f"draws must be >= 1000, got {draws}")

    def chunk(n, gen):
        g_aw = gen.exponential(stats.lambda_aw, n)
        g_bw = gen.exponential(stats.lambda_bw, n)
        sig, jam = params.p_a * g_aw, params.p_b_max * g_bw
        x = np.asarray(xi_star_from_powers(sig, jam))[jam >= sig]
        return x.size, float(x.sum()), float(np.dot(x, x))

    return _mean_estimate(map_streams(chunk, draws, rng, workers))


def solve_t_epsilon(epsilon: float, form: str = "exact") -> float:
    """Root of ``expected_xi_star(t) = 1 - epsilon`` on ``(0, 1]`` by bisection."""
    _check_form(form)
    epsilon = float(epsilon)
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    if epsilon == 0.0:
        raise CovertnessUnsatisfiable("epsilon = 0 needs unbounded AN power")
    if epsilon == 1.0:
        return 1.0
    target = 1.0 - epsilon

    def f(t):
        return expected_xi_star(t, form) - target

    lo, hi = T_FLOOR, 1.0
    if f(lo) < 0:
        raise CovertnessUnsatisfiable(f"epsilon = {epsilon} needs t below {T_FLOOR}")
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if fm > 0:
            lo = mid
        else:
            hi = mid
    t = lo if abs(f(lo)) <= abs(f(hi)) else hi
    if abs(f(t)) > RESIDUAL_TOL:
        raise ArithmeticError(f"bisection stalled at t={t}, residual {f(t):.3e}")
    return t


def pb_max_from_t(p_a: float, stats: ChannelStats, t: float) -> float:
    """AN power cap that puts the warden-side power ratio at ``t``."""
    return p_a * stats.lambda_aw * (1.0 - t) / (t * stats.lambda_bw)


def optimal_pb_max(p_a: float, stats: ChannelStats, epsilon: float, form: str = "exact") -> float:
    """Smallest AN power cap meeting the covertness constraint.

    The constraint is active at the optimum: outage grows with the cap, so any
    larger cap only lowers the effective covert rate.
    """
    return pb_max_from_t(p_a, stats, solve_t_epsilon(epsilon, form))


def max_covert_rate(
    params: SystemParams, stats: ChannelStats, epsilon: float, form: str = "exact"
) -> float:
    """``R * (1 - outage)`` at the optimal AN cap; ``params.p_b_max`` is ignored."""
    p_star = optimal_pb_max(params.p_a, stats, epsilon, form)
    delta = outage_probability(OutageInputs(params.with_(p_b_max=p_star), stats))
    return params.rate * (1.0 - delta)


def _interference_term(stats: ChannelStats, rate: float, phi: float, t_eps: float) -> float:
    # (2^R - 1) * phi * lambda_bb * lambda_aw * (1 - t) / (lambda_bw * t)
    return math.expm1(rate * math.log(2.0)) * phi * stats.lambda_bb * (
        stats.lambda_aw * (1.0 - t_eps) / (stats.lambda_bw * t_eps)
    )


def max_covert_rate_closed_form(params: SystemParams, stats: ChannelStats, t_eps: float) -> float:
    """Maximum effective covert rate written directly in terms of ``t_eps``.

    Independent transcription of the composed :func:`max_covert_rate`; the two
    are expected to agree to rounding.
    """
    two_r = math.expm1(params.rate * math.log(2.0))
    snr_term = math.exp(-two_r * params.sigma2_b / (params.p_a * stats.lambda_ab))
    x = _interference_term(stats, params.rate, params.phi, t_eps)
    if x == 0.0:
        return params.rate * snr_term
    return params.rate * stats.lambda_ab * snr_term * math.log1p(x / stats.lambda_ab) / x


def covert_rate_limit(
    stats: ChannelStats, rate: float, phi: float, epsilon: float, form: str = "exact"
) -> float:
    """Limit of the maximum effective covert rate as ``p_a`` grows without bound."""
    t_eps = solve_t_epsilon(epsilon, form)
    x = _interference_term(stats, rate, phi, t_eps)
    return rate * log_ratio(x, stats.lambda_ab)


def design(
    params: SystemParams, stats: ChannelStats, epsilon: float, form: str = "exact"
) -> CovertDesign:
    t_eps = solve_t_epsilon(epsilon, form)
    p_star = pb_max_from_t(params.p_a, stats, t_eps)
    delta = outage_probability(OutageInputs(params.with_(p_b_max=p_star), stats))
    return CovertDesign(epsilon, t_eps, p_star, params.rate * (1.0 - delta))
