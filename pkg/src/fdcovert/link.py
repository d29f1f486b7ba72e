"""Alice-to-Bob link: SINR under residual self-interference and the
transmission outage probability, in closed form and by Monte-Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ChannelDraw, ChannelStats, SystemParams
from .rng import RandomSource, map_streams

# below this value of x/lambda_ab the log ratio switches to its Taylor series
SERIES_CUTOFF = 1e-6


@dataclass(frozen=True)
class Estimate:
    """Monte-Carlo proportion with its binomial standard error."""

    value: float
    stderr: float
    samples: int

    def __float__(self) -> float:
        return self.value


def proportion(hits: int, n: int) -> Estimate:
    p = hits / n
    return Estimate(p, math.sqrt(p * (1.0 - p) / n), n)


@dataclass(frozen=True)
class OutageInputs:
    params: SystemParams
    stats: ChannelStats

    @property
    def mu(self) -> float:
        """SINR threshold per unit of Alice's power, ``(2^R - 1) / p_a``."""
        return math.expm1(self.params.rate * math.log(2.0)) / self.params.p_a


def sinr_bob(draw: ChannelDraw, params: SystemParams) -> float:
    return params.p_a * draw.g_ab / (params.phi * draw.p_b * draw.g_bb + params.sigma2_b)


def log_ratio(x: float, lam: float) -> float:
    """``lam * ln(1 + x/lam) / x``, continuous at ``x = 0`` where it equals 1."""
    u = x / lam
    if u < SERIES_CUTOFF:
        return 1.0 - 0.5 * u
    return math.log1p(u) / u


def outage_probability(inputs: OutageInputs) -> float:
    """Probability that ``log2(1 + SINR) < R`` over fading and AN power.

    Averaging the exponential Alice-Bob gain first gives
    ``P(success) = exp(-mu*sigma2_b/lambda_ab) * E[1 / (1 + mu*phi*P_b*g_bb/lambda_ab)]``,
    and the remaining average over exponential ``g_bb`` and uniform ``P_b``
    yields the logarithmic factor computed by :func:`log_ratio`.
    """
    p, s = inputs.params, inputs.stats
    mu = inputs.mu
    x = mu * p.phi * s.lambda_bb * p.p_b_max
    success = math.exp(-mu * p.sigma2_b / s.lambda_ab) * log_ratio(x, s.lambda_ab)
    return min(1.0, max(0.0, 1.0 - success))


def outage_for(params: SystemParams, stats: ChannelStats) -> float:
    return outage_probability(OutageInputs(params, stats))


def mc_outage(
    inputs: OutageInputs,
    samples: int,
    rng: RandomSource,
    workers: int = 1,
) -> Estimate:
    """Empirical outage frequency from sampled ``(g_ab, g_bb, P_b)``."""
    if samples < 1000:
        raise ValueError(f"samples must be >= 1000, got {samples}")
    p, s = inputs.params, inputs.stats

    def chunk(n, gen):
        g_ab = gen.exponential(s.lambda_ab, n)
        g_bb = gen.exponential(s.lambda_bb, n)
        p_b = gen.uniform(0.0, p.p_b_max, n)
        sinr = p.p_a * g_ab / (p.phi * p_b * g_bb + p.sigma2_b)
        return np.count_nonzero(np.log2(1.0 + sinr) < p.rate)

    hits = sum(map_streams(chunk, samples, rng, workers))
    return proportion(int(hits), samples)
