"""Willie's radiometer: error rates for a given threshold, the optimal threshold,
and two independent oracles (Monte-Carlo and threshold grid search).

Willie knows ``g_aw`` and ``g_bw`` for the slot; the only randomness he faces
is Bob's AN power, uniform on ``[0, p_b_max]``. His received power is then
uniform on ``[sigma2_w, rho1]`` without Alice and on ``[rho2, rho3]`` with her,
which makes both error rates piecewise linear in the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ChannelDraw, SystemParams, breakpoints
from .rng import RandomSource, map_streams


@dataclass(frozen=True)
class DetectionResult:
    alpha: float
    beta: float
    trials: int | None = None

    @property
    def xi(self) -> float:
        return self.alpha + self.beta


@dataclass(frozen=True)
class ThresholdSolution:
    """Optimal-threshold interval ``[tau_lo, tau_hi]`` and the error it attains.

    ``degenerate`` is set when Willie receives no AN (``p_b_max * g_bw == 0``),
    in which case both hypotheses are deterministic.
    """

    tau_lo: float
    tau_hi: float
    xi_star: float
    degenerate: bool = False


def _jam_power(draw: ChannelDraw, params: SystemParams) -> float:
    return params.p_b_max * draw.g_bw


def _signal_power(draw: ChannelDraw, params: SystemParams) -> float:
    return params.p_a * draw.g_aw


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def false_alarm_rate(tau, draw: ChannelDraw, params: SystemParams):
    """P(T_w > tau | Alice silent). Vectorised over ``tau``."""
    tau = np.asarray(tau, dtype=float)
    jam = _jam_power(draw, params)
    if jam == 0:
        # H0 statistic is exactly sigma2_w
        return _out(np.where(tau < params.sigma2_w, 1.0, 0.0))
    return _out(np.clip(1.0 - (tau - params.sigma2_w) / jam, 0.0, 1.0))


def miss_detection_rate(tau, draw: ChannelDraw, params: SystemParams):
    """P(T_w < tau | Alice transmits). Vectorised over ``tau``."""
    tau = np.asarray(tau, dtype=float)
    jam = _jam_power(draw, params)
    rho2 = _signal_power(draw, params) + params.sigma2_w
    if jam == 0:
        # H1 statistic is exactly rho2
        return _out(np.where(tau > rho2, 1.0, 0.0))
    return _out(np.clip((tau - rho2) / jam, 0.0, 1.0))


def xi_of_threshold(tau, draw: ChannelDraw, params: SystemParams):
    """Detection error rate ``alpha + beta`` at threshold ``tau``."""
    return _out(
        np.asarray(false_alarm_rate(tau, draw, params))
        + np.asarray(miss_detection_rate(tau, draw, params))
    )


def xi_star_from_powers(signal_power, jam_power):
    """Minimum detection error given ``p_a*g_aw`` and ``p_b_max*g_bw``.

    Vectorised; used by the fading-average oracle. Willie's noise does not
    enter, which is why the branch is decided on the powers alone.
    """
    sig = np.asarray(signal_power, dtype=float)
    jam = np.asarray(jam_power, dtype=float)
    sig, jam = np.broadcast_arrays(sig, jam)
    covered = (jam >= sig) & (jam > 0)
    ratio = np.divide(sig, jam, out=np.zeros(sig.shape), where=covered)
    return _out(np.where(covered, 1.0 - ratio, 0.0))


def optimal_threshold(draw: ChannelDraw, params: SystemParams) -> ThresholdSolution:
    rho = breakpoints(draw, params)
    sig = _signal_power(draw, params)
    jam = _jam_power(draw, params)
    if jam == 0:
        return ThresholdSolution(params.sigma2_w, rho.rho2, 0.0, degenerate=True)
    if jam < sig:
        return ThresholdSolution(rho.rho1, rho.rho2, 0.0)
    return ThresholdSolution(rho.rho2, rho.rho1, 1.0 - sig / jam)


def grid_step(draw: ChannelDraw, params: SystemParams, grid_points: int) -> float:
    return 1.1 * breakpoints(draw, params).rho3 / (grid_points - 1)


def grid_search_threshold(
    draw: ChannelDraw, params: SystemParams, grid_points: int = 10_000
) -> ThresholdSolution:
    """Brute-force minimiser of ``xi_of_threshold`` on ``[0, 1.1*rho3]``.

    ``tau_lo`` is the first grid minimiser and ``tau_hi`` the last grid point
    whose value is within 1e-12 of the minimum.
    """
    if grid_points < 100:
        raise ValueError(f"grid_points must be >= 100, got {grid_points}")
    rho3 = breakpoints(draw, params).rho3
    taus = np.linspace(0.0, 1.1 * rho3, grid_points)
    xi = np.asarray(xi_of_threshold(taus, draw, params))
    best = float(xi.min())
    hits = np.flatnonzero(xi <= best + 1e-12)
    return ThresholdSolution(
        float(taus[hits[0]]),
        float(taus[hits[-1]]),
        best,
        degenerate=_jam_power(draw, params) == 0,
    )


def mc_detection_error(
    tau: float,
    draw: ChannelDraw,
    params: SystemParams,
    trials: int,
    rng: RandomSource,
    workers: int = 1,
) -> DetectionResult:
    """Monte-Carlo estimate of the error rates with the gains held fixed.

    Each trial draws a fresh AN power and evaluates Willie's statistic under
    both hypotheses (independent AN draws per hypothesis).
    """
    if trials < 1000:
        raise ValueError(f"trials must be >= 1000, got {trials}")
    jam_gain = draw.g_bw
    sig = _signal_power(draw, params)

    def chunk(n, gen):
        pb0 = gen.uniform(0.0, params.p_b_max, n)
        pb1 = gen.uniform(0.0, params.p_b_max, n)
        t0 = pb0 * jam_gain + params.sigma2_w
        t1 = sig + pb1 * jam_gain + params.sigma2_w
        return np.count_nonzero(t0 > tau), np.count_nonzero(t1 < tau)

    counts = np.array(map_streams(chunk, trials, rng, workers)).sum(axis=0)
    return DetectionResult(counts[0] / trials, counts[1] / trials, trials)
