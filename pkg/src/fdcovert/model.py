"""Scenario types, fading/AN-power samplers and Willie's received-power statistic.

All powers are linear (watts); decibel conversion only happens at the CLI
boundary via :func:`db_to_linear`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .rng import RNGLike, as_generator


class ParameterError(ValueError):
    """Raised when a scenario parameter violates its invariant."""


def db_to_linear(db: float) -> float:
    return 10.0 ** (float(db) / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class ChannelStats:
    """Mean squared gains of the four Rayleigh links.

    ``ab`` Alice-Bob, ``bb`` Bob's self-interference loop, ``aw`` Alice-Willie,
    ``bw`` Bob-Willie.
    """

    lambda_ab: float = 1.0
    lambda_bb: float = 1.0
    lambda_aw: float = 1.0
    lambda_bw: float = 1.0

    def __post_init__(self):
        for name in ("lambda_ab", "lambda_bb", "lambda_aw", "lambda_bw"):
            value = _finite(name, getattr(self, name))
            if value <= 0:
                raise ParameterError(f"{name} must be > 0, got {value}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class SystemParams:
    """One scenario.

    Attributes:
        p_a: Alice's transmit power.
        p_b_max: upper end of the uniform range of Bob's AN power.
        sigma2_b: noise variance at Bob.
        sigma2_w: noise variance at Willie.
        phi: residual self-interference coefficient, 0 is perfect cancellation.
        rate: predetermined transmission rate in bits per channel use.
    """

    p_a: float = 1.0
    p_b_max: float = 1.0
    sigma2_b: float = 1.0
    sigma2_w: float = 1.0
    phi: float = 0.01
    rate: float = 1.0

    def __post_init__(self):
        for name in ("p_a", "p_b_max", "sigma2_b", "sigma2_w", "phi", "rate"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        if self.p_a <= 0:
            raise ParameterError(f"p_a must be > 0, got {self.p_a}")
        if self.p_b_max < 0:
            raise ParameterError(f"p_b_max must be >= 0, got {self.p_b_max}")
        if self.sigma2_b <= 0:
            raise ParameterError(f"sigma2_b must be > 0, got {self.sigma2_b}")
        if self.sigma2_w <= 0:
            raise ParameterError(f"sigma2_w must be > 0, got {self.sigma2_w}")
        if not 0.0 <= self.phi <= 1.0:
            raise ParameterError(f"phi must lie in [0, 1], got {self.phi}")
        if self.rate <= 0:
            raise ParameterError(f"rate must be > 0, got {self.rate}")

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class ChannelDraw:
    """One slot: squared channel magnitudes and Bob's AN power."""

    g_ab: float = 1.0
    g_bb: float = 1.0
    g_aw: float = 1.0
    g_bw: float = 1.0
    p_b: float = 0.0

    def __post_init__(self):
        for name in ("g_ab", "g_bb", "g_aw", "g_bw", "p_b"):
            value = _finite(name, getattr(self, name))
            if value < 0:
                raise ParameterError(f"{name} must be >= 0, got {value}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class Rho:
    """Willie's received-power breakpoints for a fixed slot."""

    rho1: float
    rho2: float
    rho3: float


def sample_gain(mean: float, rng: RNGLike, size=None):
    """Squared magnitude of a Rayleigh coefficient: exponential with the given mean."""
    if not mean > 0:
        raise ParameterError(f"mean gain must be > 0, got {mean}")
    return as_generator(rng).exponential(mean, size)


def sample_pb(params: SystemParams, rng: RNGLike, size=None):
    """Bob's AN power, uniform on ``[0, p_b_max]``."""
    if params.p_b_max == 0:
        return 0.0 if size is None else np.zeros(size)
    return as_generator(rng).uniform(0.0, params.p_b_max, size)


def sample_draw(stats: ChannelStats, params: SystemParams, rng: RNGLike) -> ChannelDraw:
    gen = as_generator(rng)
    return ChannelDraw(
        g_ab=sample_gain(stats.lambda_ab, gen),
        g_bb=sample_gain(stats.lambda_bb, gen),
        g_aw=sample_gain(stats.lambda_aw, gen),
        g_bw=sample_gain(stats.lambda_bw, gen),
        p_b=sample_pb(params, gen),
    )


def test_statistic(draw: ChannelDraw, params: SystemParams, alice_transmits: bool) -> float:
    """Average received power at Willie in the infinite-blocklength limit."""
    t = draw.p_b * draw.g_bw + params.sigma2_w
    if alice_transmits:
        t = params.p_a * draw.g_aw + t
    return t


# keep pytest from collecting the function above when imported into a test module
test_statistic.__test__ = False


def breakpoints(draw: ChannelDraw, params: SystemParams) -> Rho:
    rho1 = params.p_b_max * draw.g_bw + params.sigma2_w
    rho2 = params.p_a * draw.g_aw + params.sigma2_w
    # the max() only absorbs rounding of the sum
    rho3 = max(rho1 + rho2 - params.sigma2_w, rho1, rho2)
    return Rho(rho1=rho1, rho2=rho2, rho3=rho3)
