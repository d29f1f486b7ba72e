"""Covert communication with a full-duplex receiver that jams the warden.

Closed-form analysis of the warden's radiometer, the Alice-Bob outage and the
covertness-constrained AN power design, each paired with an independent
Monte-Carlo or brute-force oracle.
"""

from .config import ConfigError, ScenarioConfig, parse_config
from .covertness import (
    CovertDesign,
    CovertnessUnsatisfiable,
    covert_rate_limit,
    design,
    expected_xi_star,
    max_covert_rate,
    max_covert_rate_closed_form,
    mc_conditional_xi,
    mc_expected_xi,
    optimal_pb_max,
    prob_rho1_geq_rho2,
    solve_t_epsilon,
    t_of_powers,
)
from .detection import (
    DetectionResult,
    ThresholdSolution,
    false_alarm_rate,
    grid_search_threshold,
    mc_detection_error,
    miss_detection_rate,
    optimal_threshold,
    xi_of_threshold,
)
from .link import Estimate, OutageInputs, mc_outage, outage_probability, sinr_bob
from .model import (
    ChannelDraw,
    ChannelStats,
    ParameterError,
    Rho,
    SystemParams,
    breakpoints,
    sample_draw,
    sample_gain,
    sample_pb,
    test_statistic,
)
from .rng import RandomSource

__version__ = "0.1.0"
