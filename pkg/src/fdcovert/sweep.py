"""Parameter sweeps, figure presets and CSV output."""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import covertness as cov
from .config import ConfigError, ScenarioConfig, parse_overrides
from .link import OutageInputs, mc_outage, outage_probability
from .rng import RandomSource, parallel_map

VARIABLES = ("p_b_max", "p_a", "epsilon", "rate", "sigma2_b", "phi")
POWER_VARIABLES = ("p_b_max", "p_a", "sigma2_b")
OUTPUTS = ("delta", "expected_xi", "r_c_star", "p_b_max_star", "t_eps", "r_c_limit")
NEEDS_EPSILON = ("r_c_star", "p_b_max_star", "t_eps", "r_c_limit")
MC_OUTPUTS = ("delta", "expected_xi", "r_c_star")

OK = "ok"
UNSATISFIABLE = "unsatisfiable"


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    steps: int
    scale: str = "linear"
    outputs: tuple[str, ...] = ("delta",)
    mc: bool = True

    def __post_init__(self):
        variable = "rate" if self.variable == "R" else self.variable
        object.__setattr__(self, "variable", variable)
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if variable not in VARIABLES:
            raise ConfigError(f"unknown sweep variable; choose from {VARIABLES}", "variable")
        if self.scale not in ("db", "linear"):
            raise ConfigError("scale must be 'db' or 'linear'", "scale")
        if self.scale == "db" and variable not in POWER_VARIABLES:
            raise ConfigError(f"dB scale only applies to powers {POWER_VARIABLES}", "scale")
        if self.steps < 2:
            raise ConfigError("steps must be >= 2", "steps")
        if not self.start < self.stop:
            raise ConfigError("start must be < stop", "start")
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad or not self.outputs:
            raise ConfigError(f"unknown output {bad[:1]}; choose from {OUTPUTS}", "outputs")

    @property
    def column(self) -> str:
        return f"{self.variable}_db" if self.scale == "db" else self.variable

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass
class SweepTable:
    columns: list[str]
    rows: list[list] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_cell(v) for v in row])
        return buf.getvalue()

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value} in sweep output")
        return repr(value)
    return str(value)


def _apply(config: ScenarioConfig, variable: str, value: float, scale: str) -> ScenarioConfig:
    if variable == "epsilon":
        if not 0.0 <= value <= 1.0:
            raise ConfigError(f"sweep value {value} outside [0, 1]", "epsilon")
        return config.with_(epsilon=float(value))
    key = f"{variable}_db" if scale == "db" else variable
    return parse_overrides([f"{key}={value!r}"], config)


def evaluate_point(config: ScenarioConfig, outputs: Sequence[str], mc: bool, source: RandomSource) -> dict:
    """All requested quantities (and MC estimates) for one configuration."""
    params, stats, form = config.params, config.stats, config.xi_form
    out: dict[str, float | str | None] = {"status": OK}
    design = None
    if any(o in NEEDS_EPSILON for o in outputs):
        if config.epsilon is None:
            raise ConfigError(f"outputs {NEEDS_EPSILON} need epsilon", "epsilon")
        try:
            design = cov.design(params, stats, config.epsilon, form)
        except cov.CovertnessUnsatisfiable:
            out["status"] = UNSATISFIABLE
    for k, name in enumerate(outputs):
        stream = source.spawn(k)
        value = est = None
        if name == "delta":
            inputs = OutageInputs(params, stats)
            value = outage_probability(inputs)
            if mc:
                est = mc_outage(inputs, config.trials, stream)
        elif name == "expected_xi":
            value = cov.expected_xi_star(cov.t_of_powers(params, stats), form)
            if mc:
                est = cov.mc_expected_xi(params, stats, config.trials, stream)
        elif design is not None:
            if name == "r_c_star":
                value = design.r_c_star
                if mc:
                    inputs = OutageInputs(params.with_(p_b_max=design.p_b_max_star), stats)
                    d_hat = mc_outage(inputs, config.trials, stream)
                    est = (params.rate * (1.0 - d_hat.value), params.rate * d_hat.stderr)
            elif name == "p_b_max_star":
                value = design.p_b_max_star
            elif name == "t_eps":
                value = design.t_eps
            elif name == "r_c_limit":
                value = cov.covert_rate_limit(stats, params.rate, params.phi, config.epsilon, form)
        out[name] = value
        if name in MC_OUTPUTS and mc:
            if est is not None and not isinstance(est, tuple):
                est = (est.value, est.stderr)
            out[f"{name}_mc"], out[f"{name}_mc_stderr"] = est if est else (None, None)
    return out


def run_sweep(
    config: ScenarioConfig,
    spec: SweepSpec,
    curves: Sequence[dict[str, str]] = ({},),
    workers: int = 1,
) -> SweepTable:
    """Evaluate ``spec.outputs`` along the sweep, once per curve.

    A curve is a dict of config overrides (``key -> value`` text, ``_db``
    suffix allowed). Point ``i`` of curve ``c`` draws from the sub-stream
    ``(c, i)`` of the config seed, so results do not depend on ``workers``.
    """
    curve_keys: list[str] = []
    for curve in curves:
        curve_keys += [k for k in curve if k not in curve_keys]
    columns = [spec.column] + curve_keys
    for name in spec.outputs:
        columns.append(name)
        if spec.mc and name in MC_OUTPUTS:
            columns += [f"{name}_mc", f"{name}_mc_stderr"]
    columns.append("status")

    jobs = []
    for c, curve in enumerate(curves):
        base = parse_overrides([f"{k}={v}" for k, v in curve.items()], config)
        for i, x in enumerate(spec.values()):
            jobs.append((c, i, float(x), base, curve))
    source = RandomSource(config.seed)

    def run(job):
        c, i, x, base, curve = job
        point = _apply(base, spec.variable, x, spec.scale)
        res = evaluate_point(point, spec.outputs, spec.mc, source.spawn(c, i))
        row = [x] + [_curve_value(curve.get(k)) for k in curve_keys]
        return row + [res[col] for col in columns[1 + len(curve_keys):]]

    table = SweepTable(columns)
    table.rows = parallel_map(run, jobs, workers)
    return table


def _curve_value(text):
    if text is None:
        return None
    try:
        return float(text)
    except ValueError:
        return text


@dataclass(frozen=True)
class Preset:
    base: dict[str, str]
    spec: SweepSpec
    curves: dict[str, tuple[str, ...]]

    def curve_list(self, overrides: dict[str, tuple[str, ...]] | None = None) -> list[dict[str, str]]:
        lists = dict(self.curves)
        lists.update(overrides or {})
        keys = list(lists)
        return [dict(zip(keys, combo)) for combo in itertools.product(*(lists[k] for k in keys))]


PRESETS: dict[str, Preset] = {
    # outage vs AN cap
    "fig2": Preset(
        base={"p_a_db": "0", "phi": "0.01"},
        spec=SweepSpec("p_b_max", -10.0, 30.0, 41, "db", ("delta",)),
        curves={"sigma2_b_db": ("-5", "0"), "rate": ("0.5", "1")},
    ),
    # expected detection error vs AN cap; the p_a values are our choice
    "fig3": Preset(
        base={},
        spec=SweepSpec("p_b_max", -20.0, 40.0, 61, "db", ("expected_xi",)),
        curves={"p_a_db": ("-10", "0", "10")},
    ),
    # maximum effective covert rate vs Alice's power
    "fig4": Preset(
        base={"rate": "1", "sigma2_b_db": "0", "phi": "0.01"},
        spec=SweepSpec("p_a", -10.0, 40.0, 51, "db", ("r_c_star", "p_b_max_star", "t_eps", "r_c_limit")),
        curves={"epsilon": ("0.05", "0.1", "0.2")},
    ),
}


def preset_config(name: str, config: ScenarioConfig, user_overrides: Sequence[str] = ()) -> ScenarioConfig:
    """Preset parameters on top of ``config``, then the user's ``--set`` overrides."""
    preset = PRESETS[name]
    cfg = parse_overrides([f"{k}={v}" for k, v in preset.base.items()], config)
    return parse_overrides(list(user_overrides), cfg)


def run_preset(
    name: str,
    config: ScenarioConfig,
    user_overrides: Sequence[str] = (),
    curve_overrides: dict[str, tuple[str, ...]] | None = None,
    mc: bool = True,
    workers: int = 1,
) -> SweepTable:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {tuple(PRESETS)}")
    preset = PRESETS[name]
    cfg = preset_config(name, config, user_overrides)
    spec = preset.spec if mc else SweepSpec(**{**preset.spec.__dict__, "mc": False})
    return run_sweep(cfg, spec, preset.curve_list(curve_overrides), workers)
