"""Scenario configuration from flat ``key = value`` text.

Power keys (``p_a``, ``p_b_max``, ``sigma2_b``, ``sigma2_w``) also accept a
``_db`` suffix, converted with ``10**(dB/10)``. Blank lines and ``#`` comments
are ignored. Absent keys take the defaults below.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from .covertness import XI_FORMS
from .model import ChannelStats, ParameterError, SystemParams, db_to_linear

POWER_KEYS = ("p_a", "p_b_max", "sigma2_b", "sigma2_w")
STATS_KEYS = ("lambda_ab", "lambda_bb", "lambda_aw", "lambda_bw")
PARAM_KEYS = POWER_KEYS + ("phi", "rate")
OTHER_KEYS = ("epsilon", "seed", "trials", "xi_form")
KNOWN_KEYS = set(STATS_KEYS + PARAM_KEYS + OTHER_KEYS) | {k + "_db" for k in POWER_KEYS}

DEFAULT_TRIALS = 100_000


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.key = key
        self.line = line


@dataclass(frozen=True)
class ScenarioConfig:
    stats: ChannelStats = field(default_factory=ChannelStats)
    params: SystemParams = field(default_factory=SystemParams)
    epsilon: float | None = None
    seed: int = 0
    trials: int = DEFAULT_TRIALS
    xi_form: str = "exact"

    def with_(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)


def _number(key, text, line):
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"malformed number {text!r}", key, line) from None
    if not math.isfinite(value):
        raise ConfigError(f"value must be finite, got {text!r}", key, line)
    return value


def _integer(key, text, line):
    try:
        return int(text, 0)
    except ValueError:
        value = _number(key, text, line)
        if value != int(value):
            raise ConfigError(f"expected an integer, got {text!r}", key, line) from None
        return int(value)


def parse_pairs(pairs: Iterable[tuple[str, str, int | None]], base: ScenarioConfig | None = None):
    """Fold ``(key, value, line)`` triples into a validated config."""
    base = base or ScenarioConfig()
    values: dict[str, float] = {}
    lines: dict[str, int | None] = {}
    extra: dict[str, object] = {}
    spelled: dict[str, str] = {}
    for key, text, line in pairs:
        if key not in KNOWN_KEYS:
            raise ConfigError("unknown key", key, line)
        canon = key[:-3] if key.endswith("_db") else key
        if spelled.setdefault(canon, key) != key:
            raise ConfigError(f"conflicts with {spelled[canon]!r}", key, line)
        if key in ("seed", "trials"):
            extra[key] = _integer(key, text, line)
        elif key == "xi_form":
            if text not in XI_FORMS:
                raise ConfigError(f"must be one of {XI_FORMS}, got {text!r}", key, line)
            extra[key] = text
        elif key == "epsilon":
            if text.lower() in ("none", ""):
                extra[key] = None
            else:
                eps = _number(key, text, line)
                if not 0.0 <= eps <= 1.0:
                    raise ConfigError(f"out of range [0, 1]: {eps}", key, line)
                extra[key] = eps
        else:
            value = _number(key, text, line)
            values[canon] = db_to_linear(value) if key.endswith("_db") else value
        lines[canon] = line

    if extra.get("trials", base.trials) < 1000:
        raise ConfigError("out of range: must be >= 1000", "trials", lines.get("trials"))
    if not 0 <= extra.get("seed", base.seed) < 2**64:
        raise ConfigError("out of range: must be an unsigned 64-bit integer", "seed", lines.get("seed"))

    def build(cls, keys, current):
        kwargs = {k: values.get(k, getattr(current, k)) for k in keys}
        try:
            return cls(**kwargs)
        except ParameterError as exc:
            bad = next((k for k in keys if k in str(exc).split()[0:1]), None)
            raise ConfigError(f"out of range: {exc}", bad, lines.get(bad)) from None

    return ScenarioConfig(
        stats=build(ChannelStats, STATS_KEYS, base.stats),
        params=build(SystemParams, PARAM_KEYS, base.params),
        epsilon=extra.get("epsilon", base.epsilon),
        seed=extra.get("seed", base.seed),
        trials=extra.get("trials", base.trials),
        xi_form=extra.get("xi_form", base.xi_form),
    )


def _split(entry: str, line: int | None):
    if "=" not in entry:
        raise ConfigError(f"expected 'key = value', got {entry.strip()!r}", None, line)
    key, _, value = entry.partition("=")
    return key.strip(), value.strip(), line


def parse_text(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    pairs = []
    for number, raw in enumerate(text.splitlines(), start=1):
        entry = raw.split("#", 1)[0].strip()
        if entry:
            pairs.append(_split(entry, number))
    return parse_pairs(pairs, base)


def parse_overrides(items: Iterable[str], base: ScenarioConfig) -> ScenarioConfig:
    """Apply ``--set key=value`` style overrides."""
    return parse_pairs([_split(item, None) for item in items], base)


def parse_config(source: str | os.PathLike | None = None, base: ScenarioConfig | None = None):
    """Parse a config file, or inline ``key = value`` text.

    ``None`` or an empty string gives the all-defaults config.
    """
    if source is None:
        return base or ScenarioConfig()
    path = Path(source)
    if isinstance(source, os.PathLike) or "=" not in str(source) and "\n" not in str(source):
        if str(source) and not path.is_file():
            raise ConfigError(f"config file not found: {source}")
        text = path.read_text() if str(source) else ""
    else:
        text = str(source)
    return parse_text(text, base)
