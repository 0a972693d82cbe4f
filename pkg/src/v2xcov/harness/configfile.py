"""Flat ``key: value`` configuration files.

Human units on disk: powers in dBm, losses and thresholds in dB, angles in
degrees, lengths in units of 100 m. Unknown keys are an error. Keys left out
take the preset's value (the baseline parameters by default).
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml

from ..channel import db_to_linear, dbm_to_mw
from ..config import ScenarioConfig
from ..errors import ParameterError
from .sweep import PRESETS, Series, SweepSpec

# file key -> (config field, converter)
SCENARIO_KEYS = {
    "grid_half_range": ("grid_half_range", float),
    "cluster_half_range": ("cluster_half_range", float),
    "parent_density": ("parent_density", float),
    "vehicle_density": ("vehicle_density", lambda v: None if v is None or str(v).lower() in ("none", "matched") else float(v)),
    "mean_cluster_size": ("mean_cluster_size", float),
    "cluster_stddev": ("cluster_stddev", float),
    "pathloss_exponent": ("pathloss_exponent", float),
    "tx_power_dbm": ("tx_power", lambda v: dbm_to_mw(float(v))),
    "interference_prob": ("interference_prob", float),
    "noise_power_dbm": ("noise_power", lambda v: dbm_to_mw(float(v))),
    "n_los": ("n_los", int),
    "nlos_road_mode": ("nlos_road_mode", str),
    "nlos_road_mean": ("nlos_road_mean", float),
    "nlos_road_count": ("nlos_road_count", int),
    "serving_distance": ("serving_distance", float),
    "threshold_db": ("threshold", lambda v: db_to_linear(float(v))),
    "frequency": ("frequency", str),
    "penetration_loss_mmwave_db": ("mmwave_loss", lambda v: db_to_linear(float(v))),
    "penetration_loss_sub6_db": ("sub6_loss", lambda v: db_to_linear(float(v))),
    "antenna_mean_deg": ("antenna_mean", lambda v: math.radians(float(v))),
    "antenna_std_deg": ("antenna_std", lambda v: math.radians(float(v))),
    "thinning": ("thinning", str),
    "exclusion_radius": ("exclusion_radius", float),
    "seed": ("rng_seed", int),
}

SWEEP_KEYS = ("sweep_variable", "sweep_values", "series", "mc_trials")


def _as_list(v):
    if isinstance(v, str):
        return [p.strip() for p in v.split(",") if p.strip()]
    if isinstance(v, (list, tuple)):
        return list(v)
    return [v]


def parse_mapping(raw: Dict[str, Any], preset: str = "table2") -> Tuple[ScenarioConfig, SweepSpec]:
    if preset not in PRESETS:
        raise ParameterError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    base_config, base_sweep = PRESETS[preset]()
    unknown = sorted(set(raw) - set(SCENARIO_KEYS) - set(SWEEP_KEYS))
    if unknown:
        raise ParameterError(f"unknown config key(s): {', '.join(unknown)}")
    changes = {}
    for key, value in raw.items():
        if key in SCENARIO_KEYS:
            field, conv = SCENARIO_KEYS[key]
            try:
                changes[field] = conv(value)
            except (TypeError, ValueError) as exc:
                raise ParameterError(f"bad value for {key}: {value!r} ({exc})") from None
    config = base_config.replace(**changes)

    sweep = base_sweep
    if "sweep_variable" in raw or "sweep_values" in raw:
        sweep = SweepSpec(raw.get("sweep_variable", sweep.variable),
                          tuple(float(v) for v in _as_list(raw.get("sweep_values", sweep.values))),
                          sweep.series, sweep.mc_trials)
    if "series" in raw:
        sweep = SweepSpec(sweep.variable, sweep.values,
                          tuple(Series.parse(s) for s in _as_list(raw["series"])), sweep.mc_trials)
    if "mc_trials" in raw:
        sweep = SweepSpec(sweep.variable, sweep.values, sweep.series, int(raw["mc_trials"]))
    return config, sweep


def load_config(path: Optional[Union[str, Path]], preset: str = "table2") -> Tuple[ScenarioConfig, SweepSpec]:
    """Read a config file into a resolved (ScenarioConfig, SweepSpec) pair."""
    raw: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ParameterError(f"cannot read config {path}: {exc}") from None
        loaded = yaml.safe_load(text)
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict) or any(isinstance(v, dict) for v in loaded.values()):
            raise ParameterError(f"{path}: expected flat 'key: value' lines")
        raw = loaded
    return parse_mapping(raw, preset)
