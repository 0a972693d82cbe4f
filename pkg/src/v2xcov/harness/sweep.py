"""Parameter sweeps producing outage curves, plus the named presets."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .. import __version__
from ..analytic import coverage
from ..channel import Carrier, db_to_linear
from ..config import RoadCase, ScenarioConfig, VehicleModel, _enum
from ..errors import ParameterError
from ..montecarlo import estimate_coverage
from ..quadrature import QuadratureSpec

# sweep / override variable -> (config field, converter from file units)
VARIABLES = {
    "r0": ("serving_distance", float),
    "T": ("threshold", lambda v: db_to_linear(float(v))),
    "c_bar": ("mean_cluster_size", float),
}


class SweepError(RuntimeError):
    pass


@dataclass(frozen=True)
class Series:
    """One curve: vehicle model, carrier, road composition and optional fixed overrides."""

    model: VehicleModel
    frequency: Carrier
    road_case: RoadCase
    overrides: Tuple[Tuple[str, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "model", _enum(VehicleModel, self.model))
        object.__setattr__(self, "frequency", _enum(Carrier, self.frequency))
        object.__setattr__(self, "road_case", _enum(RoadCase, self.road_case))
        for key, _ in self.overrides:
            if key not in VARIABLES:
                raise ParameterError(f"unknown series override {key!r}; allowed: {sorted(VARIABLES)}")

    @property
    def series_id(self) -> str:
        parts = [self.model.value, self.frequency.value, self.road_case.value]
        parts += [f"{k}={v:g}" for k, v in self.overrides]
        return "/".join(parts)

    @classmethod
    def parse(cls, text: str) -> "Series":
        """Parse ``MODEL/FREQUENCY/CASE[/key=value...]``, e.g. ``PCP/mmwave/Both/c_bar=2``."""
        parts = [p.strip() for p in str(text).split("/")]
        if len(parts) < 3:
            raise ParameterError(f"series {text!r} must look like MODEL/FREQUENCY/CASE[/key=value]")
        overrides = []
        for p in parts[3:]:
            key, sep, value = p.partition("=")
            if not sep:
                raise ParameterError(f"series override {p!r} must be key=value")
            overrides.append((key.strip(), float(value)))
        return cls(parts[0], parts[1], parts[2], tuple(overrides))

    def apply(self, config: ScenarioConfig) -> ScenarioConfig:
        changes = {"frequency": self.frequency}
        for key, value in self.overrides:
            name, conv = VARIABLES[key]
            changes[name] = conv(value)
        return config.replace(**changes)


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: Tuple[float, ...]
    series: Tuple[Series, ...]
    mc_trials: int = 0

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ParameterError(f"sweep variable must be one of {sorted(VARIABLES)}, got {self.variable!r}")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ParameterError("sweep values must be nonempty")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ParameterError("sweep values must be strictly increasing")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "series", tuple(self.series))
        if self.mc_trials < 0:
            raise ParameterError("mc_trials must be >= 0")

    def with_trials(self, mc_trials: int) -> "SweepSpec":
        return SweepSpec(self.variable, self.values, self.series, mc_trials)

    def point_config(self, config: ScenarioConfig, series: Series, value: float) -> ScenarioConfig:
        name, conv = VARIABLES[self.variable]
        return series.apply(config).replace(**{name: conv(value)})


@dataclass(frozen=True)
class CurvePoint:
    value: float
    series_id: str
    p_out_analytic: float
    analytic_error: float
    p_out_mc: Optional[float] = None
    ci99: Optional[float] = None


@dataclass(frozen=True)
class CoverageCurve:
    variable: str
    points: Tuple[CurvePoint, ...]
    metadata: Dict = field(default_factory=dict, compare=False)

    def series_ids(self) -> List[str]:
        seen: Dict[str, None] = {}
        for p in self.points:
            seen.setdefault(p.series_id, None)
        return list(seen)

    def series(self, series_id: str) -> List[CurvePoint]:
        return [p for p in self.points if p.series_id == series_id]


def _evaluate_point(args) -> CurvePoint:
    config, series, variable, value, trials, seed_key, quad = args
    res = coverage(config, series.model, series.road_case, quad)
    p_mc = ci = None
    if trials:
        est = estimate_coverage(config, series.model, series.road_case, trials,
                                seed=np.random.SeedSequence(entropy=seed_key[0], spawn_key=seed_key[1:]))
        p_mc, ci = est.p_out, est.ci99_half_width
    return CurvePoint(value, series.series_id, res.p_out, res.error, p_mc, ci)


def run_sweep(config: ScenarioConfig, sweep: SweepSpec, quad: QuadratureSpec = QuadratureSpec(),
              seed: Optional[int] = None, workers: int = 1) -> CoverageCurve:
    """Evaluate every (series, value) point; MC streams are keyed by (seed, series index, point index)."""
    seed = config.rng_seed if seed is None else int(seed)
    jobs = []
    for si, series in enumerate(sweep.series):
        for vi, value in enumerate(sweep.values):
            try:
                cfg = sweep.point_config(config, series, value)
            except ParameterError as exc:
                raise SweepError(f"{series.series_id} at {sweep.variable}={value:g}: {exc}") from exc
            jobs.append((cfg, series, sweep.variable, value, sweep.mc_trials, (seed, si, vi), quad))

    def describe(job):
        return f"{job[1].series_id} at {sweep.variable}={job[3]:g}"

    points = []
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(_evaluate_point, j) for j in jobs]
            for job, fut in zip(jobs, futures):
                try:
                    points.append(fut.result())
                except Exception as exc:
                    raise SweepError(f"{describe(job)}: {exc}") from exc
    else:
        for job in jobs:
            try:
                points.append(_evaluate_point(job))
            except Exception as exc:
                raise SweepError(f"{describe(job)}: {exc}") from exc

    meta = {
        "tool": "v2xcov",
        "version": __version__,
        "seed": seed,
        "sweep_variable": sweep.variable,
        "mc_trials": sweep.mc_trials,
        "config": config.to_dict(),
        "quadrature": {k: getattr(quad, k) for k in quad.__dataclass_fields__},
    }
    return CoverageCurve(sweep.variable, tuple(points), meta)


# -- presets ------------------------------------------------------------------

def _grid(models, freqs, cases, overrides=((),)):
    return tuple(Series(m, f, c, o) for c in cases for o in overrides for f in freqs for m in models)


MODELS = (VehicleModel.PCP, VehicleModel.PPP)
FREQS = (Carrier.MMWAVE, Carrier.SUB6)
R0_VALUES = tuple(round(0.1 * k, 1) for k in range(1, 21))


def preset_table2():
    return ScenarioConfig(), SweepSpec("r0", R0_VALUES, _grid(MODELS, FREQS, (RoadCase.BOTH,)))


def preset_fig4():
    config = ScenarioConfig(cluster_stddev=0.8, threshold=db_to_linear(-10.0))
    cbars = tuple(((("c_bar", c),)) for c in (2.0, 5.0, 10.0))
    return config, SweepSpec("r0", R0_VALUES, _grid(MODELS, FREQS, tuple(RoadCase), cbars))


def preset_fig5():
    config = ScenarioConfig(cluster_stddev=0.8, mean_cluster_size=5.0)
    r0s = tuple(((("r0", r),)) for r in (0.5, 1.0, 2.0))
    t_values = tuple(float(t) for t in range(-20, 21, 2))
    return config, SweepSpec("T", t_values, _grid(MODELS, FREQS, (RoadCase.BOTH,), r0s))


PRESETS = {"table2": preset_table2, "fig4": preset_fig4, "fig5": preset_fig5}
