"""Scene-level Monte Carlo estimate of the typical vehicle's coverage.

This is the independent check on :mod:`v2xcov.analytic`: it draws explicit
interferer positions, fading, angles of arrival and building counts, and
never touches the Laplace-transform machinery.

Reproducibility: trials are processed in blocks of ``block_size``; block ``b``
draws from ``SeedSequence(entropy=seed, spawn_key=(b,))``. Results therefore
depend only on (seed, trials, block_size), not on the number of workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import kernels
from .channel import GaussianPattern, blockage_mean, draw_links, received_power
from .config import NlosRoadMode, RoadCase, ScenarioConfig, VehicleModel
from .errors import NumericalError
from .geometry import build_scene, thinned_interferers

Z99 = 2.576
MAX_SCENE_ATTEMPTS = 1000
DEFAULT_BLOCK = 8192

SeedLike = Union[int, np.random.SeedSequence, None]


@dataclass(frozen=True)
class TrialResult:
    sinr: float
    covered: bool
    signal: float
    interference_los: float
    interference_nlos: float


@dataclass(frozen=True)
class CoverageEstimate:
    p_hat: float
    trials: int

    @property
    def covered(self) -> int:
        return int(round(self.p_hat * self.trials))

    @property
    def ci99_half_width(self) -> float:
        """Wald half-width 2.576 * sqrt(p(1-p)/n)."""
        return Z99 * math.sqrt(self.p_hat * (1.0 - self.p_hat) / self.trials)

    def wilson_interval(self, z: float = Z99):
        """Wilson score interval; unlike Wald it keeps nonzero width at p_hat in {0, 1}."""
        n, p = self.trials, self.p_hat
        denom = 1.0 + z * z / n
        centre = (p + z * z / (2 * n)) / denom
        half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
        return max(0.0, centre - half), min(1.0, centre + half)

    def wald_contains(self, p: float) -> bool:
        return abs(p - self.p_hat) <= self.ci99_half_width

    def wilson_contains(self, p: float, z: float = Z99) -> bool:
        lo, hi = self.wilson_interval(z)
        return lo <= p <= hi

    @property
    def p_out(self) -> float:
        return 1.0 - self.p_hat


def difference_z(lower: CoverageEstimate, higher: CoverageEstimate) -> float:
    """z-score of the claim ``p_out(lower) < p_out(higher)`` from two independent estimates."""
    var = (lower.p_hat * (1 - lower.p_hat) / lower.trials
           + higher.p_hat * (1 - higher.p_hat) / higher.trials)
    diff = higher.p_out - lower.p_out
    if var == 0.0:
        return math.inf if diff > 0 else (0.0 if diff == 0 else -math.inf)
    return diff / math.sqrt(var)


def _sinr(signal, noise, interference):
    den = noise + interference
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, signal / np.where(den > 0, den, 1.0), np.where(signal > 0, np.inf, 0.0))
    return out


def simulate_trial(config: ScenarioConfig, vehicle_model: VehicleModel = VehicleModel.PCP,
                   road_case: RoadCase = RoadCase.BOTH, rng: Optional[np.random.Generator] = None,
                   serving_fading: Optional[float] = None) -> TrialResult:
    """One full scene, built through :func:`v2xcov.geometry.build_scene`."""
    rng = np.random.default_rng(config.rng_seed) if rng is None else rng
    vehicle_model, road_case = VehicleModel(vehicle_model), RoadCase(road_case)
    eps = config.exclusion_radius
    for _ in range(MAX_SCENE_ATTEMPTS):
        grid, veh = build_scene(config, vehicle_model, rng)
        on_los = veh.on_los(config.n_los)
        los_sel = veh.interferer & on_los & road_case.has_los
        nlos_sel = veh.interferer & ~on_los & road_case.has_nlos
        r_los = np.abs(veh.position[los_sel])
        if not np.any(r_los <= eps):
            break
    else:
        raise NumericalError(f"no scene without an interferer within {eps} of the receiver "
                             f"after {MAX_SCENE_ATTEMPTS} attempts")
    r_nlos = np.abs(veh.position[nlos_sel])

    pattern = config.profile.antenna
    h0 = rng.exponential() if serving_fading is None else serving_fading
    signal = received_power(config.tx_power, pattern, h0, config.serving_distance, config.pathloss_exponent)

    alpha = config.pathloss_exponent
    d_los = draw_links(rng, r_los, nlos=False)
    i_los = config.tx_power * float(np.sum(pattern.gain(d_los.aoa) * d_los.fading * r_los ** (-alpha)))
    d_nlos = draw_links(rng, r_nlos, nlos=True, grid_half_range=config.grid_half_range,
                        parent_density=config.parent_density, mean_cluster_size=config.mean_cluster_size)
    loss = config.profile.penetration_loss
    i_nlos = config.tx_power * float(np.sum(pattern.gain(d_nlos.aoa) * d_nlos.fading
                                            * loss ** d_nlos.blockage_count.astype(float)))
    sinr = float(_sinr(signal, config.noise_power, i_los + i_nlos))
    return TrialResult(sinr, sinr > config.threshold, float(signal), i_los, i_nlos)


def _interferers(config, model, road_case, m, rng):
    """Interferers of m independent scenes as flat arrays (trial, position, is_nlos)."""
    trials, pos, nlos = [], [], []
    if road_case.has_los:
        road, x = thinned_interferers(config, model, config.n_los * m, rng)
        trials.append(road // config.n_los)
        pos.append(x)
        nlos.append(np.zeros(x.shape[0], dtype=bool))
    if road_case.has_nlos:
        if config.nlos_road_mode is NlosRoadMode.POISSON:
            counts = rng.poisson(config.nlos_road_mean, m)
        else:
            counts = np.full(m, int(config.nlos_road_count))
        road_trial = np.repeat(np.arange(m), counts)
        road, x = thinned_interferers(config, model, road_trial.shape[0], rng)
        trials.append(road_trial[road])
        pos.append(x)
        nlos.append(np.ones(x.shape[0], dtype=bool))
    if not trials:
        return np.zeros(0, dtype=np.int64), np.zeros(0), np.zeros(0, dtype=bool)
    return np.concatenate(trials).astype(np.int64), np.concatenate(pos), np.concatenate(nlos)


def _interference_block(config, model, road_case, m, rng):
    """Total interference (without Pt) for m scenes, redrawing scenes that violate the exclusion zone."""
    pattern = config.profile.antenna
    gaussian = isinstance(pattern, GaussianPattern)
    mu, sd, scale = (pattern.mean, pattern.std, pattern.scale) if gaussian else (0.0, 1.0, 1.0)
    loss = float(config.profile.penetration_loss)
    total = np.zeros(m)
    pending = np.arange(m)
    for _ in range(MAX_SCENE_ATTEMPTS):
        k = pending.shape[0]
        trial, x, nlos = _interferers(config, model, road_case, k, rng)
        n = x.shape[0]
        theta = rng.uniform(0.0, 2.0 * math.pi, n)
        fading = rng.exponential(1.0, n)
        dist = np.abs(x)
        kcount = np.zeros(n, dtype=np.int64)
        if nlos.any():
            mu_b = blockage_mean(dist[nlos], theta[nlos], config.grid_half_range,
                                 config.parent_density, config.mean_cluster_size)
            kcount[nlos] = 1 + rng.poisson(mu_b)
        bad_link = ~nlos & (dist <= config.exclusion_radius)
        dist = np.where(bad_link, 1.0, dist)
        i_los, i_nlos = kernels.interference_sums(trial, theta, fading, dist, kcount, nlos, k,
                                                  float(config.pathloss_exponent), loss, gaussian,
                                                  float(mu), float(sd), float(scale))
        bad = np.zeros(k, dtype=bool)
        bad[trial[bad_link]] = True
        total[pending[~bad]] = (i_los + i_nlos)[~bad]
        pending = pending[bad]
        if pending.size == 0:
            return total
    raise NumericalError(f"exclusion-zone rejection did not terminate for {pending.size} scenes")


def simulate_block(config: ScenarioConfig, vehicle_model: VehicleModel, road_case: RoadCase,
                   trials: int, rng: np.random.Generator) -> np.ndarray:
    """SINR of ``trials`` independent scenes drawn with the thinned-process sampler."""
    h0 = rng.exponential(1.0, trials)
    signal = received_power(config.tx_power, config.profile.antenna, h0, config.serving_distance,
                            config.pathloss_exponent)
    interference = config.tx_power * _interference_block(config, vehicle_model, road_case, trials, rng)
    return _sinr(signal, config.noise_power, interference)


def block_seed(seed: SeedLike, block: int) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(entropy=seed.entropy, spawn_key=tuple(seed.spawn_key) + (block,))
    return np.random.SeedSequence(entropy=seed, spawn_key=(block,))


def estimate_coverage(config: ScenarioConfig, vehicle_model: VehicleModel = VehicleModel.PCP,
                      road_case: RoadCase = RoadCase.BOTH, trials: int = 100_000, seed: SeedLike = None,
                      block_size: int = DEFAULT_BLOCK, workers: int = 1) -> CoverageEstimate:
    """Fraction of ``trials`` scenes with SINR > T; ``seed`` defaults to ``config.rng_seed``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    vehicle_model, road_case = VehicleModel(vehicle_model), RoadCase(road_case)
    seed = config.rng_seed if seed is None else seed
    sizes = [min(block_size, trials - lo) for lo in range(0, trials, block_size)]

    def run(b):
        rng = np.random.Generator(np.random.PCG64(block_seed(seed, b)))
        sinr = simulate_block(config, vehicle_model, road_case, sizes[b], rng)
        return int(np.count_nonzero(sinr > config.threshold))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            hits = sum(pool.map(run, range(len(sizes))))
    else:
        hits = sum(run(b) for b in range(len(sizes)))
    return CoverageEstimate(hits / trials, trials)
