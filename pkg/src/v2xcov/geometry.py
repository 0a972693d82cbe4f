"""Road grid and 1D vehicle point processes (PPP and Thomas cluster process).

Positions are along-road coordinates in [-R, R]. The typical vehicle sits at
the origin, on the intersection of the two LoS roads, and is never an
interferer.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.special import ndtr, ndtri

from .config import NlosRoadMode, ScenarioConfig, Thinning, VehicleModel
from .errors import NumericalError, ParameterError

MAX_REJECTION_ROUNDS = 1000


@dataclass(frozen=True)
class Road:
    axis: str  # "x" (horizontal) or "y" (vertical)
    offset: float  # perpendicular offset from the typical vehicle
    los: bool


@dataclass(frozen=True)
class RoadGrid:
    los_roads: Tuple[Road, ...]
    nlos_roads: Tuple[Road, ...]

    @property
    def roads(self) -> Tuple[Road, ...]:
        """LoS roads first, so road index < 2 means LoS."""
        return self.los_roads + self.nlos_roads

    @property
    def n_nlos(self) -> int:
        return len(self.nlos_roads)


@dataclass(frozen=True)
class VehicleSet:
    """Column-wise vehicle table; ``cluster`` is -1 and ``parent`` NaN for PPP vehicles."""

    road: np.ndarray
    position: np.ndarray
    interferer: np.ndarray
    cluster: np.ndarray
    parent: np.ndarray

    def __len__(self) -> int:
        return self.position.shape[0]

    def on_los(self, n_los: int = 2) -> np.ndarray:
        return self.road < n_los


# -- samplers -----------------------------------------------------------------

def _check_range(half_range):
    if half_range <= 0:
        raise ParameterError(f"half_range must be > 0, got {half_range}")


def ppp_batch(n_roads: int, density: float, half_range: float, rng: np.random.Generator):
    """Independent 1D PPPs on ``n_roads`` copies of [-R, R]; returns (road, position)."""
    if density < 0:
        raise ParameterError(f"density must be >= 0, got {density}")
    _check_range(half_range)
    counts = rng.poisson(2.0 * half_range * density, n_roads)
    road = np.repeat(np.arange(n_roads), counts)
    pos = rng.uniform(-half_range, half_range, road.shape[0])
    return road, pos


def truncated_normal(rng: np.random.Generator, std: float, bound: float, size) -> np.ndarray:
    """N(0, std^2) conditioned on [-bound, bound], by inverse CDF."""
    lo = ndtr(-bound / std)
    hi = ndtr(bound / std)
    y = std * ndtri(rng.uniform(lo, hi, size))
    return np.clip(y, -bound, bound)


def truncated_normal_pdf(y, std: float, bound: float):
    y = np.asarray(y, dtype=float)
    mass = ndtr(bound / std) - ndtr(-bound / std)
    pdf = np.exp(-0.5 * (y / std) ** 2) / (std * np.sqrt(2.0 * np.pi) * mass)
    return np.where(np.abs(y) <= bound, pdf, 0.0)


@dataclass(frozen=True)
class ClusterBatch:
    road: np.ndarray  # road of each daughter
    cluster: np.ndarray  # global parent index of each daughter
    position: np.ndarray
    parent_road: np.ndarray
    parent_position: np.ndarray


def thomas_batch(n_roads: int, parent_density: float, mean_size: float, std: float,
                 half_range: float, cluster_half_range: float, rng: np.random.Generator) -> ClusterBatch:
    """Thomas cluster processes on ``n_roads`` roads.

    Daughter offsets are Gaussian truncated to [-Rc, Rc]; a daughter landing
    outside [-R, R] redraws its offset until it lands inside.
    """
    if std <= 0:
        raise ParameterError(f"cluster std must be > 0, got {std}")
    if mean_size < 0:
        raise ParameterError(f"mean cluster size must be >= 0, got {mean_size}")
    parent_road, parent_pos = ppp_batch(n_roads, parent_density, half_range, rng)
    sizes = rng.poisson(mean_size, parent_pos.shape[0])
    cluster = np.repeat(np.arange(parent_pos.shape[0]), sizes)
    anchor = parent_pos[cluster]
    pos = anchor + truncated_normal(rng, std, cluster_half_range, cluster.shape[0])
    bad = np.flatnonzero(np.abs(pos) > half_range)
    rounds = 0
    while bad.size:
        rounds += 1
        if rounds > MAX_REJECTION_ROUNDS:
            raise NumericalError("daughter rejection did not terminate")
        pos[bad] = anchor[bad] + truncated_normal(rng, std, cluster_half_range, bad.shape[0])
        bad = bad[np.abs(pos[bad]) > half_range]
    return ClusterBatch(parent_road[cluster], cluster, pos, parent_road, parent_pos)


def sample_ppp_1d(density: float, half_range: float, rng: np.random.Generator) -> np.ndarray:
    return ppp_batch(1, density, half_range, rng)[1]


def sample_thomas_1d(parent_density: float, mean_size: float, std: float, half_range: float,
                     cluster_half_range: float, rng: np.random.Generator) -> List[Tuple[float, np.ndarray]]:
    """One road's clusters as a list of (parent position, daughter positions)."""
    if not 0 < cluster_half_range <= half_range:
        raise ParameterError("need 0 < cluster_half_range <= half_range")
    b = thomas_batch(1, parent_density, mean_size, std, half_range, cluster_half_range, rng)
    return [(float(p), b.position[b.cluster == i]) for i, p in enumerate(b.parent_position)]


def thinned_interferers(config: ScenarioConfig, model: VehicleModel, n_roads: int,
                        rng: np.random.Generator):
    """Sample only the interferers on ``n_roads`` roads; returns (road, position).

    Independent P_I-thinning of a Poisson-driven process is again Poisson, so
    the interferer pattern can be drawn directly with thinned intensities.
    """
    R, p_i = config.grid_half_range, config.interference_prob
    if model is VehicleModel.PPP:
        return ppp_batch(n_roads, p_i * config.effective_vehicle_density, R, rng)
    if config.thinning is Thinning.CLUSTER:
        lam, cbar = p_i * config.parent_density, config.mean_cluster_size
    else:
        lam, cbar = config.parent_density, p_i * config.mean_cluster_size
    b = thomas_batch(n_roads, lam, cbar, config.cluster_stddev, R, config.cluster_half_range, rng)
    return b.road, b.position


# -- scenes -------------------------------------------------------------------

def sample_road_grid(config: ScenarioConfig, rng: np.random.Generator) -> RoadGrid:
    R = config.grid_half_range
    los = (Road("x", 0.0, True), Road("y", 0.0, True))
    if config.nlos_road_mode is NlosRoadMode.POISSON:
        nlos = [Road(axis, float(off), False)
                for axis in ("x", "y")
                for off in sample_ppp_1d(config.road_density, R, rng)]
    else:
        n = int(config.nlos_road_count)
        axes = rng.integers(0, 2, n)
        offs = rng.uniform(-R, R, n)
        nlos = [Road("xy"[a], float(o), False) for a, o in zip(axes, offs)]
    return RoadGrid(los, tuple(nlos))


def build_scene(config: ScenarioConfig, model: VehicleModel, rng: np.random.Generator):
    """Sample a full scene: road grid plus every vehicle with its interferer mark."""
    model = VehicleModel(model)
    grid = sample_road_grid(config, rng)
    n_roads = len(grid.roads)
    R, p_i = config.grid_half_range, config.interference_prob
    if model is VehicleModel.PPP:
        road, pos = ppp_batch(n_roads, config.effective_vehicle_density, R, rng)
        cluster = np.full(road.shape[0], -1)
        parent = np.full(road.shape[0], np.nan)
        mark = rng.random(road.shape[0]) < p_i
    else:
        b = thomas_batch(n_roads, config.parent_density, config.mean_cluster_size, config.cluster_stddev,
                         R, config.cluster_half_range, rng)
        road, pos, cluster = b.road, b.position, b.cluster
        parent = b.parent_position[cluster]
        if config.thinning is Thinning.CLUSTER:
            mark = (rng.random(b.parent_position.shape[0]) < p_i)[cluster]
        else:
            mark = rng.random(road.shape[0]) < p_i
    return grid, VehicleSet(road, pos, mark, cluster, parent)
