"""Scenario parameters and the enums shared by every module.

Internally everything is linear (mW, SINR ratio) and in radians; the dB /
dBm / degree forms only appear in :mod:`v2xcov.harness.configfile`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

from .channel import Carrier, FrequencyProfile, GaussianPattern, OmniPattern, db_to_linear, dbm_to_mw
from .errors import ParameterError


class VehicleModel(str, enum.Enum):
    PPP = "PPP"
    PCP = "PCP"


class RoadCase(str, enum.Enum):
    ONLY_LOS = "OnlyLoS"
    ONLY_NLOS = "OnlyNLoS"
    BOTH = "Both"

    @property
    def has_los(self) -> bool:
        return self is not RoadCase.ONLY_NLOS

    @property
    def has_nlos(self) -> bool:
        return self is not RoadCase.ONLY_LOS


class NlosRoadMode(str, enum.Enum):
    FIXED = "fixed"
    POISSON = "poisson"


class Thinning(str, enum.Enum):
    """How interferers are selected from a clustered process.

    ``CLUSTER`` activates whole clusters with probability P_I, which is the
    model behind the clustered Laplace transform ``exp(-P_I lp int[1 - M])``.
    ``VEHICLE`` marks each vehicle independently; the transform then becomes
    ``exp(-lp int[1 - M_{P_I c}])``. PPP interferers are identical either way.
    """

    CLUSTER = "cluster"
    VEHICLE = "vehicle"


def _enum(cls, value):
    if isinstance(value, cls):
        return value
    key = str(value).strip().lower()
    for member in cls:
        if member.value.lower() == key or member.name.lower() == key:
            return member
    raise ParameterError(f"{value!r} is not one of {[m.value for m in cls]}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Every parameter of the urban crossroad model (lengths in units of 100 m)."""

    grid_half_range: float = 5.0
    cluster_half_range: float = 1.0
    parent_density: float = 0.5
    vehicle_density: Optional[float] = None  # None: matched to parent_density * mean_cluster_size
    mean_cluster_size: float = 5.0
    cluster_stddev: float = 0.5
    pathloss_exponent: float = 2.0
    tx_power: float = dbm_to_mw(43.0)
    interference_prob: float = 0.3
    noise_power: float = dbm_to_mw(-104.5)
    n_los: int = 2
    nlos_road_mode: NlosRoadMode = NlosRoadMode.POISSON
    nlos_road_mean: float = 8.0
    nlos_road_count: int = 8
    serving_distance: float = 1.0
    threshold: float = db_to_linear(-10.0)
    frequency: Carrier = Carrier.MMWAVE
    mmwave_loss: float = db_to_linear(-40.0)
    sub6_loss: float = db_to_linear(-30.0)
    antenna_mean: float = math.pi
    antenna_std: float = math.radians(50.0)
    thinning: Thinning = Thinning.CLUSTER
    exclusion_radius: float = 0.0
    rng_seed: int = 0
    _profile: FrequencyProfile = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "nlos_road_mode", _enum(NlosRoadMode, self.nlos_road_mode))
        object.__setattr__(self, "frequency", _enum(Carrier, self.frequency))
        object.__setattr__(self, "thinning", _enum(Thinning, self.thinning))
        self._check()
        if self.frequency is Carrier.MMWAVE:
            antenna = GaussianPattern.normalized(self.antenna_mean, self.antenna_std)
            prof = FrequencyProfile(Carrier.MMWAVE, self.mmwave_loss, antenna)
        else:
            prof = FrequencyProfile(Carrier.SUB6, self.sub6_loss, OmniPattern())
        object.__setattr__(self, "_profile", prof)

    def _check(self):
        def need(ok, invariant):
            if not ok:
                raise ParameterError(f"invariant violated: {invariant}")

        need(self.grid_half_range > 0, f"grid_half_range > 0 (got {self.grid_half_range})")
        need(0 < self.cluster_half_range <= self.grid_half_range,
             f"0 < cluster_half_range <= grid_half_range (got Rc={self.cluster_half_range}, R={self.grid_half_range})")
        need(self.parent_density >= 0, f"parent_density >= 0 (got {self.parent_density})")
        need(self.vehicle_density is None or self.vehicle_density >= 0,
             f"vehicle_density >= 0 (got {self.vehicle_density})")
        need(self.mean_cluster_size > 0, f"mean_cluster_size > 0 (got {self.mean_cluster_size})")
        need(self.cluster_stddev > 0, f"cluster_stddev > 0 (got {self.cluster_stddev})")
        need(self.pathloss_exponent > 0, f"pathloss_exponent > 0 (got {self.pathloss_exponent})")
        need(self.tx_power > 0, f"tx_power > 0 (got {self.tx_power})")
        need(0.0 <= self.interference_prob <= 1.0, f"0 <= interference_prob <= 1 (got {self.interference_prob})")
        need(self.noise_power >= 0, f"noise_power >= 0 (got {self.noise_power})")
        need(self.n_los == 2, f"n_los == 2 (got {self.n_los})")
        need(self.nlos_road_mean >= 0, f"nlos_road_mean >= 0 (got {self.nlos_road_mean})")
        need(int(self.nlos_road_count) == self.nlos_road_count and self.nlos_road_count >= 0,
             f"nlos_road_count is a nonnegative integer (got {self.nlos_road_count})")
        need(self.serving_distance > 0, f"serving_distance > 0 (got {self.serving_distance})")
        need(self.threshold >= 0, f"threshold >= 0 (got {self.threshold})")
        need(0 < self.mmwave_loss < 1, f"0 < mmwave_loss < 1 (got {self.mmwave_loss})")
        need(0 < self.sub6_loss < 1, f"0 < sub6_loss < 1 (got {self.sub6_loss})")
        need(self.antenna_std > 0, f"antenna_std > 0 (got {self.antenna_std})")
        need(self.exclusion_radius >= 0, f"exclusion_radius >= 0 (got {self.exclusion_radius})")

    # -- derived quantities --

    @property
    def profile(self) -> FrequencyProfile:
        return self._profile

    @property
    def effective_vehicle_density(self) -> float:
        if self.vehicle_density is None:
            return self.parent_density * self.mean_cluster_size
        return self.vehicle_density

    @property
    def road_density(self) -> float:
        """Roads per unit length on each axis implied by the mean NLoS road count."""
        return self.nlos_road_mean / (2.0 * 2.0 * self.grid_half_range)

    @property
    def blockage_coef(self) -> float:
        """mu = blockage_coef * r * (|cos| + |sin|)."""
        return self.grid_half_range * self.parent_density * self.mean_cluster_size

    def replace(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("_profile", None)
        for k, v in d.items():
            if isinstance(v, enum.Enum):
                d[k] = v.value
        return d
