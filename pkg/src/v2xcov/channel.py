"""Channel primitives: path loss, building blockage, Rayleigh fading and antenna gain."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import ParameterError
from .kernels import wrap_angle

TWO_PI = 2.0 * math.pi


# -- unit conversions -------------------------------------------------------

def db_to_linear(db):
    out = np.power(10.0, np.asarray(db, dtype=float) / 10.0)
    return out if out.ndim else float(out)


def linear_to_db(x):
    out = 10.0 * np.log10(np.asarray(x, dtype=float))
    return out if out.ndim else float(out)


def dbm_to_mw(dbm):
    return db_to_linear(dbm)


def mw_to_dbm(mw):
    return linear_to_db(mw)


deg_to_rad = math.radians
rad_to_deg = math.degrees


# -- antenna patterns -------------------------------------------------------

@dataclass(frozen=True)
class OmniPattern:
    """Uniform gain in every direction."""

    gain_value: float = 1.0

    def gain(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.full(theta.shape, self.gain_value) if theta.ndim else self.gain_value

    @property
    def boresight(self) -> float:
        return 0.0

    @property
    def peak_gain(self) -> float:
        return self.gain_value


def gaussian_scale(std: float) -> float:
    """Peak gain making a wrapped Gaussian mainlobe integrate to 2*pi over a turn."""
    # integral over (-pi, pi] of exp(-t^2 / (2 std^2)) dt
    mass = std * math.sqrt(TWO_PI) * math.erf(math.pi / (std * math.sqrt(2.0)))
    return TWO_PI / mass


@dataclass(frozen=True)
class GaussianPattern:
    """Gaussian approximation of a directional mainlobe, angles in radians.

    ``scale`` is the peak gain; use :meth:`normalized` to get the scale that
    gives the same total gain as a unit omni antenna.
    """

    mean: float
    std: float
    scale: float

    @classmethod
    def normalized(cls, mean: float = math.pi, std: float = math.radians(50.0)) -> "GaussianPattern":
        if std <= 0:
            raise ParameterError(f"antenna std must be > 0, got {std}")
        return cls(mean=mean, std=std, scale=gaussian_scale(std))

    def gain(self, theta):
        d = wrap_angle(np.asarray(theta, dtype=float) - self.mean)
        g = self.scale * np.exp(-d * d / (2.0 * self.std * self.std))
        return g if np.ndim(g) else float(g)

    @property
    def boresight(self) -> float:
        return self.mean

    @property
    def peak_gain(self) -> float:
        return self.scale


AntennaPattern = Union[OmniPattern, GaussianPattern]


def antenna_gain(pattern: AntennaPattern, theta):
    return pattern.gain(theta)


class Carrier(str, enum.Enum):
    MMWAVE = "mmwave"
    SUB6 = "sub6"


@dataclass(frozen=True)
class FrequencyProfile:
    carrier: Carrier
    penetration_loss: float
    antenna: AntennaPattern

    def __post_init__(self):
        if not 0.0 < self.penetration_loss < 1.0:
            raise ParameterError(f"penetration loss must lie in (0, 1), got {self.penetration_loss}")

    @classmethod
    def mmwave(cls, loss_db: float = -40.0, mean_deg: float = 180.0, std_deg: float = 50.0):
        return cls(Carrier.MMWAVE, db_to_linear(loss_db),
                   GaussianPattern.normalized(math.radians(mean_deg), math.radians(std_deg)))

    @classmethod
    def sub6(cls, loss_db: float = -30.0):
        return cls(Carrier.SUB6, db_to_linear(loss_db), OmniPattern())


# -- deterministic link budget ---------------------------------------------

def pathloss_los(r, alpha: float = 2.0):
    """Distance path loss ``r**-alpha``; raises at r <= 0."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0.0):
        raise ParameterError("LoS path loss is singular at r <= 0")
    out = r_arr ** (-alpha)
    return out if out.ndim else float(out)


def blockage_mean(r, theta, grid_half_range: float, parent_density: float, mean_cluster_size: float):
    """Mean of K - 1, the number of extra buildings crossed by an NLoS link."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    mu = grid_half_range * parent_density * mean_cluster_size * r * (np.abs(np.cos(theta)) + np.abs(np.sin(theta)))
    return mu if mu.ndim else float(mu)


def blockage_loss(loss: float, k):
    if not 0.0 < loss < 1.0:
        raise ParameterError(f"penetration loss must lie in (0, 1), got {loss}")
    k_arr = np.asarray(k)
    if np.any(k_arr < 1) or np.any(k_arr != np.floor(k_arr)):
        raise ParameterError("building count K must be an integer >= 1")
    out = loss ** k_arr.astype(float)
    return out if out.ndim else float(out)


def received_power(tx_power: float, pattern: AntennaPattern, h, r0: float, alpha: float = 2.0,
                   theta0: Optional[float] = None):
    """Serving-link power; the link is boresight-aligned unless ``theta0`` is given."""
    if np.any(np.asarray(h) < 0):
        raise ParameterError("fading gain must be >= 0")
    g0 = pattern.peak_gain if theta0 is None else pattern.gain(theta0)
    return tx_power * g0 * h * pathloss_los(r0, alpha)


# -- random link draws -----------------------------------------------------

@dataclass(frozen=True)
class LinkDraw:
    fading: np.ndarray
    aoa: np.ndarray
    blockage_count: Optional[np.ndarray] = None


def draw_fading(rng: np.random.Generator, size=None):
    return rng.exponential(1.0, size)


def draw_aoa(rng: np.random.Generator, size=None):
    return rng.uniform(0.0, TWO_PI, size)


def draw_blockage_count(rng: np.random.Generator, mu):
    return 1 + rng.poisson(mu)


def draw_links(rng: np.random.Generator, r, nlos: bool, grid_half_range: float = 0.0,
               parent_density: float = 0.0, mean_cluster_size: float = 0.0) -> LinkDraw:
    """Draw fading and AoA (and building counts for NLoS) for links of lengths ``r``."""
    r = np.asarray(r, dtype=float)
    h = draw_fading(rng, r.shape)
    theta = draw_aoa(rng, r.shape)
    k = None
    if nlos:
        k = draw_blockage_count(rng, blockage_mean(r, theta, grid_half_range, parent_density, mean_cluster_size))
    return LinkDraw(h, theta, k)
