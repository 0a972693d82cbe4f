"""Coverage probability from per-road Laplace transforms of the interference.

With Rayleigh fading on the serving link, P(SINR > T) factors into the noise
term exp(-s sigma^2) and one Laplace transform per road, evaluated at
s = T / (Pt G(theta0) r0^-alpha). Each transform is the probability
generating functional of the interferer process applied to the per-vehicle
kernel E_h[exp(-s Pt G h loss)] = 1 / (1 + s Pt G loss).

Integrands are written in terms of the *interference weight*
``w(r) = E_theta[1 - kernel]`` so that nothing is computed as ``1 - (1 - eps)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import ndtr

from . import kernels
from .config import NlosRoadMode, RoadCase, ScenarioConfig, Thinning, VehicleModel
from .errors import NumericalError, ParameterError
from .quadrature import QuadratureSpec, angular_rule, integrate

SQRT2 = math.sqrt(2.0)


def laplace_s(threshold: float, tx_power: float, g0: float, r0: float, alpha: float = 2.0) -> float:
    """Laplace argument s = T / (Pt * G0 * r0**-alpha)."""
    if tx_power <= 0 or g0 <= 0 or r0 <= 0:
        raise ParameterError("tx_power, g0 and r0 must be > 0")
    if threshold < 0:
        raise ParameterError("threshold must be >= 0")
    return threshold / (tx_power * g0 * r0 ** (-alpha))


def scenario_s(config: ScenarioConfig) -> float:
    return laplace_s(config.threshold, config.tx_power, config.profile.antenna.peak_gain,
                     config.serving_distance, config.pathloss_exponent)


# -- interference weights w(r) --------------------------------------------------

def _angular(s: float, config: ScenarioConfig, quad: QuadratureSpec):
    theta, tw = angular_rule(quad.angular_nodes)
    amp = s * config.tx_power * np.asarray(config.profile.antenna.gain(theta), dtype=float)
    return theta, np.ascontiguousarray(tw), np.ascontiguousarray(amp)


def los_weight_fn(s: float, config: ScenarioConfig, quad: QuadratureSpec) -> Callable[[np.ndarray], np.ndarray]:
    """w(r) = E_theta[a / (a + r^alpha)] with a = s Pt G(theta)."""
    _, tw, amp = _angular(s, config, quad)
    alpha = float(config.pathloss_exponent)

    def w(r):
        return kernels.los_weight(np.ascontiguousarray(r, dtype=float), amp, tw, alpha)

    # w falls from ~1 to ~0 around r = amp**(1/alpha); at small s that is a spike
    # far narrower than one quadrature panel, so the integrators split there
    w.scale = float(amp.max()) ** (1.0 / alpha) if amp.size else 0.0
    return w


def nlos_weight_fn(s: float, config: ScenarioConfig, quad: QuadratureSpec) -> Callable[[np.ndarray], np.ndarray]:
    """w(r) = E_theta E_K[b L^K / (1 + b L^K)], K - 1 ~ Poisson(mu(r, theta))."""
    theta, tw, amp = _angular(s, config, quad)
    trig = np.ascontiguousarray(np.abs(np.cos(theta)) + np.abs(np.sin(theta)))
    loss = float(config.profile.penetration_loss)
    coef = float(config.blockage_coef)
    tol = float(quad.poisson_series_mass_tol)

    def w(r):
        r = np.ascontiguousarray(r, dtype=float)
        if r.size == 0:
            return np.zeros(0)
        mu_max = coef * float(r.max()) * SQRT2
        if kernels.series_guard(mu_max) > quad.max_series_terms:
            raise NumericalError(f"blockage series: Poisson mean {mu_max:.4g} needs more than "
                                 f"max_series_terms={quad.max_series_terms} terms")
        out, status = kernels.nlos_weight(r, amp, trig, tw, loss, coef, tol)
        if status:
            raise NumericalError(f"blockage series did not reach mass 1 - {tol:g} within its guard "
                                 f"(Poisson mean up to {mu_max:.4g})")
        return out

    return w


# -- PGFL evaluations -----------------------------------------------------------

def _scale_points(weight, upper: float):
    """Breakpoints at 1, 10, 100 and 1000 times the weight's transition radius."""
    scale = getattr(weight, "scale", 0.0)
    return tuple(scale * 10.0 ** k for k in range(4) if 0.0 < scale * 10.0 ** k < upper)


def _ppp_exponent(weight, config: ScenarioConfig, intensity: float, quad: QuadratureSpec):
    """intensity * int_{-R}^{R} w(|x|) dx, with its error estimate."""
    res = integrate(lambda x: weight(np.abs(x)), 0.0, config.grid_half_range, quad,
                    breakpoints=_scale_points(weight, config.grid_half_range))
    return 2.0 * intensity * res.value, 2.0 * intensity * res.error


def _pcp_exponent(weight, config: ScenarioConfig, quad: QuadratureSpec):
    """lam * int_{-R}^{R} [1 - M(1 - u(x))] dx with u(x) = int f(y) w(|x + y|) dy.

    M(z) = exp(-cbar (1 - z)) is the Poisson cluster-size PGF, so
    1 - M(1 - u) = -expm1(-cbar u).
    """
    R, rc, sd = config.grid_half_range, config.cluster_half_range, config.cluster_stddev
    p_i = config.interference_prob
    if config.thinning is Thinning.CLUSTER:
        lam, cbar = p_i * config.parent_density, config.mean_cluster_size
    else:
        lam, cbar = config.parent_density, p_i * config.mean_cluster_size
    if lam == 0.0 or cbar == 0.0:
        return 0.0, 0.0
    norm = 1.0 / (sd * math.sqrt(2.0 * math.pi) * (ndtr(rc / sd) - ndtr(-rc / sd)))
    inner = quad.tighter()
    worst_inner = [0.0]
    offsets = _scale_points(weight, 2.0 * rc)
    offsets = (0.0,) + offsets + tuple(-d for d in offsets)

    def outer(xs):
        out = np.empty_like(xs)
        for i, x in enumerate(xs):
            res = integrate(lambda y: norm * np.exp(-0.5 * (y / sd) ** 2) * weight(np.abs(x + y)),
                            -rc, rc, inner, breakpoints=tuple(d - x for d in offsets))
            out[i] = -math.expm1(-cbar * res.value)
            worst_inner[0] = max(worst_inner[0], res.error)
        return out

    # u(x) is even; its smoothness drops at x = Rc where the offset window edge meets r = 0
    res = integrate(outer, 0.0, R, quad, breakpoints=(rc,))
    # d/du [1 - exp(-cbar u)] <= cbar bounds how inner errors reach the outer integral
    err = res.error + cbar * worst_inner[0] * R
    return 2.0 * lam * res.value, 2.0 * lam * err


def _check_s(s):
    if not s >= 0:
        raise ParameterError(f"Laplace argument must be >= 0, got {s}")


def _finish(exponent, err, full_output):
    value = math.exp(-exponent)
    if full_output:
        return value, value * err
    return value


def laplace_los_ppp(s: float, config: ScenarioConfig, quad: QuadratureSpec = QuadratureSpec(),
                    full_output: bool = False):
    """Laplace transform of one LoS road's interference when vehicles form a PPP.

    With ``full_output`` returns ``(value, error_estimate)``.
    """
    _check_s(s)
    lam = config.interference_prob * config.effective_vehicle_density
    if s == 0.0 or lam == 0.0:
        return _finish(0.0, 0.0, full_output)
    return _finish(*_ppp_exponent(los_weight_fn(s, config, quad), config, lam, quad), full_output)


def laplace_los_pcp(s: float, config: ScenarioConfig, quad: QuadratureSpec = QuadratureSpec(),
                    full_output: bool = False):
    """Laplace transform of one LoS road's interference for Thomas-clustered vehicles."""
    _check_s(s)
    if s == 0.0:
        return _finish(0.0, 0.0, full_output)
    return _finish(*_pcp_exponent(los_weight_fn(s, config, quad), config, quad), full_output)


def laplace_nlos(s: float, config: ScenarioConfig, vehicle_model: VehicleModel = VehicleModel.PCP,
                 quad: QuadratureSpec = QuadratureSpec(), full_output: bool = False):
    """Laplace transform of one NLoS road's interference under the blockage loss L**K."""
    _check_s(s)
    vehicle_model = VehicleModel(vehicle_model)
    if s == 0.0:
        return _finish(0.0, 0.0, full_output)
    weight = nlos_weight_fn(s, config, quad)
    if vehicle_model is VehicleModel.PPP:
        lam = config.interference_prob * config.effective_vehicle_density
        if lam == 0.0:
            return _finish(0.0, 0.0, full_output)
        return _finish(*_ppp_exponent(weight, config, lam, quad), full_output)
    return _finish(*_pcp_exponent(weight, config, quad), full_output)


@lru_cache(maxsize=4096)
def _cached_factor(kind: str, model: VehicleModel, s: float, config: ScenarioConfig, quad: QuadratureSpec):
    if kind == "los":
        fn = laplace_los_ppp if model is VehicleModel.PPP else laplace_los_pcp
        return fn(s, config, quad, full_output=True)
    return laplace_nlos(s, config, model, quad, full_output=True)


# -- coverage -------------------------------------------------------------------

@dataclass(frozen=True)
class CoverageResult:
    """Coverage probability and its factors; ``error`` is an absolute estimate on p_cov."""

    p_cov: float
    noise_factor: float
    los_factor: float
    nlos_factor: float
    error: float
    s: float

    @property
    def p_out(self) -> float:
        return 1.0 - self.p_cov


def coverage(config: ScenarioConfig, vehicle_model: VehicleModel = VehicleModel.PCP,
             road_case: RoadCase = RoadCase.BOTH, quad: QuadratureSpec = QuadratureSpec()) -> CoverageResult:
    vehicle_model = VehicleModel(vehicle_model)
    road_case = RoadCase(road_case)
    s = scenario_s(config)
    noise = math.exp(-s * config.noise_power)
    rel_err = 0.0

    los = 1.0
    if road_case.has_los:
        f, e = _cached_factor("los", vehicle_model, s, config, quad)
        los = f ** config.n_los
        rel_err += config.n_los * e / f if f > 0 else math.inf

    nlos = 1.0
    if road_case.has_nlos:
        if config.nlos_road_mode is NlosRoadMode.FIXED:
            n = int(config.nlos_road_count)
            if n:
                f, e = _cached_factor("nlos", vehicle_model, s, config, quad)
                nlos = f ** n
                rel_err += n * e / f if f > 0 else math.inf
        else:
            lam = config.nlos_road_mean
            if lam:
                f, e = _cached_factor("nlos", vehicle_model, s, config, quad)
                # Poisson PGF over the random number of NLoS roads
                nlos = math.exp(-lam * (1.0 - f))
                rel_err += lam * e

    p_cov = noise * los * nlos
    return CoverageResult(p_cov, noise, los, nlos, p_cov * rel_err, s)


def clear_cache() -> None:
    _cached_factor.cache_clear()
