"""Hot numeric kernels, each in a numba flavour and a pure-numpy flavour.

The public names (``los_weight``, ``nlos_weight``, ``interference_sums``)
point at the numba kernels unless ``V2XCOV_DISABLE_NUMBA`` is set. Both
flavours are always importable so they can be benchmarked and cross-checked.

Conventions shared by all kernels:

* ``amp[j]`` is ``s * Pt * G(theta_j)``, the per-angle interference
  amplitude at unit path loss.
* ``tw[j]`` are angular quadrature weights that already include the uniform
  angle-of-arrival density, so ``tw.sum() == 1``.
* ``trig[j]`` is ``|cos theta_j| + |sin theta_j|``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, xlogy

from ._accel import USE_NUMBA, njit

# Above this Poisson mean exp(-mu) is subnormal and the linear recursion
# loses digits; switch to log-space terms.
_LINEAR_PMF_LIMIT = 700.0
_CHUNK = 32


def series_guard(mu: float) -> int:
    """Upper bound on the Poisson index reached by the blockage series."""
    return int(mu + 12.0 * math.sqrt(mu) + 30.0)


def wrap_angle(d):
    """Wrap angles into (-pi, pi]."""
    return np.pi - np.mod(np.pi - d, 2.0 * np.pi)


# --------------------------------------------------------------------------
# LoS angular-averaged interference weight
# --------------------------------------------------------------------------

@njit
def _los_weight_numba(r, amp, tw, alpha):
    n = r.shape[0]
    m = amp.shape[0]
    out = np.zeros(n)
    for i in range(n):
        d = r[i] ** alpha
        acc = 0.0
        for j in range(m):
            a = amp[j]
            if a > 0.0:
                acc += tw[j] * a / (a + d)
        out[i] = acc
    return out


def _los_weight_numpy(r, amp, tw, alpha):
    r = np.asarray(r, dtype=float)
    d = r[:, None] ** alpha
    a = amp[None, :]
    num = np.broadcast_to(a, (r.shape[0], a.shape[1]))
    frac = np.divide(num, a + d, out=np.zeros(num.shape), where=num > 0.0)
    return frac @ tw


# --------------------------------------------------------------------------
# NLoS angular-averaged interference weight (Poisson blockage series)
# --------------------------------------------------------------------------

@njit
def _nlos_weight_numba(r, amp, trig, tw, loss, mu_coef, mass_tol):
    """Returns (weights, status); status 0 ok, 1 if some series ran past its guard."""
    n = r.shape[0]
    m = amp.shape[0]
    out = np.zeros(n)
    status = 0
    target = 1.0 - mass_tol
    for i in range(n):
        acc_i = 0.0
        for j in range(m):
            c = amp[j]
            if c <= 0.0:
                continue
            mu = mu_coef * r[i] * trig[j]
            guard = int(mu + 12.0 * math.sqrt(mu) + 30.0)
            cum = 0.0
            acc = 0.0
            lk = loss
            done = False
            if mu < 700.0:
                p = math.exp(-mu)
                for k in range(guard + 1):
                    if k > 0:
                        p *= mu / k
                    cum += p
                    x = c * lk
                    acc += p * x / (1.0 + x)
                    if cum >= target:
                        done = True
                        break
                    lk *= loss
            else:
                logmu = math.log(mu)
                logp = -mu
                for k in range(guard + 1):
                    if k > 0:
                        logp += logmu - math.log(k)
                    p = math.exp(logp)
                    cum += p
                    x = c * lk
                    acc += p * x / (1.0 + x)
                    if cum >= target:
                        done = True
                        break
                    lk *= loss
            if not done:
                status = 1
            acc_i += tw[j] * acc
        out[i] = acc_i
    return out, status


def _nlos_weight_numpy(r, amp, trig, tw, loss, mu_coef, mass_tol):
    r = np.asarray(r, dtype=float)
    out = np.zeros(r.shape[0])
    status = 0
    if r.size == 0:
        return out, status
    live = amp > 0.0
    amp, trig, tw = amp[live], trig[live], tw[live]
    target = 1.0 - mass_tol
    for lo in range(0, r.shape[0], _CHUNK):
        rc = r[lo:lo + _CHUNK]
        mu = mu_coef * rc[:, None] * trig[None, :]
        kmax = series_guard(float(mu.max()))
        k = np.arange(kmax + 1, dtype=float)
        # pmf[i, j, k] = P(K - 1 = k) with mean mu[i, j]
        pmf = np.exp(xlogy(k, mu[..., None]) - mu[..., None] - gammaln(k + 1.0))
        cum = np.cumsum(pmf, axis=-1)
        take = np.ones_like(pmf, dtype=bool)
        take[..., 1:] = cum[..., :-1] < target
        # per-angle guards are tighter than kmax
        guards = np.floor(mu + 12.0 * np.sqrt(mu) + 30.0)
        take &= k[None, None, :] <= guards[..., None]
        reached = (cum >= target) & take
        if not reached.any(axis=-1).all():
            status = 1
        with np.errstate(under="ignore"):
            x = amp[:, None] * loss ** (k[None, :] + 1.0)
        g = x / (1.0 + x)
        series = np.where(take, pmf * g[None, :, :], 0.0).sum(axis=-1)
        out[lo:lo + _CHUNK] = series @ tw
    return out, status


# --------------------------------------------------------------------------
# Monte Carlo per-trial interference accumulation
# --------------------------------------------------------------------------

@njit
def _interference_sums_numba(trial, theta, fading, dist, kcount, nlos, n_trials,
                             alpha, loss, gaussian, mu, sigma, scale):
    i_los = np.zeros(n_trials)
    i_nlos = np.zeros(n_trials)
    two_pi = 2.0 * math.pi
    inv = 1.0 / (2.0 * sigma * sigma)
    for q in range(trial.shape[0]):
        if gaussian:
            d = math.pi - ((math.pi - (theta[q] - mu)) % two_pi)
            g = scale * math.exp(-d * d * inv)
        else:
            g = 1.0
        if nlos[q]:
            i_nlos[trial[q]] += g * fading[q] * loss ** kcount[q]
        else:
            i_los[trial[q]] += g * fading[q] * dist[q] ** (-alpha)
    return i_los, i_nlos


def _interference_sums_numpy(trial, theta, fading, dist, kcount, nlos, n_trials,
                             alpha, loss, gaussian, mu, sigma, scale):
    if gaussian:
        d = wrap_angle(theta - mu)
        g = scale * np.exp(-d * d / (2.0 * sigma * sigma))
    else:
        g = np.ones_like(theta)
    with np.errstate(under="ignore", divide="ignore"):
        atten = np.where(nlos, loss ** kcount.astype(float), np.where(nlos, 1.0, dist) ** (-alpha))
    p = g * fading * atten
    i_los = np.bincount(trial[~nlos], weights=p[~nlos], minlength=n_trials)
    i_nlos = np.bincount(trial[nlos], weights=p[nlos], minlength=n_trials)
    return i_los, i_nlos


if USE_NUMBA:
    los_weight = _los_weight_numba
    nlos_weight = _nlos_weight_numba
    interference_sums = _interference_sums_numba
else:
    los_weight = _los_weight_numpy
    nlos_weight = _nlos_weight_numpy
    interference_sums = _interference_sums_numpy

__all__ = ["los_weight", "nlos_weight", "interference_sums", "series_guard", "wrap_angle"]
