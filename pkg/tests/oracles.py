"""Independent brute-force evaluations used as test oracles.

Nothing here imports the analytic module, the kernels or the quadrature code;
patterns, truncated densities and integrals are rebuilt from scratch with
fixed midpoint grids.
"""
import math

import numpy as np


def pattern_gain(theta, frequency):
    if frequency == "sub6":
        return np.ones_like(theta)
    sd = math.radians(50.0)
    d = np.angle(np.exp(1j * (theta - math.pi)))
    shape = np.exp(-0.5 * (d / sd) ** 2)
    # normalize numerically so the pattern integrates to 2 pi
    t = (np.arange(200_000) + 0.5) * (2 * math.pi / 200_000)
    dt = np.angle(np.exp(1j * (t - math.pi)))
    mass = np.exp(-0.5 * (dt / sd) ** 2).mean() * 2 * math.pi
    return shape * (2 * math.pi / mass)


def midpoints(a, b, n):
    h = (b - a) / n
    return a + h * (np.arange(n) + 0.5), h


def angular_average_los(r, amp_theta, alpha=2.0):
    """mean over theta of 1 - 1/(1 + a(theta) r^-alpha), for any array r."""
    out = np.zeros_like(r)
    with np.errstate(divide="ignore"):
        for a in amp_theta:
            out += a / (a + r ** alpha)
    return out / len(amp_theta)


def riemann_los_ppp(s, pt, frequency, p_i, lam_v, R, nx=10_000, nt=1_000):
    theta, _ = midpoints(0.0, 2 * math.pi, nt)
    amp = s * pt * pattern_gain(theta, frequency)
    x, hx = midpoints(-R, R, nx)
    inner = angular_average_los(np.abs(x), amp)
    return math.exp(-p_i * lam_v * inner.sum() * hx)


def riemann_los_pcp(s, pt, frequency, p_i, lam_p, cbar, sd, R, Rc, nx=1_000, ny=400, nt=360):
    theta, _ = midpoints(0.0, 2 * math.pi, nt)
    amp = s * pt * pattern_gain(theta, frequency)
    x, hx = midpoints(-R, R, nx)
    y, hy = midpoints(-Rc, Rc, ny)
    mass = math.erf(Rc / (sd * math.sqrt(2.0)))
    f = np.exp(-0.5 * (y / sd) ** 2) / (sd * math.sqrt(2 * math.pi) * mass)
    r = np.abs(x[:, None] + y[None, :])
    u = angular_average_los(r, amp) @ f * hy
    return math.exp(-p_i * lam_p * np.sum(1.0 - np.exp(-cbar * u)) * hx)
