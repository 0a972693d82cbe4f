#!/usr/bin/env python
"""Compare the numba kernels with their numpy fallbacks.

Kernel timings run in-process (both flavours are always importable). The
end-to-end timings spawn a subprocess per backend so that the
V2XCOV_DISABLE_NUMBA switch is honoured at import time.

    python benchmarks/bench_kernels.py [--repeat 5] [--skip-e2e]
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from v2xcov import kernels
from v2xcov.analytic import _angular, scenario_s
from v2xcov.config import ScenarioConfig
from v2xcov.quadrature import QuadratureSpec

E2E_SNIPPET = """
import time
from v2xcov import ScenarioConfig, coverage
from v2xcov.analytic import clear_cache
from v2xcov.montecarlo import estimate_coverage
from v2xcov._accel import backend_name
c = ScenarioConfig()
coverage(c, 'PCP', 'Both'); clear_cache()
estimate_coverage(c, 'PCP', 'Both', 1000)
t = time.perf_counter(); coverage(c, 'PCP', 'Both'); a = time.perf_counter() - t
t = time.perf_counter(); estimate_coverage(c, 'PCP', 'Both', 50000); m = time.perf_counter() - t
print(f"{backend_name():6s} analytic PCP/Both {a:7.3f} s   MC 5e4 trials {m:7.3f} s")
"""


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_table(repeat):
    config = ScenarioConfig()
    quad = QuadratureSpec()
    theta, tw, amp = _angular(scenario_s(config), config, quad)
    trig = np.ascontiguousarray(np.abs(np.cos(theta)) + np.abs(np.sin(theta)))
    r = np.linspace(0.0, 6.0, 2000)
    loss, coef, tol = config.profile.penetration_loss, config.blockage_coef, quad.poisson_series_mass_tol

    rng = np.random.default_rng(0)
    n, n_trials = 500_000, 8192
    trial = np.sort(rng.integers(0, n_trials, n))
    th = rng.uniform(0, 2 * np.pi, n)
    h = rng.exponential(size=n)
    dist = rng.uniform(0.01, 5, n)
    nlos = rng.random(n) < 0.8
    kc = 1 + rng.poisson(20, n)
    pat = config.profile.antenna
    mc_args = (trial, th, h, dist, kc, nlos, n_trials, 2.0, loss, True, pat.mean, pat.std, pat.scale)

    cases = [
        ("los_weight (2000 r)", kernels._los_weight_numba, kernels._los_weight_numpy, (r, amp, tw, 2.0)),
        ("nlos_weight (2000 r)", kernels._nlos_weight_numba, kernels._nlos_weight_numpy,
         (r, amp, trig, tw, loss, coef, tol)),
        ("interference_sums (5e5 links)", kernels._interference_sums_numba, kernels._interference_sums_numpy,
         mc_args),
    ]
    print(f"{'kernel':32s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for name, fast, slow, args in cases:
        fast(*args)  # compile / load cache
        a = fast(*args)
        b = slow(*args)
        a0 = a[0] if isinstance(a, tuple) else a
        b0 = b[0] if isinstance(b, tuple) else b
        assert np.allclose(a0, b0, rtol=1e-10, atol=1e-300), name
        tf, ts = _best(lambda: fast(*args), repeat), _best(lambda: slow(*args), repeat)
        print(f"{name:32s} {tf * 1e3:8.2f}ms {ts * 1e3:8.2f}ms {ts / tf:7.1f}x")


def e2e():
    for flag in ("0", "1"):
        env = dict(os.environ, V2XCOV_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", E2E_SNIPPET], env=env, capture_output=True, text=True)
        sys.stdout.write(out.stdout or out.stderr)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-e2e", action="store_true")
    args = ap.parse_args()
    kernel_table(args.repeat)
    if not args.skip_e2e:
        e2e()
