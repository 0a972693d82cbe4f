"""End-to-end acceptance checks; each test prints one PASS/FAIL line."""
import math
import subprocess
import sys

import numpy as np
import pytest
from scipy.integrate import quad as scipy_quad

from oracles import riemann_los_pcp, riemann_los_ppp
from v2xcov import (
    GaussianPattern, OmniPattern, QuadratureSpec, ScenarioConfig, Thinning, VehicleModel, coverage,
    laplace_los_pcp, laplace_los_ppp, laplace_nlos,
)
from v2xcov.analytic import scenario_s
from v2xcov.harness.sweep import PRESETS, Series, SweepSpec, run_sweep
from v2xcov.harness.validate import oracle_grid
from v2xcov.montecarlo import difference_z, estimate_coverage

Z99_ONE_SIDED = 2.326


@pytest.fixture
def report(capsys):
    def emit(n, title, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {n}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
        assert ok, detail
    return emit


def test_1_oracle_agreement(report):
    cells = oracle_grid(ScenarioConfig(), trials=100_000, seed=2024)
    assert len(cells) == 36
    wilson = sum(c.agrees for c in cells)
    wald = sum(c.agrees_wald for c in cells)
    misses = [c.label() for c in cells if not c.agrees]
    report(1, "analytic inside MC 99% CI at 1e5 trials", wilson >= 33,
           f"{wilson}/36 cells (Wilson), {wald}/36 (Wald); misses: {misses or 'none'}")


def test_2_normalization(report):
    worst = 0.0
    for freq in ("mmwave", "sub6"):
        for thinning in Thinning:
            cfg = ScenarioConfig(frequency=freq, thinning=thinning)
            for v in (laplace_los_ppp(0.0, cfg), laplace_los_pcp(0.0, cfg),
                      laplace_nlos(0.0, cfg, "PPP"), laplace_nlos(0.0, cfg, "PCP")):
                worst = max(worst, abs(v - 1.0))
    gains = []
    for pattern in (OmniPattern(), GaussianPattern.normalized()):
        total, _ = scipy_quad(lambda t: float(pattern.gain(t)), 0.0, 2 * math.pi,
                              points=[pattern.boresight], epsabs=0, epsrel=1e-12, limit=200)
        gains.append(abs(total / (2 * math.pi) - 1.0))
    report(2, "Laplace factors at s=0 and pattern normalization", worst <= 1e-12 and max(gains) <= 1e-6,
           f"max |L(0)-1| = {worst:.1e}, max pattern rel. error = {max(gains):.1e}")


def _violations(curve):
    bad = []
    for sid in curve.series_ids():
        pts = curve.series(sid)
        for a, b in zip(pts, pts[1:]):
            if b.p_out_analytic < a.p_out_analytic - (a.analytic_error + b.analytic_error):
                bad.append(f"{sid}@{b.value:g}")
    return bad


def test_3_monotonicity(report):
    config5, sweep5 = PRESETS["fig5"]()
    config4, sweep4 = PRESETS["fig4"]()
    series = tuple(Series(m, f, "Both") for m in VehicleModel for f in ("mmwave", "sub6"))
    cbar = SweepSpec("c_bar", (1.0, 2.0, 3.0, 5.0, 7.5, 10.0), series)
    curves = {"T": run_sweep(config5, sweep5), "r0": run_sweep(config4, sweep4),
              "c_bar": run_sweep(config4, cbar)}
    bad = {k: _violations(c) for k, c in curves.items()}
    n_pts = sum(len(c.points) for c in curves.values())
    report(3, "p_out nondecreasing in T, r0 and c_bar", not any(bad.values()),
           f"{n_pts} points checked, violations: {bad}")


def test_4_orderings(report):
    base = ScenarioConfig()
    seed = np.random.SeedSequence(4242)
    cache = {}

    def both(freq, model, case):
        key = (freq, model, case)
        if key not in cache:
            cfg = base.replace(frequency=freq)
            est = estimate_coverage(cfg, model, case, 100_000, seed=seed.spawn(1)[0])
            cache[key] = (coverage(cfg, model, case), est)
        return cache[key]

    claims = []
    for freq in ("mmwave", "sub6"):
        for case in ("Both", "OnlyLoS"):
            claims.append((f"PCP<=PPP {freq}/{case}", (freq, "PCP", case), (freq, "PPP", case)))
    for model in ("PCP", "PPP"):
        claims.append((f"mmwave<=sub6 {model}/Both", ("mmwave", model, "Both"), ("sub6", model, "Both")))
    for model in ("PCP", "PPP"):
        for freq in ("mmwave", "sub6"):
            claims.append((f"OnlyNLoS<=OnlyLoS {model}/{freq}", (freq, model, "OnlyNLoS"), (freq, model, "OnlyLoS")))
    lines, ok = [], True
    for name, lo_key, hi_key in claims:
        (a_lo, m_lo), (a_hi, m_hi) = both(*lo_key), both(*hi_key)
        z = difference_z(m_lo, m_hi)
        good = a_lo.p_out <= a_hi.p_out and z > Z99_ONE_SIDED
        ok &= good
        lines.append(f"{name} analytic {a_lo.p_out:.4g}<={a_hi.p_out:.4g} MC z={z:.1f}{'' if good else ' FAIL'}")
    report(4, "orderings (analytic and MC, 99% one-sided)", ok, "; ".join(lines))


def test_5_trivial_limits(report):
    # p_out vanishes at T = 0 and decays like sqrt(T) on the way there
    ts = [10.0 ** -k for k in range(2, 15, 2)]
    t_ok, worst_t = True, 0.0
    for f in ("mmwave", "sub6"):
        for m in VehicleModel:
            at_zero = coverage(ScenarioConfig(frequency=f, threshold=0.0), m).p_out
            seq = [coverage(ScenarioConfig(frequency=f, threshold=t), m).p_out for t in ts]
            t_ok &= at_zero == 0.0 and all(b < a for a, b in zip(seq, seq[1:]))
            t_ok &= seq[-1] / seq[-2] == pytest.approx(0.1, rel=0.01)
            worst_t = max(worst_t, seq[-1])
    empty = ScenarioConfig(parent_density=0.0, vehicle_density=0.0)
    worst_n = max(abs(r.p_cov - math.exp(-r.s * empty.noise_power))
                  for r in (coverage(empty.replace(frequency=f), m, "Both")
                            for f in ("mmwave", "sub6") for m in VehicleModel))
    tol = QuadratureSpec().poisson_series_mass_tol
    worst_l = 0.0
    for m in VehicleModel:
        cfg = ScenarioConfig(mmwave_loss=1e-300)
        worst_l = max(worst_l, abs(laplace_nlos(scenario_s(cfg), cfg, m) - 1.0))
    ok = t_ok and worst_t < 1e-6 and worst_n <= 1e-12 and worst_l <= tol
    report(5, "trivial limits", ok,
           f"p_out(0)=0, p_out(1e-14) <= {worst_t:.1e} with sqrt(T) decay; zero density |p-exp(-s s2)| {worst_n:.1e}; L->0 |NLoS-1| {worst_l:.1e}")


SPOTS = [
    ("Pt=1 omni s=0.4", dict(frequency="sub6", tx_power=1.0), 0.4),
    ("Pt=1 mmwave s=0.4 sigma_c=0.8", dict(frequency="mmwave", tx_power=1.0, cluster_stddev=0.8), 0.4),
    ("defaults mmwave r0=2", dict(frequency="mmwave", serving_distance=2.0), None),
]


def test_6_riemann_oracle(report):
    diffs = []
    for name, over, s in SPOTS:
        cfg = ScenarioConfig(**over)
        s = scenario_s(cfg) if s is None else s
        ppp = riemann_los_ppp(s, cfg.tx_power, cfg.frequency.value, cfg.interference_prob,
                              cfg.effective_vehicle_density, cfg.grid_half_range)
        pcp = riemann_los_pcp(s, cfg.tx_power, cfg.frequency.value, cfg.interference_prob, cfg.parent_density,
                              cfg.mean_cluster_size, cfg.cluster_stddev, cfg.grid_half_range,
                              cfg.cluster_half_range)
        diffs.append((name, abs(laplace_los_ppp(s, cfg) - ppp), abs(laplace_los_pcp(s, cfg) - pcp)))
    worst = max(max(d[1], d[2]) for d in diffs)
    report(6, "quadrature vs fixed-grid Riemann oracle", worst < 1e-3,
           "; ".join(f"{n}: PPP {a:.1e}, PCP {b:.1e}" for n, a, b in diffs))


def test_7_determinism(report, tmp_path):
    cfg = tmp_path / "det.cfg"
    cfg.write_text("sweep_values: 0.5, 1, 1.5\nseries: PCP/mmwave/Both, PPP/sub6/Both\n")
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.csv"
        subprocess.run([sys.executable, "-m", "v2xcov", "sweep", str(cfg), "--mc-trials", "5000",
                        "--seed", "77", "--out-csv", str(path)], check=True, capture_output=True)
        outs.append(path.read_bytes())
    report(7, "identical seed gives byte-identical CSV", outs[0] == outs[1] and len(outs[0]) > 100,
           f"{len(outs[0])} bytes, identical={outs[0] == outs[1]}")
