import math

import numpy as np
import pytest

from v2xcov import NlosRoadMode, ParameterError, ScenarioConfig, Thinning, VehicleModel
from v2xcov.geometry import (
    build_scene, ppp_batch, sample_ppp_1d, sample_road_grid, sample_thomas_1d, thinned_interferers,
    truncated_normal, truncated_normal_pdf,
)


def test_ppp_zero_density_is_empty(rng):
    for R in (0.1, 5.0, 100.0):
        assert sample_ppp_1d(0.0, R, rng).size == 0


def test_ppp_negative_density_rejected(rng):
    with pytest.raises(ParameterError):
        sample_ppp_1d(-0.1, 5.0, rng)


def test_ppp_count_mean_and_variance(rng):
    counts = np.array([sample_ppp_1d(0.5, 5.0, rng).size for _ in range(100_000)])
    assert abs(counts.mean() - 5.0) <= 0.05
    assert abs(counts.var() - 5.0) <= 0.2


def test_ppp_positions_uniform_and_centred(rng):
    _, pos = ppp_batch(20_000, 0.5, 5.0, rng)
    assert np.all(np.abs(pos) <= 5.0)
    assert abs(pos.mean()) < 3 * pos.std() / math.sqrt(pos.size)
    # uniform on [-5, 5]: variance 25/3
    assert pos.var() == pytest.approx(25 / 3, rel=0.02)


def test_thomas_empty_without_parents(rng):
    assert sample_thomas_1d(0.0, 5, 0.5, 5, 1, rng) == []


def test_thomas_rejects_bad_std(rng):
    with pytest.raises(ParameterError):
        sample_thomas_1d(0.5, 5, 0.0, 5, 1, rng)


def test_thomas_mean_daughters(rng):
    totals = np.array([sum(d.size for _, d in sample_thomas_1d(0.5, 5, 0.5, 5, 1, rng))
                       for _ in range(100_000)])
    assert abs(totals.mean() - 25.0) <= 0.5


def test_thomas_small_std_collapses_on_parent(rng):
    clusters = sample_thomas_1d(0.5, 5, 1e-9, 5, 1, rng)
    for _ in range(50):
        clusters += sample_thomas_1d(0.5, 5, 1e-9, 5, 1, rng)
    gaps = [np.max(np.abs(d - p)) for p, d in clusters if d.size]
    assert gaps and max(gaps) < 1e-6


def test_thomas_displacement_and_range(rng):
    for _ in range(200):
        for p, d in sample_thomas_1d(0.5, 5, 0.8, 5, 1, rng):
            assert np.all(np.abs(d - p) <= 1.0)
            assert np.all(np.abs(d) <= 5.0)


def test_truncated_normal_matches_pdf(rng):
    y = truncated_normal(rng, 0.8, 1.0, 200_000)
    assert np.all(np.abs(y) <= 1.0)
    hist, edges = np.histogram(y, bins=20, range=(-1, 1), density=True)
    mid = 0.5 * (edges[1:] + edges[:-1])
    np.testing.assert_allclose(hist, truncated_normal_pdf(mid, 0.8, 1.0), rtol=0.04)
    grid = np.linspace(-1, 1, 20_001)
    assert np.trapezoid(truncated_normal_pdf(grid, 0.8, 1.0), grid) == pytest.approx(1.0, abs=1e-8)


def test_fixed_zero_nlos_roads(rng):
    cfg = ScenarioConfig(nlos_road_mode=NlosRoadMode.FIXED, nlos_road_count=0)
    grid, veh = build_scene(cfg, VehicleModel.PCP, rng)
    assert grid.n_nlos == 0 and len(grid.roads) == 2
    assert all(r.los and r.offset == 0.0 for r in grid.los_roads)
    assert {r.axis for r in grid.los_roads} == {"x", "y"}
    assert np.all(veh.road < 2)


def test_fixed_nlos_count(rng):
    cfg = ScenarioConfig(nlos_road_mode=NlosRoadMode.FIXED, nlos_road_count=6)
    grid = sample_road_grid(cfg, rng)
    assert grid.n_nlos == 6
    assert all(abs(r.offset) <= cfg.grid_half_range for r in grid.nlos_roads)


def test_poisson_nlos_count_mean(rng, table2):
    n = np.array([sample_road_grid(table2, rng).n_nlos for _ in range(20_000)])
    assert abs(n.mean() - 8.0) < 3 * math.sqrt(8.0 / n.size)


@pytest.mark.parametrize("model", list(VehicleModel))
def test_all_interferers_when_pi_one(rng, model):
    cfg = ScenarioConfig(interference_prob=1.0)
    for _ in range(20):
        _, veh = build_scene(cfg, model, rng)
        assert np.all(veh.interferer)


@pytest.mark.parametrize("model", list(VehicleModel))
def test_scene_invariants(rng, table2, model):
    for _ in range(100):
        grid, veh = build_scene(table2, model, rng)
        assert np.all(np.abs(veh.position) <= table2.grid_half_range)
        assert np.all(veh.road < len(grid.roads))
        if model is VehicleModel.PCP:
            assert np.all(np.abs(veh.position - veh.parent) <= table2.cluster_half_range)
            # cluster activation: one mark per cluster
            for c in np.unique(veh.cluster):
                assert np.unique(veh.interferer[veh.cluster == c]).size == 1
        else:
            assert np.all(veh.cluster == -1)


def test_pcp_interferers_per_los_road(table2):
    rng = np.random.default_rng(7)
    total = 0
    n_scenes = 100_000
    for _ in range(n_scenes):
        _, veh = build_scene(table2, VehicleModel.PCP, rng)
        total += np.count_nonzero(veh.interferer & veh.on_los())
    assert abs(total / (2 * n_scenes) - 7.5) <= 0.2


@pytest.mark.parametrize("thinning", list(Thinning))
def test_interferer_fraction(thinning):
    rng = np.random.default_rng(3)
    cfg = ScenarioConfig(thinning=thinning)
    marks = np.concatenate([build_scene(cfg, VehicleModel.PCP, rng)[1].interferer for _ in range(3000)])
    assert marks.mean() == pytest.approx(0.3, abs=0.02)


def test_thinned_ppp_is_ppp(table2):
    # P_I-thinned PPP(lambda) on [-R, R]: counts Poisson with mean 2 R P_I lambda = 7.5
    rng = np.random.default_rng(11)
    road, _ = thinned_interferers(table2, VehicleModel.PPP, 20_000, rng)
    counts = np.bincount(road, minlength=20_000)
    assert counts.mean() == pytest.approx(7.5, abs=4 * math.sqrt(7.5 / 20_000))
    assert counts.var() == pytest.approx(7.5, rel=0.05)


def test_scene_thinning_matches_direct_sampler(table2):
    rng = np.random.default_rng(12)
    n = 20_000
    scene = []
    for _ in range(n):
        _, veh = build_scene(table2, VehicleModel.PPP, rng)
        scene.append(np.count_nonzero(veh.interferer & (veh.road == 0)))
    scene = np.array(scene)
    assert scene.mean() == pytest.approx(7.5, abs=4 * math.sqrt(7.5 / n))
    assert scene.var() == pytest.approx(7.5, rel=0.06)


@pytest.mark.parametrize("thinning", list(Thinning))
def test_thinned_pcp_counts(table2, thinning):
    rng = np.random.default_rng(5)
    cfg = table2.replace(thinning=thinning)
    road, pos = thinned_interferers(cfg, VehicleModel.PCP, 20_000, rng)
    counts = np.bincount(road, minlength=20_000)
    assert counts.mean() == pytest.approx(7.5, abs=0.15)
    assert np.all(np.abs(pos) <= 5.0)


def test_matched_density_equal_counts(table2):
    rng = np.random.default_rng(9)
    n = 20_000
    ppp = ppp_batch(n, table2.effective_vehicle_density, 5.0, rng)[0].size / n
    pcp = thinned_interferers(table2.replace(interference_prob=1.0), VehicleModel.PCP, n, rng)[0].size / n
    assert ppp == pytest.approx(25.0, abs=0.15)
    # cluster count variance is 2R lp E[c^2] = 150 per road
    assert pcp == pytest.approx(ppp, abs=4 * math.sqrt((150 + 25) / n))


@pytest.mark.parametrize("model", list(VehicleModel))
def test_scene_determinism(table2, model):
    a = build_scene(table2, model, np.random.default_rng(42))
    b = build_scene(table2, model, np.random.default_rng(42))
    assert a[0] == b[0]
    for f in ("road", "position", "interferer", "cluster"):
        np.testing.assert_array_equal(getattr(a[1], f), getattr(b[1], f))
