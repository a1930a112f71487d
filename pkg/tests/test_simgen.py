import math
from collections import defaultdict

import numpy as np
import pytest

from bvdbench.herdgraph import local_density
from bvdbench.simgen import (
    CovariateParams,
    GraphParams,
    HerdYearRecord,
    SimConfig,
    config_from_dict,
    config_to_dict,
    latent_mean,
    panel_to_dataset,
    simulate_panel,
)


def record(**overrides):
    base = dict(
        herd_id=0, year=4, x1=0, x2=0, x3=0, x4=0, x5=0.0, x6=0.0, x7=0,
        x8=0.0, z=0.0, status=0,
    )
    base.update(overrides)
    return HerdYearRecord(**base)


ZERO_BETAS = (0.0,) * 10


class TestLatentMean:
    def test_all_zero(self):
        assert latent_mean(record(), ZERO_BETAS, 0.0, 0.0) == 0.0

    def test_sine_vanishes_at_pi(self):
        betas = (0.0,) * 8 + (1.0, 0.0)
        assert latent_mean(record(x5=1.0, x6=1.0), betas, 0.0, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_sine_peak(self):
        betas = (0.0,) * 8 + (1.0, 0.0)
        assert latent_mean(record(x5=0.5, x6=1.0), betas, 0.0, 0.0) == pytest.approx(1.0)

    def test_quadratic_uses_midrange(self):
        betas = (0.0,) * 9 + (2.0,)
        # x8 = 0.8, midrange (0.2 + 0.6)/2 = 0.4 -> 2 * 0.16
        assert latent_mean(record(x8=0.8), betas, 0.2, 0.6) == pytest.approx(0.32)

    def test_linear_in_betas(self):
        rng = np.random.default_rng(0)
        betas = tuple(rng.normal(size=10))
        doubled = tuple(2 * b for b in betas)
        r = record(x1=1, x2=0, x3=1, x4=3, x5=0.7, x6=1.3, x7=55, x8=0.25)
        mu = latent_mean(r, betas, 0.1, 0.4)
        assert latent_mean(r, doubled, 0.1, 0.4) == pytest.approx(2 * mu, rel=1e-12)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            latent_mean(record(x5=float("nan")), ZERO_BETAS, 0.0, 0.0)
        with pytest.raises(ValueError, match="finite"):
            latent_mean(record(), ZERO_BETAS, float("inf"), 0.0)

    def test_beta_count_enforced(self):
        with pytest.raises(ValueError, match="10"):
            latent_mean(record(), (0.0,) * 9, 0.0, 0.0)


class TestSimConfig:
    def test_rejects_short_horizon(self):
        with pytest.raises(ValueError, match="n_years"):
            SimConfig(n_herds=10, n_years=3)

    def test_rejects_bad_prevalence(self):
        with pytest.raises(ValueError, match="target_prevalence"):
            SimConfig(n_herds=10, target_prevalence=0.0)

    def test_rejects_nonpositive_distribution_params(self):
        with pytest.raises(ValueError, match="strictly positive"):
            CovariateParams(import_rate=0.0)

    def test_round_trips_through_dict(self):
        cfg = SimConfig(n_herds=50, n_years=5, target_prevalence=0.2, seed=9)
        again = config_from_dict(config_to_dict(cfg))
        assert again == cfg


class TestSimulatePanel:
    def test_exact_prevalence_balanced(self):
        cfg = SimConfig(n_herds=800, n_years=4, target_prevalence=0.5, seed=0)
        ds = panel_to_dataset(simulate_panel(cfg))
        assert ds.labels.sum() == 400

    def test_exact_prevalence_rare(self):
        cfg = SimConfig(n_herds=800, n_years=4, target_prevalence=0.01, seed=1)
        ds = panel_to_dataset(simulate_panel(cfg))
        assert ds.labels.sum() == 8  # ceil(800 * 0.01)

    def test_prevalence_every_emitted_year(self):
        cfg = SimConfig(n_herds=120, n_years=7, target_prevalence=0.25, seed=2)
        panel = simulate_panel(cfg)
        per_year = defaultdict(int)
        counts = defaultdict(int)
        for r in panel.records:
            per_year[r.year] += r.status
            counts[r.year] += 1
        assert set(per_year) == {4, 5, 6, 7}
        assert all(v == 30 for v in per_year.values())
        assert all(v == 120 for v in counts.values())

    def test_determinism(self):
        cfg = SimConfig(n_herds=200, n_years=5, target_prevalence=0.1, seed=42)
        assert simulate_panel(cfg) == simulate_panel(cfg)

    def test_different_seeds_differ(self):
        a = simulate_panel(SimConfig(n_herds=200, n_years=4, target_prevalence=0.1, seed=1))
        b = simulate_panel(SimConfig(n_herds=200, n_years=4, target_prevalence=0.1, seed=2))
        assert a != b

    def test_lag_consistency(self):
        cfg = SimConfig(n_herds=60, n_years=8, target_prevalence=0.3, seed=3)
        panel = simulate_panel(cfg)
        status = {(r.herd_id, r.year): r.status for r in panel.records}
        for r in panel.records:
            if (r.herd_id, r.year - 1) in status:
                assert r.x1 == status[(r.herd_id, r.year - 1)]
            if (r.herd_id, r.year - 2) in status:
                assert r.x2 == status[(r.herd_id, r.year - 2)]
            if (r.herd_id, r.year - 3) in status:
                assert r.x3 == status[(r.herd_id, r.year - 3)]

    def test_x8_matches_local_density_of_prior_statuses(self):
        cfg = SimConfig(n_herds=80, n_years=5, target_prevalence=0.2, seed=4)
        panel = simulate_panel(cfg)
        by_year = defaultdict(dict)
        for r in panel.records:
            by_year[r.year][r.herd_id] = r
        prior = np.array([by_year[4][i].status for i in range(80)])
        expected = local_density(panel.graph, prior)
        got = np.array([by_year[5][i].x8 for i in range(80)])
        np.testing.assert_allclose(got, expected, atol=1e-12)

    def test_covariate_ranges(self):
        cfg = SimConfig(n_herds=300, n_years=4, target_prevalence=0.1, seed=5)
        panel = simulate_panel(cfg)
        for r in panel.records:
            assert r.x1 in (0, 1) and r.x2 in (0, 1) and r.x3 in (0, 1)
            assert r.x4 >= 0 and r.x7 >= 1
            assert r.x5 >= 0.0 and r.x6 >= 0.0
            assert 0.0 <= r.x8 <= 1.0
            assert r.status in (0, 1)

    def test_fixed_covariates_flag(self):
        cfg = SimConfig(
            n_herds=50, n_years=6, target_prevalence=0.2, seed=6, redraw_covariates=False
        )
        panel = simulate_panel(cfg)
        by_herd = defaultdict(list)
        for r in panel.records:
            by_herd[r.herd_id].append(r)
        for rows in by_herd.values():
            assert len({r.x7 for r in rows}) == 1
            assert len({r.x5 for r in rows}) == 1

    def test_graph_radius_override(self):
        cfg = SimConfig(
            n_herds=40, n_years=4, target_prevalence=0.5, seed=7,
            graph_params=GraphParams(mean_degree=4.0, radius=0.9),
        )
        panel = simulate_panel(cfg)
        degrees = [len(a) for a in panel.graph.neighbors]
        assert np.mean(degrees) > 20  # radius 0.9 connects nearly everything

    def test_dataset_alignment(self):
        cfg = SimConfig(n_herds=30, n_years=4, target_prevalence=0.5, seed=8)
        panel = simulate_panel(cfg)
        ds = panel_to_dataset(panel)
        assert ds.column_names == ("x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8")
        assert ds.n_rows == 30
        r0 = panel.records[0]
        np.testing.assert_allclose(
            ds.features[0],
            (r0.x1, r0.x2, r0.x3, r0.x4, r0.x5, r0.x6, r0.x7, r0.x8),
        )
