import itertools
import math

import numpy as np
import pytest

from bvdbench.anomaly import (
    abof,
    abof_raw,
    ae_flatten,
    ae_loss_and_grad,
    autoencoder_fit,
    average_path_length,
    chi2_cutoff,
    classical_fit,
    iforest_fit,
    iforest_scores,
    isolation_forest,
    knn_score,
    lof,
    lof_scores,
    make_detector,
    mahalanobis_scores,
    mcd_fit,
    reconstruction_error,
    threshold_from_scores,
    DETECTOR_NAMES,
)

LOF_FIXTURE = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [5.0, 5.0]])


def lof_by_hand(X, k):
    """Direct transcription of the k-distance / RD / LRD / LOF definitions."""
    n = X.shape[0]
    d = np.sqrt(((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2))
    neighbors, kdist = [], np.zeros(n)
    for i in range(n):
        order = [j for j in np.argsort(d[i], kind="stable") if j != i]
        neighbors.append(order[:k])
        kdist[i] = d[i, order[k - 1]]
    lrd = np.zeros(n)
    for i in range(n):
        reach = [max(kdist[j], d[i, j]) for j in neighbors[i]]
        lrd[i] = 1.0 / (np.mean(reach))
    out = np.zeros(n)
    for i in range(n):
        out[i] = np.mean([lrd[j] for j in neighbors[i]]) / lrd[i]
    return out


class TestLof:
    def test_fixture_point(self):
        scores = lof(LOF_FIXTURE, k=2).values
        assert scores[3] == pytest.approx(5.305, abs=1e-3)

    def test_matches_definition_transcription(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(40, 3))
        np.testing.assert_allclose(lof(X, 5).values, lof_by_hand(X, 5), atol=1e-10)

    def test_uniform_lattice_interior_near_one(self):
        X = np.arange(30, dtype=float)[:, None]
        scores = lof(X, k=2).values
        interior = scores[5:25]
        assert np.all((interior >= 0.9) & (interior <= 1.1))

    def test_k_bounds(self):
        with pytest.raises(ValueError, match="k must"):
            lof(LOF_FIXTURE, k=4)
        with pytest.raises(ValueError, match="k must"):
            lof(LOF_FIXTURE, k=0)

    def test_out_of_sample_matches_inlier_scale(self):
        rng = np.random.default_rng(1)
        ref = rng.normal(size=(100, 2))
        inlier = np.zeros((1, 2))
        outlier = np.full((1, 2), 8.0)
        s_in = lof_scores(ref, inlier, k=10).values[0]
        s_out = lof_scores(ref, outlier, k=10).values[0]
        assert s_out > 3 * s_in


class TestKnnScore:
    def test_duplicate_pair_scores_zero(self):
        X = np.array([[1.0, 1.0], [1.0, 1.0], [5.0, 5.0]])
        scores = knn_score(X, k=1).values
        assert scores[0] == 0.0 and scores[1] == 0.0

    def test_far_point_maximal(self):
        rng = np.random.default_rng(2)
        X = np.vstack([rng.normal(size=(50, 2)), [[40.0, 40.0]]])
        scores = knn_score(X, k=3).values
        assert np.argmax(scores) == 50

    def test_k1_is_nearest_neighbor_distance(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(20, 2))
        d = np.sqrt(((X[:, None] - X[None, :]) ** 2).sum(axis=2))
        np.fill_diagonal(d, np.inf)
        np.testing.assert_allclose(knn_score(X, 1).values, d.min(axis=1), atol=1e-12)


def abof_brute(X):
    """Triple-loop transcription of the pairwise-angle variance."""
    n = X.shape[0]
    out = np.zeros(n)
    for a in range(n):
        vals = []
        others = [i for i in range(n) if i != a]
        for b, c in itertools.combinations(others, 2):
            vb = X[b] - X[a]
            vc = X[c] - X[a]
            nb = vb @ vb
            nc = vc @ vc
            if nb == 0 or nc == 0:
                continue
            vals.append((vb @ vc) / (nb * nc))
        out[a] = np.var(vals) if vals else 0.0
    return out


class TestAbof:
    def test_three_points_zero_variance(self):
        X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
        np.testing.assert_allclose(abof_raw(X), 0.0, atol=1e-15)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(4)
        for n in (5, 12, 30):
            X = rng.normal(size=(n, 3))
            np.testing.assert_allclose(abof_raw(X), abof_brute(X), atol=1e-10)

    def test_collinear_outlier_has_minimum_raw_factor(self):
        rng = np.random.default_rng(5)
        X = np.vstack([rng.normal(0, 0.5, size=(7, 2)), [[25.0, 25.0]]])
        raw = abof_raw(X)
        assert np.argmin(raw) == 7
        assert np.argmax(abof(X).values) == 7  # negation flips orientation

    def test_coincident_points_skipped(self):
        X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        raw = abof_raw(X)  # must not divide by zero
        assert np.all(np.isfinite(raw))

    def test_needs_three_rows(self):
        with pytest.raises(ValueError, match="at least 3"):
            abof_raw(np.zeros((2, 2)))

    def test_row_cap(self):
        with pytest.raises(ValueError, match="capped"):
            abof_raw(np.zeros((2001, 2)))


class TestMahalanobis:
    def test_center_scores_zero(self):
        rng = np.random.default_rng(6)
        X = rng.normal(size=(50, 3))
        loc = classical_fit(X)
        assert mahalanobis_scores(loc, loc.mean_vector[None, :]).values[0] == pytest.approx(0.0, abs=1e-10)

    def test_identity_covariance_is_squared_distance(self):
        from bvdbench.anomaly import RobustLocation

        loc = RobustLocation(
            mean_vector=np.zeros(2), covariance=np.eye(2), det=1.0
        )
        X = np.array([[3.0, 4.0]])
        assert mahalanobis_scores(loc, X).values[0] == pytest.approx(25.0)

    def test_affine_invariance(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(200, 3))
        A = rng.normal(size=(3, 3)) + 3 * np.eye(3)
        b = rng.normal(size=3)
        Y = X @ A.T + b
        d1 = mahalanobis_scores(classical_fit(X), X).values
        d2 = mahalanobis_scores(classical_fit(Y), Y).values
        np.testing.assert_allclose(d1, d2, atol=1e-8)

    def test_singular_covariance_rejected(self):
        from bvdbench.anomaly import RobustLocation

        loc = RobustLocation(
            mean_vector=np.zeros(2),
            covariance=np.array([[1.0, 1.0], [1.0, 1.0]]),
            det=0.0,
        )
        with pytest.raises((ValueError, np.linalg.LinAlgError)):
            mahalanobis_scores(loc, np.ones((1, 2)))


def chi2_quantile_by_integration(prob, dof):
    """Independent quantile: integrate the chi-square density, then bisect."""
    from scipy.integrate import quad

    def pdf(x):
        return x ** (dof / 2 - 1) * math.exp(-x / 2) / (2 ** (dof / 2) * math.gamma(dof / 2))

    def cdf(x):
        return quad(pdf, 0, x, limit=200)[0]

    lo, hi = 0.0, 200.0
    for _ in range(80):
        mid = (lo + hi) / 2
        if cdf(mid) < prob:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


class TestChi2Cutoff:
    def test_three_dof_fixture(self):
        oracle = chi2_quantile_by_integration(0.95, 3)
        assert oracle == pytest.approx(7.815, abs=1e-3)
        assert chi2_cutoff(0.05, 3) == pytest.approx(oracle, abs=1e-6)
        assert chi2_cutoff(0.05, 3) == pytest.approx(7.815, abs=1e-3)

    def test_other_dofs_match_integration(self):
        for alpha, dof in ((0.1, 1), (0.05, 8), (0.01, 2)):
            assert chi2_cutoff(alpha, dof) == pytest.approx(
                chi2_quantile_by_integration(1 - alpha, dof), abs=1e-6
            )

    def test_validation(self):
        with pytest.raises(ValueError):
            chi2_cutoff(0.0, 3)
        with pytest.raises(ValueError):
            chi2_cutoff(0.05, 0)


class TestMcd:
    def make_contaminated(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(7, 2))
        return np.vstack([X, [[50.0, -50.0]]])

    def test_matches_exhaustive_search(self):
        X = self.make_contaminated()
        fit = mcd_fit(X, h=6, n_subsamples=300, seed=0)

        best_det, best_mean = np.inf, None
        for subset in itertools.combinations(range(8), 6):
            sub = X[list(subset)]
            cov = np.cov(sub, rowvar=False, ddof=0)
            det = np.linalg.det(cov)
            if det < best_det:
                best_det, best_mean = det, sub.mean(axis=0)
        assert fit.det == pytest.approx(best_det, rel=1e-10)
        np.testing.assert_allclose(fit.mean_vector, best_mean, atol=1e-12)

    def test_excludes_planted_outlier(self):
        X = self.make_contaminated()
        fit = mcd_fit(X, h=6, n_subsamples=300, seed=1)
        d2 = mahalanobis_scores(fit, X).values
        assert np.argmax(d2) == 7

    def test_h_equals_n_is_classical(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(30, 3))
        fit = mcd_fit(X, h=30, n_subsamples=5, seed=0)
        classical = classical_fit(X)
        np.testing.assert_allclose(fit.mean_vector, classical.mean_vector)
        np.testing.assert_allclose(fit.covariance, classical.covariance)

    def test_determinism(self):
        X = self.make_contaminated()
        a = mcd_fit(X, h=6, n_subsamples=50, seed=3)
        b = mcd_fit(X, h=6, n_subsamples=50, seed=3)
        np.testing.assert_array_equal(a.covariance, b.covariance)

    def test_h_bounds(self):
        X = np.zeros((10, 3))
        with pytest.raises(ValueError, match="exceeds n"):
            mcd_fit(X, h=11)
        with pytest.raises(ValueError, match="exceed the dimension"):
            mcd_fit(X, h=3)


class TestIsolationForest:
    def test_two_point_exact_score(self):
        assert average_path_length(2) == pytest.approx(1.0)
        scores = isolation_forest(np.array([[0.0], [1.0]]), n_trees=25, subsample_size=2,
                                  seed=0).values
        np.testing.assert_allclose(scores, 0.5, atol=1e-12)

    def test_planted_outlier_scores_highest(self):
        rng = np.random.default_rng(10)
        X = np.vstack([rng.normal(size=(100, 5)), np.full((1, 5), 12.0)])
        scores = isolation_forest(X, seed=4).values
        assert np.argmax(scores) == 100

    def test_scores_in_open_unit_interval(self):
        rng = np.random.default_rng(11)
        X = rng.normal(size=(80, 3))
        s = isolation_forest(X, seed=2).values
        assert np.all((s > 0) & (s < 1))

    def test_determinism(self):
        rng = np.random.default_rng(12)
        X = rng.normal(size=(60, 2))
        a = isolation_forest(X, seed=9).values
        b = isolation_forest(X, seed=9).values
        np.testing.assert_array_equal(a, b)

    def test_out_of_sample_scoring(self):
        rng = np.random.default_rng(13)
        X = rng.normal(size=(200, 3))
        model = iforest_fit(X, seed=1)
        far = iforest_scores(model, np.full((1, 3), 15.0)).values[0]
        near = iforest_scores(model, np.zeros((1, 3))).values[0]
        assert far > near

    def test_subsample_validation(self):
        with pytest.raises(ValueError, match="subsample_size"):
            iforest_fit(np.zeros((10, 2)), subsample_size=1)


class TestAutoencoder:
    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(14)
        X = rng.normal(size=(12, 5))
        model = autoencoder_fit(X, epochs=0, seed=3)
        sizes = model.layer_sizes
        base = ae_flatten(model)
        step = 1e-5
        for trial in range(20):
            params = base + rng.normal(scale=0.3, size=base.size)
            _, grad = ae_loss_and_grad(sizes, params, X)
            j = int(rng.integers(params.size))
            up, down = params.copy(), params.copy()
            up[j] += step
            down[j] -= step
            fd = (ae_loss_and_grad(sizes, up, X)[0] - ae_loss_and_grad(sizes, down, X)[0]) / (
                2 * step
            )
            denom = max(abs(fd), abs(grad[j]), 1e-8)
            assert abs(grad[j] - fd) / denom < 1e-4

    def test_off_manifold_point_scores_high(self):
        # 1-D manifold in 3-D, standardized as the detectors expect
        rng = np.random.default_rng(15)
        t = rng.uniform(-2, 2, size=300)
        X = np.column_stack([t, 2 * t, -t]) + rng.normal(scale=0.05, size=(300, 3))
        mu, sd = X.mean(axis=0), X.std(axis=0)
        Z = (X - mu) / sd
        model = autoencoder_fit(Z, layer_sizes=(2, 1), epochs=500, learning_rate=0.05,
                                seed=0)
        train_scores = reconstruction_error(model, Z).values
        off = (np.array([[1.0, -2.0, 1.0]]) - mu) / sd
        assert reconstruction_error(model, off).values[0] > np.quantile(train_scores, 0.95)

    def test_training_reduces_loss(self):
        rng = np.random.default_rng(16)
        X = rng.normal(size=(50, 4))
        m0 = autoencoder_fit(X, epochs=0, seed=5)
        m1 = autoencoder_fit(X, epochs=300, learning_rate=0.02, seed=5)
        l0 = reconstruction_error(m0, X).values.mean()
        l1 = reconstruction_error(m1, X).values.mean()
        assert l1 < l0

    def test_determinism(self):
        rng = np.random.default_rng(17)
        X = rng.normal(size=(30, 4))
        a = autoencoder_fit(X, epochs=50, seed=8)
        b = autoencoder_fit(X, epochs=50, seed=8)
        for wa, wb in zip(a.weights, b.weights):
            np.testing.assert_array_equal(wa, wb)

    def test_bottleneck_must_be_narrower(self):
        with pytest.raises(ValueError, match="bottleneck"):
            autoencoder_fit(np.zeros((10, 3)), layer_sizes=(4, 3), epochs=0)


class TestThresholds:
    def test_contamination_order_statistic(self):
        rng = np.random.default_rng(18)
        scores = rng.normal(size=1000)
        t = threshold_from_scores(scores, "contamination_quantile", q=0.01)
        assert t == np.sort(scores)[989]  # the 990th order statistic

    def test_f1_max_on_separated_scores(self):
        scores = np.array([0.1, 0.2, 0.3, 0.8, 0.9])
        labels = np.array([0, 0, 0, 1, 1])
        t = threshold_from_scores(scores, "f1_max", labels=labels)
        assert t == 0.8  # lowest threshold achieving F1 = 1
        from bvdbench.metrics import confusion, summarize

        assert summarize(confusion((scores >= t).astype(int), labels)).f1 == 1.0

    def test_f1_max_matches_brute_force_sweep(self):
        from bvdbench.metrics import confusion, summarize

        rng = np.random.default_rng(19)
        for trial in range(15):
            scores = np.round(rng.normal(size=60), 1)  # ties likely
            labels = (rng.random(60) < 0.3).astype(int)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            t = threshold_from_scores(scores, "f1_max", labels=labels)

            def f1_at(th):
                m = summarize(confusion((scores >= th).astype(int), labels))
                return -1.0 if m.f1 is None else m.f1

            best = max(f1_at(c) for c in np.unique(scores))
            assert f1_at(t) == pytest.approx(best, abs=1e-12)

    def test_empty_scores_rejected(self):
        with pytest.raises(ValueError, match="non-empty"):
            threshold_from_scores([], "contamination_quantile", q=0.1)

    def test_f1_needs_labels(self):
        with pytest.raises(ValueError, match="labels"):
            threshold_from_scores([1.0, 2.0], "f1_max")


class TestUnifiedOrientation:
    def test_planted_outlier_ranks_top5_for_every_detector(self):
        rng = np.random.default_rng(20)
        X = np.vstack([rng.normal(size=(100, 5)), np.full((1, 5), 9.0)])
        X = (X - X.mean(axis=0)) / X.std(axis=0)
        labels = np.array([0] * 100 + [1])
        for name in DETECTOR_NAMES:
            det = make_detector(name)
            det.fit(X, labels)
            scores = det.score_train()
            assert len(scores) == 101
            assert np.all(np.isfinite(scores))
            rank = np.argsort(-scores, kind="stable").tolist().index(100)
            assert rank < 5, f"{name} ranked the planted outlier at {rank}"
