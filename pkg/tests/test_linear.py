import numpy as np
import pytest
from scipy import optimize

from bvdbench.dataio import Dataset
from bvdbench.linear import (
    fit_linear,
    logistic_smooth_loss,
    penalized_objective,
    predict_proba,
    select_lambda,
)
from bvdbench.metrics import roc_auc


def make_ds(n=80, p=3, seed=0, weights=None):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    logits = X @ np.array([1.5, -1.0, 0.5])[:p]
    y = (rng.random(n) < 1 / (1 + np.exp(-logits))).astype(int)
    if y.min() == y.max():
        y[0] = 1 - y[0]
    return Dataset(tuple(f"f{i}" for i in range(p)), X, y, weights=weights)


class TestFitLinear:
    def test_huge_l1_shrinks_to_intercept(self):
        ds = make_ds(seed=1)
        model = fit_linear(ds, penalty="lasso", lambda2=1e6)
        np.testing.assert_allclose(model.coefficients, 0.0, atol=1e-12)
        base = ds.labels.mean()
        assert model.intercept == pytest.approx(np.log(base / (1 - base)), abs=1e-5)

    def test_unpenalized_matches_scipy_mle(self):
        ds = make_ds(n=120, seed=2)
        model = fit_linear(ds, penalty="none", tol=1e-10)
        assert model.converged

        w = np.ones(ds.n_rows)
        res = optimize.minimize(
            logistic_smooth_loss,
            np.zeros(ds.n_features + 1),
            args=(ds.features, ds.labels.astype(float), w, 0.0),
            jac=True,
            method="BFGS",
            options={"gtol": 1e-10},
        )
        assert model.intercept == pytest.approx(res.x[0], abs=1e-5)
        np.testing.assert_allclose(model.coefficients, res.x[1:], atol=1e-5)

    def test_elastic_matches_scipy_on_smooth_part_plus_l1(self):
        # independent check by subgradient optimality at the solver's optimum
        ds = make_ds(n=100, seed=3)
        lam1, lam2 = 0.5, 0.3
        model = fit_linear(ds, penalty="elastic", lambda1=lam1, lambda2=lam2, tol=1e-12)
        params = np.concatenate([[model.intercept], model.coefficients])
        _, grad = logistic_smooth_loss(
            params, ds.features, ds.labels.astype(float), np.ones(ds.n_rows), lam1
        )
        assert abs(grad[0]) < 1e-5
        for j, beta in enumerate(model.coefficients):
            g = grad[1 + j]
            if beta > 0:
                assert g + lam2 == pytest.approx(0.0, abs=1e-5)
            elif beta < 0:
                assert g - lam2 == pytest.approx(0.0, abs=1e-5)
            else:
                assert abs(g) <= lam2 + 1e-5

    def test_separable_sign(self):
        X = np.array([[1.0], [1.2], [-1.0], [-0.8]])
        y = np.array([1, 1, 0, 0])
        ds = Dataset(("x",), X, y)
        model = fit_linear(ds, penalty="ridge", lambda1=0.01)
        assert model.coefficients[0] > 0

    def test_single_class_rejected(self):
        ds = Dataset(("x",), np.array([[1.0], [2.0]]), np.array([1, 1]))
        with pytest.raises(ValueError, match="both classes"):
            fit_linear(ds)

    def test_non_convergence_flagged(self):
        ds = make_ds(seed=4)
        model = fit_linear(ds, penalty="none", max_iter=2, tol=1e-14)
        assert not model.converged
        assert model.n_iter == 2

    def test_objective_non_increasing(self):
        for seed in range(5):
            ds = make_ds(n=60, seed=seed)
            model = fit_linear(ds, penalty="elastic", lambda1=0.1, lambda2=0.1, max_iter=300)
            hist = model.objective_history
            assert np.all(np.diff(hist) <= 1e-10)

    def test_ridge_shrinkage_monotone(self):
        ds = make_ds(n=100, seed=6)
        norms = []
        for lam in (0.0, 0.1, 1.0, 10.0, 100.0):
            model = fit_linear(ds, penalty="ridge", lambda1=lam, max_iter=3000)
            norms.append(np.linalg.norm(model.coefficients))
        assert all(a >= b - 1e-9 for a, b in zip(norms, norms[1:]))

    def test_duplicated_row_equals_double_weight(self):
        ds = make_ds(n=40, seed=7)
        dup = Dataset(
            ds.column_names,
            np.vstack([ds.features, ds.features[:1]]),
            np.concatenate([ds.labels, ds.labels[:1]]),
        )
        w = np.ones(ds.n_rows)
        w[0] = 2.0
        weighted = Dataset(ds.column_names, ds.features, ds.labels, weights=w)
        m_dup = fit_linear(dup, penalty="ridge", lambda1=0.05, tol=1e-10)
        m_w = fit_linear(weighted, penalty="ridge", lambda1=0.05, tol=1e-10)
        assert m_dup.intercept == pytest.approx(m_w.intercept, abs=1e-6)
        np.testing.assert_allclose(m_dup.coefficients, m_w.coefficients, atol=1e-6)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(8)
        ds = make_ds(n=30, seed=9)
        w = rng.uniform(0.5, 2.0, ds.n_rows)
        y = ds.labels.astype(float)
        step = 1e-5
        for _ in range(20):
            params = rng.normal(scale=0.8, size=ds.n_features + 1)
            _, grad = logistic_smooth_loss(params, ds.features, y, w, lambda1=0.3)
            for j in range(params.size):
                up, down = params.copy(), params.copy()
                up[j] += step
                down[j] -= step
                fd = (
                    logistic_smooth_loss(up, ds.features, y, w, 0.3)[0]
                    - logistic_smooth_loss(down, ds.features, y, w, 0.3)[0]
                ) / (2 * step)
                denom = max(abs(fd), abs(grad[j]), 1e-8)
                assert abs(grad[j] - fd) / denom < 1e-4


class TestPredictProba:
    def test_zero_model_gives_half(self):
        ds = make_ds(n=10, seed=10)
        model = fit_linear(ds, penalty="lasso", lambda2=1e9)
        flat = fit_linear(
            Dataset(ds.column_names, ds.features, np.array([0, 1] * 5)),
            penalty="lasso",
            lambda2=1e9,
        )
        np.testing.assert_allclose(predict_proba(flat, ds.features), 0.5, atol=1e-6)

    def test_logistic_tail(self):
        from bvdbench.linear import LinearModel

        model = LinearModel(intercept=10.0, coefficients=np.zeros(2), penalty="none",
                            lambda1=0.0, lambda2=0.0)
        p = predict_proba(model, np.zeros((3, 2)))
        assert np.all(p > 0.9999)

    def test_monotone_in_positive_coefficient(self):
        from bvdbench.linear import LinearModel

        model = LinearModel(intercept=0.0, coefficients=np.array([2.0]), penalty="none",
                            lambda1=0.0, lambda2=0.0)
        grid = np.linspace(-3, 3, 50)[:, None]
        p = predict_proba(model, grid)
        assert np.all(np.diff(p) > 0)

    def test_width_mismatch(self):
        ds = make_ds(n=10, seed=11)
        model = fit_linear(ds, max_iter=50)
        with pytest.raises(ValueError, match="coefficients"):
            predict_proba(model, np.zeros((4, ds.n_features + 2)))


class TestSelectLambda:
    def test_single_element_grid(self):
        ds = make_ds(n=60, seed=12)
        assert select_lambda(ds, [(0.5, 0.25)], k=3, seed=0) == (0.5, 0.25)

    def test_deterministic(self):
        ds = make_ds(n=60, seed=13)
        grid = [(0.01, 0.01), (1.0, 0.0), (0.0, 1.0)]
        a = select_lambda(ds, grid, k=3, seed=5)
        b = select_lambda(ds, grid, k=3, seed=5)
        assert a == b

    def test_attains_exhaustive_maximum(self):
        from bvdbench.crossval import kfold
        from bvdbench.linear import fit_linear as refit

        ds = make_ds(n=90, seed=14)
        grid = [(0.01, 0.0), (0.1, 0.1), (10.0, 0.0), (0.0, 5.0)]
        chosen = select_lambda(ds, grid, k=3, seed=2, max_iter=2000, tol=1e-6)

        # independent re-evaluation of every grid cell
        plan = kfold(ds.labels, k=3, stratified=True, seed=2)
        def cv_auc(lam1, lam2):
            aucs = []
            for fold in range(3):
                test = plan.assignments == fold
                model = refit(ds.subset(np.flatnonzero(~test)), penalty="elastic",
                              lambda1=lam1, lambda2=lam2, max_iter=2000, tol=1e-6)
                aucs.append(roc_auc(predict_proba(model, ds.features[test]), ds.labels[test]))
            return np.mean(aucs)

        scores = {pair: cv_auc(*pair) for pair in grid}
        assert scores[chosen] == pytest.approx(max(scores.values()), abs=1e-12)


class TestObjectiveHelper:
    def test_penalized_objective_components(self):
        ds = make_ds(n=20, seed=15)
        beta = np.array([0.5, -0.25, 0.0])
        val = penalized_objective(0.1, beta, ds.features, ds.labels.astype(float),
                                  np.ones(20), 2.0, 3.0)
        smooth, _ = logistic_smooth_loss(
            np.concatenate([[0.1], beta]), ds.features, ds.labels.astype(float),
            np.ones(20), 2.0,
        )
        assert val == pytest.approx(smooth + 3.0 * np.abs(beta).sum())
