"""k-fold cross-validation with leakage-safe preprocessing and threshold sweeps.

Standardizers, class weights and resampling plans are always fit or applied
on training rows only; held-out scores are pooled across folds for a single
threshold-free AUC, while confusion counts accumulate at the decision
threshold (probability models) or at a per-fold threshold picked from
training scores (anomaly detectors).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import anomaly as anomaly_mod
from .balance import ClassWeights, ResamplePlan, class_weights, resample
from .dataio import Dataset, apply_standardizer, fit_standardizer
from .metrics import ConfusionMatrix, MetricSummary, confusion, roc_auc, summarize

CLASSIFIER_KINDS = ("glm", "ridge", "lasso", "elastic", "cart", "random_forest", "gbt", "svm")
ANOMALY_KINDS = anomaly_mod.DETECTOR_NAMES
STRATEGIES = ("raw", "resample", "weighted")


@dataclass(frozen=True)
class FoldPlan:
    assignments: np.ndarray
    k: int
    stratified: bool
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)


def kfold(labels, k: int, stratified: bool = True, seed: int = 0) -> FoldPlan:
    """Assign each row a fold index in [0, k); stratification balances classes."""
    y = np.asarray(labels, dtype=int)
    n = y.size
    if k < 2:
        raise ValueError("k must be >= 2")
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    rng = np.random.default_rng(seed)
    assignments = np.empty(n, dtype=int)
    if stratified:
        for cls in np.unique(y):
            members = np.flatnonzero(y == cls)
            if members.size < k:
                raise ValueError(
                    f"stratified folds need at least k={k} rows per class, "
                    f"class {cls} has {members.size}"
                )
            perm = rng.permutation(members)
            assignments[perm] = np.arange(perm.size) % k
    else:
        perm = rng.permutation(n)
        assignments[perm] = np.arange(n) % k
    return FoldPlan(assignments=assignments, k=k, stratified=stratified, seed=seed)


@dataclass(frozen=True)
class ModelSpec:
    """Named model plus keyword parameters for its fitting routine."""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in CLASSIFIER_KINDS and self.kind not in ANOMALY_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")

    @property
    def is_anomaly(self) -> bool:
        return self.kind in ANOMALY_KINDS


@dataclass(frozen=True, eq=False)
class CrossValResult:
    confusion: ConfusionMatrix
    metrics: MetricSummary
    auc: float
    row_scores: np.ndarray
    thresholds: tuple
    fold_test_indices: tuple
    fold_train_provenance: tuple  # original row index per training row, -1 synthetic
    converged: bool = True


def _derive_seed(base: int, fold: int) -> int:
    return int(np.random.SeedSequence((base, fold)).generate_state(1)[0])


def _fit_and_score_classifier(spec: ModelSpec, train: Dataset, test_X, seed: int,
                              cw: Optional[ClassWeights]):
    from . import ensembles, linear, svm

    p = dict(spec.params)
    base_seed = p.pop("seed", seed)
    kind = spec.kind
    if kind in ("glm", "ridge", "lasso", "elastic"):
        penalty = "none" if kind == "glm" else kind
        model = linear.fit_linear(
            train,
            penalty=penalty,
            lambda1=p.pop("lambda1", 0.01 if penalty in ("ridge", "elastic") else 0.0),
            lambda2=p.pop("lambda2", 0.01 if penalty in ("lasso", "elastic") else 0.0),
            max_iter=p.pop("max_iter", 500),
            tol=p.pop("tol", 1e-7),
        )
        return linear.predict_proba(model, test_X)
    if kind == "cart":
        tree = ensembles.fit_cart(
            train,
            max_depth=p.pop("max_depth", 12),
            min_leaf=p.pop("min_leaf", 1),
        )
        return ensembles.predict_proba(tree, test_X)
    if kind == "random_forest":
        model = ensembles.fit_forest(
            train,
            n_trees=p.pop("n_trees", 200),
            mtry=p.pop("mtry", None),
            max_depth=p.pop("max_depth", 12),
            min_leaf=p.pop("min_leaf", 1),
            seed=base_seed,
        )
        return ensembles.predict_proba(model, test_X)
    if kind == "gbt":
        model = ensembles.fit_gbt(
            train,
            n_rounds=p.pop("n_rounds", 200),
            learning_rate=p.pop("learning_rate", 0.1),
            max_depth=p.pop("max_depth", 4),
            lambda_reg=p.pop("lambda_reg", 1.0),
            min_leaf=p.pop("min_leaf", 5),
            seed=base_seed,
        )
        return ensembles.predict_proba(model, test_X)
    if kind == "svm":
        kernel = svm.KernelSpec(
            kind=p.pop("kernel", "radial"),
            r=p.pop("r", 0.0),
            d=p.pop("d", 3),
            gamma=p.pop("gamma", 1.0 / train.n_features),
        )
        model = svm.fit_svm(
            train,
            spec=kernel,
            C=p.pop("C", 1.0),
            class_weights=cw,
            tol=p.pop("tol", 1e-3),
            max_passes=p.pop("max_passes", 100),
        )
        return svm.predict_proba(model, test_X)
    raise ValueError(f"unhandled classifier kind {kind!r}")


def cross_validate(
    ds: Dataset,
    model_spec: ModelSpec,
    strategy: str = "raw",
    fold_plan: Optional[FoldPlan] = None,
    threshold: float = 0.5,
    resample_plan: Optional[ResamplePlan] = None,
    seed: int = 0,
) -> CrossValResult:
    """Pooled cross-validated confusion counts, summary metrics and AUC.

    strategy "resample" needs a ResamplePlan; "weighted" turns inverse class
    frequencies into per-row weights (per-class box constraints for SVM).
    Anomaly model specs run on the raw strategy only; their per-fold decision
    threshold comes from training scores (params: threshold_method "f1_max"
    or "contamination_quantile" with contamination q).
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}")
    if strategy == "resample" and resample_plan is None:
        raise ValueError("strategy 'resample' requires a resample_plan")
    if model_spec.is_anomaly and strategy != "raw":
        raise ValueError("anomaly detectors run on the raw strategy only")
    if fold_plan is None:
        fold_plan = kfold(ds.labels, k=5, stratified=True, seed=seed)

    row_scores = np.full(ds.n_rows, np.nan)
    total = {"tp": 0, "fp": 0, "tn": 0, "fn": 0}
    thresholds = []
    fold_tests = []
    fold_prov = []
    converged = True

    for fold in range(fold_plan.k):
        test_idx = fold_plan.test_indices(fold)
        train_idx = fold_plan.train_indices(fold)
        train = ds.subset(train_idx)
        st = fit_standardizer(train)
        train = apply_standardizer(st, train)
        test_X = apply_standardizer(st, ds.subset(test_idx)).features
        fold_seed = _derive_seed(seed, fold)

        cw = None
        provenance = train_idx.copy()
        if strategy == "weighted":
            cw = class_weights(train.labels)
            w = np.where(train.labels == 1, cw.positive, cw.negative)
            train = train.with_weights(w)
        elif strategy == "resample":
            plan = replace(resample_plan, seed=_derive_seed(resample_plan.seed, fold))
            train = resample(train, plan)
            src = train.source_rows
            provenance = np.where(src >= 0, train_idx[np.maximum(src, 0)], -1)

        if model_spec.is_anomaly:
            p = dict(model_spec.params)
            method = p.pop("threshold_method", "f1_max")
            q = p.pop("contamination", 0.1)
            if "seed" in anomaly_params_accepting_seed(model_spec.kind):
                p.setdefault("seed", fold_seed)
            detector = anomaly_mod.make_detector(model_spec.kind, **p)
            detector.fit(train.features, train.labels)
            train_scores = detector.score_train()
            if method == "f1_max":
                fold_threshold = anomaly_mod.threshold_from_scores(
                    train_scores, "f1_max", labels=train.labels
                )
            else:
                fold_threshold = anomaly_mod.threshold_from_scores(
                    train_scores, "contamination_quantile", q=q
                )
            scores = detector.score(test_X)
        else:
            scores = _fit_and_score_classifier(model_spec, train, test_X, fold_seed, cw)
            fold_threshold = threshold

        row_scores[test_idx] = scores
        predicted = (scores >= fold_threshold).astype(int)
        cm = confusion(predicted, ds.labels[test_idx])
        total["tp"] += cm.tp
        total["fp"] += cm.fp
        total["tn"] += cm.tn
        total["fn"] += cm.fn
        thresholds.append(float(fold_threshold))
        fold_tests.append(test_idx)
        fold_prov.append(provenance)

    pooled = ConfusionMatrix(**total)
    auc = roc_auc(row_scores, ds.labels)
    return CrossValResult(
        confusion=pooled,
        metrics=summarize(pooled),
        auc=auc,
        row_scores=row_scores,
        thresholds=tuple(thresholds),
        fold_test_indices=tuple(fold_tests),
        fold_train_provenance=tuple(fold_prov),
        converged=converged,
    )


def anomaly_params_accepting_seed(kind: str) -> tuple:
    return ("seed",) if kind in ("mcd", "iforest", "autoencoder") else ()


def threshold_sweep(scores, labels, grid) -> list:
    """Metric summaries along an ascending threshold grid (score >= t is positive)."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=int)
    g = np.asarray(grid, dtype=float)
    if g.size == 0:
        raise ValueError("threshold grid must be non-empty")
    if np.any(np.diff(g) < 0):
        raise ValueError("threshold grid must be sorted ascending")
    out = []
    for t in g:
        cm = confusion((s >= t).astype(int), y)
        out.append((float(t), summarize(cm)))
    return out
