"""Class-imbalance countermeasures: inverse-frequency weights, resampling, SMOTE."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataio import Dataset, standardize_matrix

RESAMPLE_MODES = ("under", "over", "smote", "under_then_smote")


@dataclass(frozen=True)
class ClassWeights:
    negative: float
    positive: float


@dataclass(frozen=True)
class ResamplePlan:
    """How to rebalance a dataset before model fitting.

    target_ratio is the minority:majority ratio after resampling.
    intermediate_ratio applies only to under_then_smote: the ratio reached by
    random under-sampling before SMOTE tops the minority up to target_ratio.
    """

    mode: str
    target_ratio: float = 1.0
    k_neighbors: int = 5
    seed: int = 0
    intermediate_ratio: float = 0.5

    def __post_init__(self):
        if self.mode not in RESAMPLE_MODES:
            raise ValueError(f"mode must be one of {RESAMPLE_MODES}, got {self.mode!r}")
        if not 0 < self.target_ratio <= 1:
            raise ValueError("target_ratio must be in (0, 1]")
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        if not 0 < self.intermediate_ratio <= 1:
            raise ValueError("intermediate_ratio must be in (0, 1]")


def class_weights(labels) -> ClassWeights:
    """Inverse-frequency weights: n / (2 * class count) for each class."""
    y = np.asarray(labels, dtype=int)
    n = y.size
    n_pos = int(np.sum(y == 1))
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("both classes must be present to derive class weights")
    return ClassWeights(negative=n / (2.0 * n_neg), positive=n / (2.0 * n_pos))


def _split_classes(ds: Dataset):
    y = ds.labels
    n_pos = int(np.sum(y == 1))
    n_neg = ds.n_rows - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("both classes must be present to resample")
    if n_pos <= n_neg:
        minority, majority = np.flatnonzero(y == 1), np.flatnonzero(y == 0)
    else:
        minority, majority = np.flatnonzero(y == 0), np.flatnonzero(y == 1)
    return minority, majority


def _assemble(ds: Dataset, row_indices, synthetic_features=None, synthetic_label=None,
              synthetic_sources=None) -> Dataset:
    """Stack kept original rows (by index) with optional synthetic rows."""
    idx = np.asarray(row_indices, dtype=int)
    features = ds.features[idx]
    labels = ds.labels[idx]
    weights = None if ds.weights is None else ds.weights[idx]
    source = idx.copy()
    if synthetic_features is not None and len(synthetic_features):
        features = np.vstack([features, synthetic_features])
        labels = np.concatenate([labels, np.full(len(synthetic_features), synthetic_label, dtype=int)])
        if weights is not None:
            weights = np.concatenate([weights, ds.weights[synthetic_sources]])
        source = np.concatenate([source, np.full(len(synthetic_features), -1, dtype=int)])
    return Dataset(
        column_names=ds.column_names,
        features=features,
        labels=labels,
        weights=weights,
        source_rows=source,
    )


def random_resample(ds: Dataset, plan: ResamplePlan) -> Dataset:
    """Random under- or over-sampling to the plan's minority:majority ratio.

    Under-sampling drops majority rows without replacement; over-sampling
    duplicates minority rows with replacement. Minority rows are never dropped.
    """
    if plan.mode not in ("under", "over"):
        raise ValueError(f"random_resample requires mode under or over, got {plan.mode!r}")
    minority, majority = _split_classes(ds)
    rng = np.random.default_rng(plan.seed)
    if plan.mode == "under":
        keep_majority = int(round(len(minority) / plan.target_ratio))
        if keep_majority > len(majority):
            raise ValueError(
                f"cannot under-sample to ratio {plan.target_ratio}: would need "
                f"{keep_majority} majority rows, only {len(majority)} available"
            )
        kept = rng.choice(majority, size=keep_majority, replace=False)
        rows = np.concatenate([minority, np.sort(kept)])
        return _assemble(ds, np.sort(rows))
    # over
    target_minority = int(round(len(majority) * plan.target_ratio))
    if target_minority < len(minority):
        raise ValueError(
            f"cannot over-sample to ratio {plan.target_ratio}: target minority count "
            f"{target_minority} is below the existing {len(minority)}"
        )
    extra = rng.choice(minority, size=target_minority - len(minority), replace=True)
    rows = np.concatenate([majority, minority, extra])
    return _assemble(ds, rows)


def smote(ds: Dataset, plan: ResamplePlan) -> Dataset:
    """Synthetic minority oversampling along segments between minority neighbors.

    Each synthetic row is x_a + u * (x_b - x_a) with u ~ Uniform(0, 1) and x_b
    one of x_a's k nearest minority neighbors under Euclidean distance on
    standardized features. mode under_then_smote first under-samples the
    majority to intermediate_ratio. Already-balanced inputs pass through
    unchanged.
    """
    if plan.mode not in ("smote", "under_then_smote"):
        raise ValueError(f"smote requires mode smote or under_then_smote, got {plan.mode!r}")
    rng = np.random.default_rng(plan.seed)

    working = ds
    if plan.mode == "under_then_smote":
        minority, majority = _split_classes(ds)
        current = len(minority) / len(majority)
        if current < plan.intermediate_ratio:
            under = ResamplePlan(
                mode="under",
                target_ratio=plan.intermediate_ratio,
                seed=int(rng.integers(2**63)),
            )
            working = random_resample(ds, under)

    minority, majority = _split_classes(working)
    minority_label = int(working.labels[minority[0]])
    needed = int(round(len(majority) * plan.target_ratio)) - len(minority)
    if needed <= 0:
        # already at or past the target ratio; keep provenance intact
        return working if working is not ds else _assemble(ds, np.arange(ds.n_rows))

    if len(minority) <= plan.k_neighbors:
        raise ValueError(
            f"SMOTE needs more than k_neighbors={plan.k_neighbors} minority rows, "
            f"got {len(minority)}"
        )

    Xmin = working.features[minority]
    Z = standardize_matrix(working.features)[minority]
    sq = np.sum(Z * Z, axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (Z @ Z.T), 0.0)
    np.fill_diagonal(d2, np.inf)
    neighbor_idx = np.argsort(d2, axis=1, kind="stable")[:, : plan.k_neighbors]

    anchors = rng.integers(len(minority), size=needed)
    picks = rng.integers(plan.k_neighbors, size=needed)
    partners = neighbor_idx[anchors, picks]
    u = rng.random(needed)
    synthetic = Xmin[anchors] + u[:, None] * (Xmin[partners] - Xmin[anchors])

    # map working-row provenance back through any under-sampling step
    base = _assemble(
        working,
        np.arange(working.n_rows),
        synthetic_features=synthetic,
        synthetic_label=minority_label,
        synthetic_sources=minority[anchors],
    )
    if working is not ds:
        mapped = np.where(base.source_rows >= 0,
                          working.source_rows[np.maximum(base.source_rows, 0)], -1)
        base = Dataset(
            column_names=base.column_names,
            features=base.features,
            labels=base.labels,
            weights=base.weights,
            source_rows=mapped,
        )
    return base


def resample(ds: Dataset, plan: ResamplePlan) -> Dataset:
    """Dispatch on plan.mode."""
    if plan.mode in ("under", "over"):
        return random_resample(ds, plan)
    return smote(ds, plan)
