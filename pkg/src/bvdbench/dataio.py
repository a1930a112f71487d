"""Column-named datasets: CSV ingestion, interaction expansion, standardization."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

# One row per herd-year in the real-data CSV layout.
HERD_CSV_COLUMNS = (
    "herd_id",
    "year",
    "bvd_status",
    "calves_born",
    "non_dairy_count",
    "moves_factory",
    "moves_knackery",
    "moves_farm",
    "moves_mart",
    "exports",
    "stillbirths",
    "degree",
    "betweenness",
    "closeness",
    "local_density",
)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix with named columns, binary labels and optional row weights.

    ``source_rows`` is provenance metadata set by the resamplers: the index of
    the input row each output row came from, -1 for synthetic rows.
    """

    column_names: tuple[str, ...]
    features: np.ndarray
    labels: np.ndarray
    weights: Optional[np.ndarray] = None
    source_rows: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)
        if feats.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        if feats.shape[1] != len(self.column_names):
            raise ValueError(
                f"{len(self.column_names)} column names for {feats.shape[1]} columns"
            )
        if labels.shape != (feats.shape[0],):
            raise ValueError("labels length does not match feature rows")
        if not np.all(np.isfinite(feats)):
            raise ValueError("non-finite feature values")
        if not np.all((labels == 0) | (labels == 1)):
            raise ValueError("labels must be 0 or 1")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            object.__setattr__(self, "weights", w)
            if w.shape != (feats.shape[0],):
                raise ValueError("weights length does not match feature rows")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise ValueError("weights must be finite and positive")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, indices: np.ndarray) -> "Dataset":
        idx = np.asarray(indices, dtype=int)
        return Dataset(
            column_names=self.column_names,
            features=self.features[idx],
            labels=self.labels[idx],
            weights=None if self.weights is None else self.weights[idx],
        )

    def with_weights(self, weights: np.ndarray) -> "Dataset":
        return replace(self, weights=np.asarray(weights, dtype=float))


@dataclass(frozen=True)
class CsvSchema:
    """Expected feature columns plus the name of the binary label column."""

    feature_columns: tuple[str, ...]
    label_column: str


def load_csv(path, schema: CsvSchema) -> Dataset:
    """Read a header CSV into a Dataset, validating against the schema.

    Errors name the offending row (1-based, counting the header as row 1)
    and column. Label values must parse to exactly 0 or 1.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, header row required") from None
        positions = {name: i for i, name in enumerate(header)}
        needed = list(schema.feature_columns) + [schema.label_column]
        for name in needed:
            if name not in positions:
                raise ValueError(f"{path}: missing column '{name}'")
        feat_pos = [positions[c] for c in schema.feature_columns]
        label_pos = positions[schema.label_column]

        rows = []
        labels = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}: row {lineno} has {len(row)} cells, expected {len(header)}")
            vals = []
            for col, pos in zip(schema.feature_columns, feat_pos):
                try:
                    v = float(row[pos])
                except ValueError:
                    raise ValueError(
                        f"{path}: row {lineno}, column '{col}': non-numeric value {row[pos]!r}"
                    ) from None
                if not np.isfinite(v):
                    raise ValueError(f"{path}: row {lineno}, column '{col}': non-finite value")
                vals.append(v)
            raw_label = row[label_pos]
            try:
                lv = float(raw_label)
            except ValueError:
                lv = None
            if lv not in (0.0, 1.0):
                raise ValueError(
                    f"{path}: row {lineno}, column '{schema.label_column}': "
                    f"label {raw_label!r} is not 0 or 1"
                )
            rows.append(vals)
            labels.append(int(lv))

    features = np.array(rows, dtype=float).reshape(len(rows), len(schema.feature_columns))
    return Dataset(
        column_names=tuple(schema.feature_columns),
        features=features,
        labels=np.array(labels, dtype=int),
    )


def write_csv(ds: Dataset, path, label_column: str = "label") -> None:
    """Write a Dataset back to CSV. Floats use shortest round-trip formatting."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ds.column_names) + [label_column])
        for i in range(ds.n_rows):
            writer.writerow([repr(float(v)) for v in ds.features[i]] + [int(ds.labels[i])])


def expand_interactions(ds: Dataset) -> Dataset:
    """Append the elementwise product of every unordered column pair.

    Output columns: the p originals followed by p(p-1)/2 products named "a×b".
    """
    if ds.n_features < 1:
        raise ValueError("need at least one feature column")
    X = ds.features
    names = list(ds.column_names)
    blocks = [X]
    for i in range(ds.n_features):
        for j in range(i + 1, ds.n_features):
            blocks.append((X[:, i] * X[:, j])[:, None])
            names.append(f"{ds.column_names[i]}×{ds.column_names[j]}")
    return Dataset(
        column_names=tuple(names),
        features=np.hstack(blocks),
        labels=ds.labels,
        weights=ds.weights,
    )


@dataclass(frozen=True)
class Standardizer:
    """Per-column centering/scaling statistics (population standard deviation)."""

    means: np.ndarray
    scales: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "means", np.asarray(self.means, dtype=float))
        object.__setattr__(self, "scales", np.asarray(self.scales, dtype=float))
        if self.means.shape != self.scales.shape or self.means.ndim != 1:
            raise ValueError("means and scales must be 1-D and the same length")
        if np.any(self.scales < 0):
            raise ValueError("scales must be non-negative")


def fit_standardizer(ds: Dataset) -> Standardizer:
    if ds.n_rows < 2:
        raise ValueError("need at least 2 rows to fit a standardizer")
    means = ds.features.mean(axis=0)
    scales = ds.features.std(axis=0)  # population (1/n) convention
    return Standardizer(means=means, scales=scales)


def apply_standardizer(st: Standardizer, ds: Dataset) -> Dataset:
    """Center by fitted means; divide by fitted scales, leaving zero-scale columns."""
    if st.means.shape[0] != ds.n_features:
        raise ValueError(
            f"standardizer fitted on {st.means.shape[0]} columns, dataset has {ds.n_features}"
        )
    X = ds.features - st.means
    nonzero = st.scales > 0
    X[:, nonzero] = X[:, nonzero] / st.scales[nonzero]
    return Dataset(
        column_names=ds.column_names,
        features=X,
        labels=ds.labels,
        weights=ds.weights,
        source_rows=ds.source_rows,
    )


def standardize_matrix(X: np.ndarray) -> np.ndarray:
    """Convenience for raw matrices: center and scale columns in place of a Dataset."""
    X = np.asarray(X, dtype=float)
    means = X.mean(axis=0)
    scales = X.std(axis=0)
    out = X - means
    nz = scales > 0
    out[:, nz] = out[:, nz] / scales[nz]
    return out
