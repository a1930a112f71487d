"""Anomaly detectors with one score orientation: higher means more anomalous.

Local outlier factor, mean k-neighbor distance, angle-based outlier factors
(negated, since low raw values flag outliers), Mahalanobis distances from
classical or minimum-determinant robust estimates, isolation forests, and a
bottlenecked autoencoder scored by reconstruction error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

_ABOF_ROW_CAP = 2_000  # the pairwise-angle factor is O(n^3); refuse beyond this


@dataclass(frozen=True, eq=False)
class AnomalyScores:
    """Per-observation scores; by convention larger values are more anomalous."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 1:
            raise ValueError("scores must be 1-D")
        if not np.all(np.isfinite(v)):
            raise ValueError("scores must be finite")

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class RobustLocation:
    """Location/scatter estimate with its determinant, for distance scoring."""

    mean_vector: np.ndarray
    covariance: np.ndarray
    det: float
    regularized: bool = False


# ---------------------------------------------------------------------------
# neighbor machinery

def _pairwise_sq_dist(A, B):
    sq_a = np.sum(A * A, axis=1)[:, None]
    sq_b = np.sum(B * B, axis=1)[None, :]
    return np.maximum(sq_a + sq_b - 2.0 * (A @ B.T), 0.0)


def _knn(reference, query, k, exclude_self, chunk=512):
    """Indices and distances of each query row's k nearest reference rows.

    exclude_self skips the reference row with the same index as the query row
    (valid only when query is the reference set itself).
    """
    nr = reference.shape[0]
    nq = query.shape[0]
    idx = np.empty((nq, k), dtype=int)
    dist = np.empty((nq, k))
    for start in range(0, nq, chunk):
        stop = min(start + chunk, nq)
        d2 = _pairwise_sq_dist(query[start:stop], reference)
        if exclude_self:
            rows = np.arange(start, stop)
            d2[np.arange(stop - start), rows] = np.inf
        part = np.argpartition(d2, k - 1, axis=1)[:, :k]
        part_d = np.take_along_axis(d2, part, axis=1)
        order = np.argsort(part_d, axis=1, kind="stable")
        idx[start:stop] = np.take_along_axis(part, order, axis=1)
        dist[start:stop] = np.sqrt(np.take_along_axis(part_d, order, axis=1))
    return idx, dist


def _validate_matrix(X):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be a 2-D matrix")
    if not np.all(np.isfinite(X)):
        raise ValueError("X must be finite")
    return X


_TINY = 1e-12  # keeps reachability-density ratios finite for duplicate points


def _lof_reference(X, k):
    """k-distances, neighbor lists and local reachability densities of X itself."""
    idx, dist = _knn(X, X, k, exclude_self=True)
    kdist = dist[:, -1]
    reach = np.maximum(kdist[idx], dist)
    lrd = 1.0 / (reach.mean(axis=1) + _TINY)
    return idx, kdist, lrd


def lof(X, k: int) -> AnomalyScores:
    """Local outlier factor of every row of X among the other rows."""
    X = _validate_matrix(X)
    n = X.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < n, got k={k}, n={n}")
    idx, _, lrd = _lof_reference(X, k)
    return AnomalyScores(lrd[idx].mean(axis=1) / lrd)


def lof_scores(reference, X, k: int) -> AnomalyScores:
    """Local outlier factor of new rows X relative to a reference set."""
    reference = _validate_matrix(reference)
    X = _validate_matrix(X)
    if not 1 <= k < reference.shape[0]:
        raise ValueError(f"k must satisfy 1 <= k < reference rows")
    _, kdist, lrd_ref = _lof_reference(reference, k)
    idx, dist = _knn(reference, X, k, exclude_self=False)
    reach = np.maximum(kdist[idx], dist)
    lrd = 1.0 / (reach.mean(axis=1) + _TINY)
    return AnomalyScores(lrd_ref[idx].mean(axis=1) / lrd)


def knn_score(X, k: int) -> AnomalyScores:
    """Mean Euclidean distance from each row to its k nearest other rows."""
    X = _validate_matrix(X)
    n = X.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < n, got k={k}, n={n}")
    _, dist = _knn(X, X, k, exclude_self=True)
    return AnomalyScores(dist.mean(axis=1))


def knn_scores(reference, X, k: int) -> AnomalyScores:
    reference = _validate_matrix(reference)
    X = _validate_matrix(X)
    if not 1 <= k < reference.shape[0]:
        raise ValueError("k must satisfy 1 <= k < reference rows")
    _, dist = _knn(reference, X, k, exclude_self=False)
    return AnomalyScores(dist.mean(axis=1))


# ---------------------------------------------------------------------------
# angle-based factor

def _abof_one(vectors):
    """Raw angle factor for one observation given difference vectors to others.

    Variance over unordered pairs (i < j) of <v_i, v_j> / (|v_i|^2 |v_j|^2).
    Coincident points (zero vectors) are skipped.
    """
    sq = np.sum(vectors * vectors, axis=1)
    keep = sq > 0
    v = vectors[keep]
    sq = sq[keep]
    m = v.shape[0]
    n_pairs = m * (m - 1) // 2
    if n_pairs < 1:
        return 0.0
    W = (v @ v.T) / np.outer(sq, sq)
    diag = 1.0 / sq  # W_ii = |v_i|^2 / |v_i|^4
    s1 = (W.sum() - diag.sum()) / 2.0
    s2 = ((W * W).sum() - (diag * diag).sum()) / 2.0
    mean = s1 / n_pairs
    return float(s2 / n_pairs - mean * mean)


def abof_raw(X) -> np.ndarray:
    """Raw angle-based factors (small values flag outliers)."""
    X = _validate_matrix(X)
    n = X.shape[0]
    if n < 3:
        raise ValueError("angle-based factors need at least 3 observations")
    if n > _ABOF_ROW_CAP:
        raise ValueError(
            f"angle-based scoring is O(n^3) and capped at {_ABOF_ROW_CAP} rows, got {n}"
        )
    out = np.empty(n)
    mask = np.ones(n, dtype=bool)
    for a in range(n):
        mask[a] = False
        out[a] = _abof_one(X[mask] - X[a])
        mask[a] = True
    return out


def abof(X) -> AnomalyScores:
    """Negated raw angle factor, so larger values are more anomalous."""
    return AnomalyScores(-abof_raw(X))


def abof_scores(reference, X) -> AnomalyScores:
    """Angle factor of new rows against a reference set, negated."""
    reference = _validate_matrix(reference)
    X = _validate_matrix(X)
    if reference.shape[0] < 2:
        raise ValueError("need at least 2 reference rows")
    if reference.shape[0] > _ABOF_ROW_CAP:
        raise ValueError(f"reference exceeds the {_ABOF_ROW_CAP}-row cap")
    out = np.empty(X.shape[0])
    for i in range(X.shape[0]):
        out[i] = _abof_one(reference - X[i])
    return AnomalyScores(-out)


# ---------------------------------------------------------------------------
# Mahalanobis, classical and robust

def _location_from_rows(X, regularize=True):
    mean = X.mean(axis=0)
    cov = np.cov(X, rowvar=False, ddof=0)
    cov = np.atleast_2d(cov)
    regularized = False
    if regularize:
        p = cov.shape[0]
        scale = np.trace(cov) / p
        eigvals = np.linalg.eigvalsh(cov)
        if scale <= 0 or eigvals[0] <= 1e-12 * scale:
            cov = cov + (1e-8 * max(scale, 1.0)) * np.eye(p)
            regularized = True
    return mean, cov, regularized


def classical_fit(X) -> RobustLocation:
    """Mean and population covariance of all rows, regularized if near-singular."""
    X = _validate_matrix(X)
    if X.shape[0] < 2:
        raise ValueError("need at least 2 rows")
    mean, cov, reg = _location_from_rows(X)
    return RobustLocation(
        mean_vector=mean, covariance=cov, det=float(np.linalg.det(cov)), regularized=reg
    )


def mahalanobis_scores(loc: RobustLocation, X) -> AnomalyScores:
    """Squared Mahalanobis distance of each row from the location estimate."""
    X = _validate_matrix(X)
    if X.shape[1] != loc.mean_vector.shape[0]:
        raise ValueError(
            f"location has {loc.mean_vector.shape[0]} dimensions, X has {X.shape[1]}"
        )
    diff = X - loc.mean_vector
    try:
        solved = np.linalg.solve(loc.covariance, diff.T)
    except np.linalg.LinAlgError:
        raise ValueError("singular covariance; refit with regularization") from None
    d2 = np.einsum("ij,ji->i", diff, solved)
    return AnomalyScores(d2)


def chi2_cutoff(alpha: float, dof: int) -> float:
    """Upper chi-square quantile used as the outlier cutoff for D^2 scores."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    if dof < 1:
        raise ValueError("dof must be >= 1")
    return float(stats.chi2.ppf(1.0 - alpha, dof))


def mcd_fit(
    X,
    h: Optional[int] = None,
    n_subsamples: int = 500,
    seed: int = 0,
    concentration_steps: int = 2,
) -> RobustLocation:
    """Location/scatter of the size-h subset with minimal covariance determinant.

    Random size-h subsets are each refined by concentration steps (keep the h
    points closest in Mahalanobis distance, refit) and the lowest-determinant
    candidate wins. h defaults to ceil((n + p + 1) / 2).
    """
    X = _validate_matrix(X)
    n, p = X.shape
    if h is None:
        h = int(math.ceil((n + p + 1) / 2))
    if h > n:
        raise ValueError(f"h={h} exceeds n={n}")
    if h <= p:
        raise ValueError(f"h={h} must exceed the dimension p={p}")
    rng = np.random.default_rng(seed)

    best = None
    for _ in range(n_subsamples):
        subset = rng.choice(n, size=h, replace=False)
        for _ in range(concentration_steps):
            mean, cov, _ = _location_from_rows(X[subset])
            solved = np.linalg.solve(cov, (X - mean).T)
            d2 = np.einsum("ij,ji->i", X - mean, solved)
            subset = np.argsort(d2, kind="stable")[:h]
        mean, cov, reg = _location_from_rows(X[subset])
        det = float(np.linalg.det(cov))
        if best is None or det < best[0]:
            best = (det, mean, cov, reg)
    det, mean, cov, reg = best
    return RobustLocation(mean_vector=mean, covariance=cov, det=det, regularized=reg)


# ---------------------------------------------------------------------------
# isolation forest

def _harmonic(m: int) -> float:
    return float(np.sum(1.0 / np.arange(1, m + 1)))


def average_path_length(m: int) -> float:
    """Expected unsuccessful-search path length c(m) in a tree over m points."""
    if m <= 1:
        return 0.0
    return 2.0 * _harmonic(m - 1) - 2.0 * (m - 1) / m


@dataclass(frozen=True, eq=False)
class IsolationTree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    depth: np.ndarray
    adjust: np.ndarray  # c(m) correction at external nodes

    def path_lengths(self, X):
        idx = np.zeros(X.shape[0], dtype=int)
        pending = self.feature[idx] >= 0
        while np.any(pending):
            rows = np.flatnonzero(pending)
            nodes = idx[rows]
            go_left = X[rows, self.feature[nodes]] < self.threshold[nodes]
            idx[rows] = np.where(go_left, self.left[nodes], self.right[nodes])
            pending = self.feature[idx] >= 0
        return self.depth[idx] + self.adjust[idx]


@dataclass(frozen=True, eq=False)
class IsolationForestModel:
    trees: tuple
    subsample_size: int
    normalizer: float  # c(subsample_size)
    n_features: int


def _fit_isolation_tree(X, rows, depth_cap, rng):
    feature, threshold, left, right, depth, adjust = [], [], [], [], [], []
    stack = [(rows, 0, None, None)]
    while stack:
        rr, d, parent, side = stack.pop()
        node_id = len(feature)
        if parent is not None:
            (left if side == "l" else right)[parent] = node_id
        sub = X[rr]
        lo = sub.min(axis=0)
        hi = sub.max(axis=0)
        splittable = np.flatnonzero(hi > lo)
        if rr.size <= 1 or d >= depth_cap or splittable.size == 0:
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            depth.append(d)
            adjust.append(average_path_length(rr.size))
            continue
        f = int(splittable[rng.integers(splittable.size)])
        cut = rng.uniform(lo[f], hi[f])
        feature.append(f)
        threshold.append(cut)
        left.append(-1)
        right.append(-1)
        depth.append(d)
        adjust.append(0.0)
        mask = X[rr, f] < cut
        stack.append((rr[~mask], d + 1, node_id, "r"))
        stack.append((rr[mask], d + 1, node_id, "l"))
    return IsolationTree(
        feature=np.array(feature, dtype=int),
        threshold=np.array(threshold),
        left=np.array(left, dtype=int),
        right=np.array(right, dtype=int),
        depth=np.array(depth, dtype=float),
        adjust=np.array(adjust),
    )


def iforest_fit(X, n_trees: int = 100, subsample_size: int = 256, seed: int = 0) -> IsolationForestModel:
    X = _validate_matrix(X)
    n = X.shape[0]
    if n < 2:
        raise ValueError("need at least 2 rows")
    if subsample_size < 2:
        raise ValueError("subsample_size must be >= 2")
    psi = min(subsample_size, n)
    depth_cap = int(math.ceil(math.log2(psi)))
    trees = []
    for child in np.random.SeedSequence(seed).spawn(n_trees):
        rng = np.random.default_rng(child)
        rows = rng.choice(n, size=psi, replace=False)
        trees.append(_fit_isolation_tree(X, rows, depth_cap, rng))
    return IsolationForestModel(
        trees=tuple(trees),
        subsample_size=psi,
        normalizer=average_path_length(psi),
        n_features=X.shape[1],
    )


def iforest_scores(model: IsolationForestModel, X) -> AnomalyScores:
    """Normalized scores 2^(-E[h]/c(psi)); short isolation paths score high."""
    X = _validate_matrix(X)
    if X.shape[1] != model.n_features:
        raise ValueError(f"model expects {model.n_features} features, got {X.shape[1]}")
    total = np.zeros(X.shape[0])
    for tree in model.trees:
        total += tree.path_lengths(X)
    mean_path = total / len(model.trees)
    return AnomalyScores(np.power(2.0, -mean_path / model.normalizer))


def isolation_forest(X, n_trees: int = 100, subsample_size: int = 256, seed: int = 0) -> AnomalyScores:
    model = iforest_fit(X, n_trees=n_trees, subsample_size=subsample_size, seed=seed)
    return iforest_scores(model, X)


# ---------------------------------------------------------------------------
# autoencoder

@dataclass(frozen=True, eq=False)
class AeModel:
    layer_sizes: tuple
    weights: tuple
    biases: tuple
    final_loss: float = float("nan")


def _ae_stack(p: int, encoder_sizes) -> tuple:
    if encoder_sizes is None:
        h1 = max(4, math.ceil(p / 2))
        bottleneck = max(2, math.ceil(p / 4))
        encoder_sizes = (h1, bottleneck)
    encoder_sizes = tuple(int(s) for s in encoder_sizes)
    if min(encoder_sizes) >= p:
        raise ValueError(
            f"bottleneck {min(encoder_sizes)} must be narrower than the input width {p}"
        )
    return (p, *encoder_sizes, *encoder_sizes[-2::-1], p)


def _ae_init(layer_sizes, seed):
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def _ae_forward(weights, biases, X):
    acts = [X]
    a = X
    last = len(weights) - 1
    for i, (W, b) in enumerate(zip(weights, biases)):
        z = a @ W + b
        a = z if i == last else np.tanh(z)  # linear output layer
        acts.append(a)
    return acts


def _ae_loss_grad(weights, biases, X):
    acts = _ae_forward(weights, biases, X)
    n, p = X.shape
    err = acts[-1] - X
    loss = float(np.mean(err * err))
    delta = 2.0 * err / (n * p)
    grads_w = [None] * len(weights)
    grads_b = [None] * len(weights)
    for i in range(len(weights) - 1, -1, -1):
        grads_w[i] = acts[i].T @ delta
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ weights[i].T) * (1.0 - acts[i] ** 2)  # tanh'
    return loss, grads_w, grads_b


def autoencoder_fit(
    X_normal,
    layer_sizes=None,
    epochs: int = 200,
    learning_rate: float = 0.05,
    seed: int = 0,
    momentum: float = 0.9,
) -> AeModel:
    """Train a mirrored tanh autoencoder on presumed-normal rows.

    layer_sizes gives the encoder widths after the input layer, e.g. (4, 2);
    the decoder mirrors them. Full-batch gradient descent with momentum.
    """
    X = _validate_matrix(X_normal)
    stack = _ae_stack(X.shape[1], layer_sizes)
    weights, biases = _ae_init(stack, seed)
    vel_w = [np.zeros_like(W) for W in weights]
    vel_b = [np.zeros_like(b) for b in biases]
    loss = float("nan")
    for _ in range(epochs):
        loss, gw, gb = _ae_loss_grad(weights, biases, X)
        for i in range(len(weights)):
            vel_w[i] = momentum * vel_w[i] - learning_rate * gw[i]
            vel_b[i] = momentum * vel_b[i] - learning_rate * gb[i]
            weights[i] = weights[i] + vel_w[i]
            biases[i] = biases[i] + vel_b[i]
    return AeModel(
        layer_sizes=stack,
        weights=tuple(weights),
        biases=tuple(biases),
        final_loss=loss,
    )


def reconstruction_error(model: AeModel, X) -> AnomalyScores:
    """Per-row mean squared reconstruction error."""
    X = _validate_matrix(X)
    if X.shape[1] != model.layer_sizes[0]:
        raise ValueError(
            f"model expects {model.layer_sizes[0]} features, got {X.shape[1]}"
        )
    recon = _ae_forward(list(model.weights), list(model.biases), X)[-1]
    return AnomalyScores(np.mean((recon - X) ** 2, axis=1))


def ae_flatten(model: AeModel) -> np.ndarray:
    """All parameters as one vector (for finite-difference gradient checks)."""
    parts = [w.ravel() for w in model.weights] + [b.ravel() for b in model.biases]
    return np.concatenate(parts)


def ae_loss_and_grad(layer_sizes, flat_params, X) -> tuple:
    """Loss and flat analytic gradient at an arbitrary parameter vector."""
    sizes = tuple(layer_sizes)
    weights, biases = [], []
    pos = 0
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        weights.append(flat_params[pos : pos + fan_in * fan_out].reshape(fan_in, fan_out))
        pos += fan_in * fan_out
    for fan_out in sizes[1:]:
        biases.append(flat_params[pos : pos + fan_out])
        pos += fan_out
    loss, gw, gb = _ae_loss_grad(weights, biases, np.asarray(X, dtype=float))
    grad = np.concatenate([g.ravel() for g in gw] + [g.ravel() for g in gb])
    return loss, grad


# ---------------------------------------------------------------------------
# thresholds

def threshold_from_scores(train_scores, method: str, q: Optional[float] = None, labels=None) -> float:
    """Pick a decision threshold from scores seen during training.

    method "contamination_quantile": the (1 - q) empirical quantile (an order
    statistic). method "f1_max": the threshold maximizing F1 of the rule
    score >= threshold against the supplied labels, lowest threshold on ties.
    """
    s = np.asarray(train_scores, dtype=float)
    if s.size == 0:
        raise ValueError("scores must be non-empty")
    if method == "contamination_quantile":
        if q is None or not 0 < q < 1:
            raise ValueError("contamination q must be in (0, 1)")
        n = s.size
        rank = int(math.ceil((1.0 - q) * n - 1e-9))
        rank = min(max(rank, 1), n)
        return float(np.sort(s, kind="stable")[rank - 1])
    if method == "f1_max":
        if labels is None:
            raise ValueError("f1_max requires labels")
        y = np.asarray(labels, dtype=int)
        if y.shape != s.shape:
            raise ValueError("labels must match scores in length")
        n_pos = int(np.sum(y == 1))
        if n_pos == 0 or n_pos == y.size:
            raise ValueError("f1_max needs both classes in the labels")
        order = np.argsort(s, kind="stable")
        ss, ys = s[order], y[order]
        # group starts of each distinct value, ascending
        starts = np.flatnonzero(np.concatenate(([True], ss[1:] > ss[:-1])))
        pos_below = np.concatenate(([0], np.cumsum(ys)))[starts]
        tp = n_pos - pos_below
        predicted_pos = s.size - starts
        f1 = 2.0 * tp / (predicted_pos + n_pos)
        best = int(np.argmax(f1))  # first max -> lowest threshold
        return float(ss[starts[best]])
    raise ValueError(f"unknown threshold method {method!r}")


# ---------------------------------------------------------------------------
# detector registry (used by the cross-validation and benchmark layers)

class Detector:
    """fit / score_train / score wrapper giving every method one interface."""

    name = "base"
    trains_on_negatives_only = False

    def fit(self, X, labels=None):
        raise NotImplementedError

    def score_train(self) -> np.ndarray:
        raise NotImplementedError

    def score(self, X) -> np.ndarray:
        raise NotImplementedError


class _LofDetector(Detector):
    name = "lof"

    def __init__(self, k=20):
        self.k = k

    def fit(self, X, labels=None):
        self.X = _validate_matrix(X)
        self.k_eff = min(self.k, self.X.shape[0] - 1)
        return self

    def score_train(self):
        return lof(self.X, self.k_eff).values

    def score(self, X):
        return lof_scores(self.X, X, self.k_eff).values


class _KnnDetector(Detector):
    name = "knn"

    def __init__(self, k=20):
        self.k = k

    def fit(self, X, labels=None):
        self.X = _validate_matrix(X)
        self.k_eff = min(self.k, self.X.shape[0] - 1)
        return self

    def score_train(self):
        return knn_score(self.X, self.k_eff).values

    def score(self, X):
        return knn_scores(self.X, X, self.k_eff).values


class _AbofDetector(Detector):
    name = "abof"

    def fit(self, X, labels=None):
        self.X = _validate_matrix(X)
        return self

    def score_train(self):
        return abof(self.X).values

    def score(self, X):
        return abof_scores(self.X, X).values


class _MahalanobisDetector(Detector):
    name = "mahalanobis"

    def fit(self, X, labels=None):
        self.loc = classical_fit(X)
        self.X = X
        return self

    def score_train(self):
        return mahalanobis_scores(self.loc, self.X).values

    def score(self, X):
        return mahalanobis_scores(self.loc, X).values


class _McdDetector(Detector):
    name = "mcd"

    def __init__(self, n_subsamples=500, seed=0):
        self.n_subsamples = n_subsamples
        self.seed = seed

    def fit(self, X, labels=None):
        self.loc = mcd_fit(X, n_subsamples=self.n_subsamples, seed=self.seed)
        self.X = X
        return self

    def score_train(self):
        return mahalanobis_scores(self.loc, self.X).values

    def score(self, X):
        return mahalanobis_scores(self.loc, X).values


class _IforestDetector(Detector):
    name = "iforest"

    def __init__(self, n_trees=100, subsample_size=256, seed=0):
        self.n_trees = n_trees
        self.subsample_size = subsample_size
        self.seed = seed

    def fit(self, X, labels=None):
        self.model = iforest_fit(
            X, n_trees=self.n_trees, subsample_size=self.subsample_size, seed=self.seed
        )
        self.X = X
        return self

    def score_train(self):
        return iforest_scores(self.model, self.X).values

    def score(self, X):
        return iforest_scores(self.model, X).values


class _AutoencoderDetector(Detector):
    name = "autoencoder"
    trains_on_negatives_only = True

    def __init__(self, layer_sizes=None, epochs=200, learning_rate=0.05, seed=0):
        self.layer_sizes = layer_sizes
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.seed = seed

    def fit(self, X, labels=None):
        X = _validate_matrix(X)
        if labels is not None:
            normal = X[np.asarray(labels, dtype=int) == 0]
        else:
            normal = X
        if normal.shape[0] < 2:
            raise ValueError("need at least 2 normal rows to train the autoencoder")
        self.model = autoencoder_fit(
            normal,
            layer_sizes=self.layer_sizes,
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            seed=self.seed,
        )
        self.X = X
        return self

    def score_train(self):
        return reconstruction_error(self.model, self.X).values

    def score(self, X):
        return reconstruction_error(self.model, X).values


_DETECTORS = {
    "lof": _LofDetector,
    "knn": _KnnDetector,
    "abof": _AbofDetector,
    "mahalanobis": _MahalanobisDetector,
    "mcd": _McdDetector,
    "iforest": _IforestDetector,
    "autoencoder": _AutoencoderDetector,
}

DETECTOR_NAMES = tuple(sorted(_DETECTORS))


def make_detector(name: str, **params) -> Detector:
    if name not in _DETECTORS:
        raise ValueError(f"unknown detector {name!r}; choose from {DETECTOR_NAMES}")
    return _DETECTORS[name](**params)
