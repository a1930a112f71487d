"""Tree learners: CART on weighted Gini, bagged forests, second-order boosting.

All split search is exact greedy over midpoints between consecutive distinct
sorted feature values. Ties on split quality resolve to the lowest feature
index, then the lowest threshold, so refits are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class DecisionTree:
    """Binary tree in parallel-array form; feature == -1 marks a leaf.

    ``value`` holds the positive-class fraction for classification trees and
    the additive leaf weight for boosted regression trees.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_features: int

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf value for every row (rows go left when x[feature] < threshold)."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(
                f"tree was fit on {self.n_features} features, input has "
                f"{X.shape[1] if X.ndim == 2 else 'no'} columns"
            )
        idx = np.zeros(X.shape[0], dtype=int)
        pending = self.feature[idx] >= 0
        while np.any(pending):
            rows = np.flatnonzero(pending)
            nodes = idx[rows]
            go_left = X[rows, self.feature[nodes]] < self.threshold[nodes]
            idx[rows] = np.where(go_left, self.left[nodes], self.right[nodes])
            pending = self.feature[idx] >= 0
        return self.value[idx]


@dataclass(frozen=True, eq=False)
class ForestModel:
    trees: tuple
    mtry: int
    seed: int

    def __post_init__(self):
        if len(self.trees) < 1:
            raise ValueError("forest needs at least one tree")


@dataclass(frozen=True, eq=False)
class GbtModel:
    trees: tuple
    learning_rate: float
    base_score: float  # log-odds
    lambda_reg: float


def gini_impurity(labels, weights=None) -> float:
    """Weighted Gini impurity of a label vector (binary)."""
    y = np.asarray(labels, dtype=int)
    w = np.ones(y.size) if weights is None else np.asarray(weights, dtype=float)
    total = w.sum()
    if total <= 0:
        return 0.0
    w1 = w[y == 1].sum()
    f1 = w1 / total
    return float(1.0 - f1**2 - (1.0 - f1) ** 2)


def _best_split_gini(X, y, w, rows, features, min_leaf):
    """Best (feature, threshold) minimizing child-weighted Gini over candidates.

    Returns (feature, threshold, score) or None. score is the summed
    weighted child Gini; the caller rejects splits that fail to strictly
    improve on the parent.
    """
    m = rows.size
    best = None
    for f in features:
        v = X[rows, f]
        order = np.argsort(v, kind="mergesort")
        vs = v[order]
        ws = w[rows][order]
        ys = y[rows][order]
        w1 = np.cumsum(ws * ys)
        wt = np.cumsum(ws)
        w0 = wt - w1
        W1, WT = w1[-1], wt[-1]
        W0 = WT - W1

        cut = np.arange(1, m)  # left side has `cut` rows
        ok = (vs[1:] > vs[:-1]) & (cut >= min_leaf) & (m - cut >= min_leaf)
        if not np.any(ok):
            continue
        i = cut[ok] - 1
        wl = wt[i]
        wr = WT - wl
        # summed weighted Gini = WT - (purity_left + purity_right)
        purity = (w1[i] ** 2 + w0[i] ** 2) / wl + ((W1 - w1[i]) ** 2 + (W0 - w0[i]) ** 2) / wr
        j = int(np.argmax(purity))  # first max -> lowest threshold
        score = WT - purity[j]
        if best is None or score < best[2] - _EPS:
            thr = 0.5 * (vs[i[j]] + vs[i[j] + 1])
            best = (int(f), float(thr), float(score))
    return best


def _build_cart(X, y, w, rows, max_depth, min_leaf, mtry, rng):
    feature, threshold, left, right, value = [], [], [], [], []
    p = X.shape[1]

    def leaf_value(rr):
        ww = w[rr]
        return float(ww[y[rr] == 1].sum() / ww.sum())

    stack = [(rows, 0, None, None)]  # rows, depth, parent slot list, side
    while stack:
        rr, depth, parent, side = stack.pop()
        node_id = len(feature)
        if parent is not None:
            (left if side == "l" else right)[parent] = node_id
        ww = w[rr]
        wtot = ww.sum()
        w1 = ww[y[rr] == 1].sum()
        pure = w1 <= 0 or w1 >= wtot
        can_split = depth < max_depth and rr.size >= 2 * min_leaf and not pure
        split = None
        if can_split:
            if mtry < p:
                cand = np.sort(rng.choice(p, size=mtry, replace=False))
            else:
                cand = np.arange(p)
            # impure nodes split on the best candidate even at zero Gini gain:
            # XOR-style structure only separates after a gainless first cut
            split = _best_split_gini(X, y, w, rr, cand, min_leaf)
        if split is None:
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(leaf_value(rr))
            continue
        f, thr, _ = split
        feature.append(f)
        threshold.append(thr)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        mask = X[rr, f] < thr
        # push right first so the left child is built (and numbered) first
        stack.append((rr[~mask], depth + 1, node_id, "r"))
        stack.append((rr[mask], depth + 1, node_id, "l"))

    return DecisionTree(
        feature=np.array(feature, dtype=int),
        threshold=np.array(threshold),
        left=np.array(left, dtype=int),
        right=np.array(right, dtype=int),
        value=np.array(value),
        n_features=X.shape[1],
    )


def fit_cart(ds, max_depth: int = 12, min_leaf: int = 1, weights=None) -> DecisionTree:
    """Greedy classification tree minimizing weighted Gini impurity."""
    X, y = ds.features, ds.labels
    if ds.n_rows == 0:
        raise ValueError("cannot fit a tree on an empty dataset")
    if ds.n_rows < 2 * min_leaf:
        raise ValueError(f"need at least {2 * min_leaf} rows for min_leaf={min_leaf}")
    w = _resolve_weights(ds, weights)
    rows = np.arange(ds.n_rows)
    return _build_cart(X, y, w, rows, max_depth, min_leaf, mtry=X.shape[1], rng=None)


def _resolve_weights(ds, weights):
    if weights is not None:
        w = np.asarray(weights, dtype=float)
        if w.shape != (ds.n_rows,):
            raise ValueError("weights length does not match dataset rows")
        return w
    if ds.weights is not None:
        return ds.weights
    return np.ones(ds.n_rows)


def fit_forest(
    ds,
    n_trees: int = 200,
    mtry: Optional[int] = None,
    max_depth: int = 12,
    min_leaf: int = 1,
    weights=None,
    seed: int = 0,
    bootstrap: bool = True,
) -> ForestModel:
    """Bagged CART ensemble with per-split feature subsampling.

    Each tree sees a bootstrap resample (n draws with replacement) and
    considers mtry features per split; bootstrap=False is a test hook that
    trains every tree on the full data.
    """
    X = ds.features
    p = X.shape[1]
    if mtry is None:
        mtry = int(np.ceil(np.sqrt(p)))
    if mtry > p:
        raise ValueError(f"mtry={mtry} exceeds {p} features")
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    w = _resolve_weights(ds, weights)
    y = ds.labels
    trees = []
    for child in np.random.SeedSequence(seed).spawn(n_trees):
        rng = np.random.default_rng(child)
        if bootstrap:
            rows = np.sort(rng.integers(ds.n_rows, size=ds.n_rows))
        else:
            rows = np.arange(ds.n_rows)
        trees.append(_build_cart(X, y, w, rows, max_depth, min_leaf, mtry, rng))
    return ForestModel(trees=tuple(trees), mtry=mtry, seed=seed)


def _best_split_grad(X, g, h, rows, lambda_reg, min_leaf):
    """Best (feature, threshold, gain) under the second-order boosting gain."""
    m = rows.size
    best = None
    G = g[rows].sum()
    H = h[rows].sum()
    parent = G * G / (H + lambda_reg)
    for f in range(X.shape[1]):
        v = X[rows, f]
        order = np.argsort(v, kind="mergesort")
        vs = v[order]
        gs = np.cumsum(g[rows][order])
        hs = np.cumsum(h[rows][order])
        cut = np.arange(1, m)
        ok = (vs[1:] > vs[:-1]) & (cut >= min_leaf) & (m - cut >= min_leaf)
        if not np.any(ok):
            continue
        i = cut[ok] - 1
        gl, hl = gs[i], hs[i]
        gr, hr = G - gl, H - hl
        gain = 0.5 * (gl**2 / (hl + lambda_reg) + gr**2 / (hr + lambda_reg) - parent)
        j = int(np.argmax(gain))
        if gain[j] > _EPS and (best is None or gain[j] > best[2] + _EPS):
            thr = 0.5 * (vs[i[j]] + vs[i[j] + 1])
            best = (int(f), float(thr), float(gain[j]))
    return best


def _build_grad_tree(X, g, h, rows, max_depth, min_leaf, lambda_reg):
    feature, threshold, left, right, value = [], [], [], [], []
    stack = [(rows, 0, None, None)]
    while stack:
        rr, depth, parent, side = stack.pop()
        node_id = len(feature)
        if parent is not None:
            (left if side == "l" else right)[parent] = node_id
        split = None
        if depth < max_depth and rr.size >= 2 * min_leaf:
            split = _best_split_grad(X, g, h, rr, lambda_reg, min_leaf)
        if split is None:
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(float(-g[rr].sum() / (h[rr].sum() + lambda_reg)))
            continue
        f, thr, _ = split
        feature.append(f)
        threshold.append(thr)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        mask = X[rr, f] < thr
        stack.append((rr[~mask], depth + 1, node_id, "r"))
        stack.append((rr[mask], depth + 1, node_id, "l"))
    return DecisionTree(
        feature=np.array(feature, dtype=int),
        threshold=np.array(threshold),
        left=np.array(left, dtype=int),
        right=np.array(right, dtype=int),
        value=np.array(value),
        n_features=X.shape[1],
    )


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def fit_gbt(
    ds,
    n_rounds: int = 200,
    learning_rate: float = 0.1,
    max_depth: int = 4,
    lambda_reg: float = 1.0,
    min_leaf: int = 5,
    weights=None,
    seed: int = 0,
) -> GbtModel:
    """Boosted trees on the second-order expansion of weighted logistic loss.

    Round t fits a tree to g_i = w_i (p_i - y_i), h_i = w_i p_i (1 - p_i);
    leaf weights are -sum(g) / (sum(h) + lambda_reg).
    """
    if not 0 < learning_rate <= 1:
        raise ValueError("learning_rate must be in (0, 1]")
    if n_rounds < 0:
        raise ValueError("n_rounds must be >= 0")
    y = ds.labels.astype(float)
    if len(np.unique(ds.labels)) < 2:
        raise ValueError("both classes must be present")
    w = _resolve_weights(ds, None if weights is None else weights)
    X = ds.features

    base_rate = float((w * y).sum() / w.sum())
    base_score = float(np.log(base_rate / (1.0 - base_rate)))
    margin = np.full(ds.n_rows, base_score)
    rows = np.arange(ds.n_rows)
    trees = []
    for _ in range(n_rounds):
        p = _sigmoid(margin)
        g = w * (p - y)
        h = w * p * (1.0 - p)
        tree = _build_grad_tree(X, g, h, rows, max_depth, min_leaf, lambda_reg)
        trees.append(tree)
        margin += learning_rate * tree.apply(X)
    return GbtModel(
        trees=tuple(trees),
        learning_rate=learning_rate,
        base_score=base_score,
        lambda_reg=lambda_reg,
    )


def predict_proba(model, X) -> np.ndarray:
    """Positive-class probability: vote fraction (forest) or logistic margin (gbt)."""
    X = np.asarray(X, dtype=float)
    if isinstance(model, ForestModel):
        votes = np.zeros(X.shape[0])
        for tree in model.trees:
            votes += (tree.apply(X) >= 0.5).astype(float)
        return votes / len(model.trees)
    if isinstance(model, GbtModel):
        margin = np.full(X.shape[0], model.base_score)
        for tree in model.trees:
            margin += model.learning_rate * tree.apply(X)
        return _sigmoid(margin)
    if isinstance(model, DecisionTree):
        return model.apply(X)
    raise TypeError(f"unsupported model type {type(model).__name__}")
