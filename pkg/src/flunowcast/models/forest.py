"""Random forest regression on CART-style variance-reduction trees.

Trees split where the summed squared error of the two children is lowest;
leaves store the mean of their training targets, so every prediction is an
average of training-target means and stays inside the training range.
Determinism is total: per-tree streams come from the package RNG seeded by
``derive_seed(seed, tree_index)``, and split-gain ties (within 1e-12)
resolve to the lowest feature index, then the lowest threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import NoData, ShapeMismatch
from ..rng import Xorshift64Star, derive_seed

_TIE_EPS = 1e-12


@dataclass
class TreeNode:
    """Internal node (feature, threshold, children) or leaf (value)."""

    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def predict_one(self, x: np.ndarray) -> float:
        node = self
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.value

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"value": self.value}
        return {"feature": self.feature, "threshold": self.threshold,
                "left": self.left.to_dict(), "right": self.right.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "TreeNode":
        if "value" in data:
            return cls(value=float(data["value"]))
        return cls(feature=int(data["feature"]), threshold=float(data["threshold"]),
                   left=cls.from_dict(data["left"]), right=cls.from_dict(data["right"]))


@dataclass
class ForestModel:
    trees: list[TreeNode]
    n_trees: int
    max_depth: int | None
    min_leaf: int
    max_features: int
    bootstrap: bool
    seed: int
    n_features: int
    train_y_min: float = 0.0
    train_y_max: float = 0.0

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        one_row = X.ndim == 1
        if one_row:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise ShapeMismatch(f"model has {self.n_features} features, X has {X.shape[1]}")
        out = np.empty(X.shape[0])
        for i in range(X.shape[0]):
            out[i] = sum(t.predict_one(X[i]) for t in self.trees) / len(self.trees)
        return float(out[0]) if one_row else out


def _best_split(X: np.ndarray, y: np.ndarray, idx: np.ndarray,
                features: list[int], min_leaf: int):
    """Lowest-SSE split over the candidate features, or None.

    Returns (feature, threshold, left_idx, right_idx). Features are scanned
    in ascending index order so the tie rule (lowest feature, then lowest
    threshold) falls out of strict improvement comparisons.
    """
    y_node = y[idx]
    m = y_node.size
    total = y_node.sum()
    best = None
    best_sse = np.inf
    for f in features:
        col = X[idx, f]
        order = np.argsort(col, kind="stable")
        xs = col[order]
        ys = y_node[order]
        csum = np.cumsum(ys)
        csq = np.cumsum(ys * ys)
        # split after position k (1-based count on the left)
        ks = np.arange(min_leaf, m - min_leaf + 1)
        if ks.size == 0:
            continue
        valid = xs[ks - 1] < xs[ks]  # threshold must separate distinct values
        ks = ks[valid]
        if ks.size == 0:
            continue
        left_sum = csum[ks - 1]
        left_sq = csq[ks - 1]
        right_sum = total - left_sum
        right_sq = csq[-1] - left_sq
        sse = (left_sq - left_sum * left_sum / ks) + \
              (right_sq - right_sum * right_sum / (m - ks))
        # first candidate within the tie band == lowest threshold
        pick = int(np.argmax(sse <= sse.min() + _TIE_EPS))
        if sse[pick] < best_sse - _TIE_EPS:
            best_sse = float(sse[pick])
            k = int(ks[pick])
            threshold = 0.5 * (xs[k - 1] + xs[k])
            left_idx = idx[order[:k]]
            right_idx = idx[order[k:]]
            best = (f, threshold, left_idx, right_idx)
    return best


def _build_tree(X: np.ndarray, y: np.ndarray, idx: np.ndarray,
                depth: int, max_depth: int | None, min_leaf: int,
                max_features: int, rng: Xorshift64Star) -> TreeNode:
    y_node = y[idx]
    if (idx.size < 2 * min_leaf
            or (max_depth is not None and depth >= max_depth)
            or np.all(y_node == y_node[0])):
        return TreeNode(value=float(y_node.mean()))
    p = X.shape[1]
    features = sorted(rng.sample_without_replacement(p, min(max_features, p)))
    split = _best_split(X, y, idx, features, min_leaf)
    if split is None:
        return TreeNode(value=float(y_node.mean()))
    f, threshold, left_idx, right_idx = split
    return TreeNode(
        feature=f, threshold=threshold,
        left=_build_tree(X, y, left_idx, depth + 1, max_depth, min_leaf,
                         max_features, rng),
        right=_build_tree(X, y, right_idx, depth + 1, max_depth, min_leaf,
                          max_features, rng),
    )


def fit_forest(X, y, n_trees: int = 100, max_depth: int | None = None,
               min_leaf: int = 2, bootstrap: bool = True,
               max_features: int | None = None, seed: int = 0) -> ForestModel:
    """Grow ``n_trees`` deterministic CART trees; default feature subsample
    per split is ceil(p / 3)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if n == 0:
        raise NoData("fit_forest needs at least one row")
    if max_features is None:
        max_features = max(1, math.ceil(p / 3)) if p else 1
    trees = []
    for t in range(n_trees):
        rng = Xorshift64Star(derive_seed(seed, t))
        if bootstrap:
            idx = np.array([rng.randint(n) for _ in range(n)], dtype=int)
        else:
            idx = np.arange(n)
        trees.append(_build_tree(X, y, idx, 0, max_depth, min_leaf,
                                 max_features, rng))
    return ForestModel(trees=trees, n_trees=n_trees, max_depth=max_depth,
                       min_leaf=min_leaf, max_features=max_features,
                       bootstrap=bootstrap, seed=seed, n_features=p,
                       train_y_min=float(y.min()), train_y_max=float(y.max()))
