"""Tree ensembles: bagged random forests and gradient-boosted trees.

Both are built on the histogram tree in :mod:`.tree`. Boosting minimizes
squared error, so each round fits a tree to the current residuals and leaf
values are residual means; with a learning rate in (0, 1] the training loss
is non-increasing round over round, and the model keeps the per-round loss
curve for inspection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tree import BinnedDesign, Tree, bin_features, grow_tree


@dataclass
class RandomForestModel:
    trees: list[Tree]
    schema: tuple[str, ...] | None = None

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.zeros(X.shape[0])
        for t in self.trees:
            out += t.predict(X)
        return out / len(self.trees)


def fit_forest(
    X,
    y,
    n_trees: int = 200,
    max_depth: int | None = None,
    min_samples_leaf: int = 1,
    feature_subsample: float = 1.0,
    bootstrap: bool = True,
    seed: int = 0,
    max_bins: int = 256,
    schema=None,
) -> RandomForestModel:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    design = bin_features(X, max_bins)
    rng = np.random.default_rng(seed)
    n = X.shape[0]
    trees = []
    for _ in range(n_trees):
        rows = rng.integers(0, n, n) if bootstrap else np.arange(n)
        tree, _ = grow_tree(
            design, y, rows, max_depth, min_samples_leaf, feature_subsample, rng
        )
        trees.append(tree)
    return RandomForestModel(trees, schema)


@dataclass
class GradientBoostingModel:
    base_score: float
    learning_rate: float
    trees: list[Tree]
    train_losses: list[float] = field(default_factory=list)
    schema: tuple[str, ...] | None = None

    def predict(self, X) -> np.ndarray:
        return self.predict_staged(X, len(self.trees))

    def predict_staged(self, X, n_rounds: int) -> np.ndarray:
        """Prediction truncated to the first ``n_rounds`` trees."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.full(X.shape[0], self.base_score)
        for t in self.trees[:n_rounds]:
            out += self.learning_rate * t.predict(X)
        return out


def fit_gbt(
    X,
    y,
    n_rounds: int = 400,
    learning_rate: float = 0.1,
    max_depth: int = 6,
    min_samples_leaf: int = 20,
    feature_subsample: float = 1.0,
    seed: int = 0,
    max_bins: int = 256,
    schema=None,
) -> GradientBoostingModel:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    if not (0.0 < learning_rate <= 1.0):
        raise ValueError("learning rate must be in (0, 1]")
    design = bin_features(X, max_bins)
    rng = np.random.default_rng(seed)
    rows = np.arange(X.shape[0])

    base = float(y.mean())
    pred = np.full(y.shape[0], base)
    trees = []
    losses = []
    for _ in range(n_rounds):
        residual = y - pred
        tree, fitted = grow_tree(
            design, residual, rows, max_depth, min_samples_leaf, feature_subsample, rng
        )
        trees.append(tree)
        pred += learning_rate * fitted
        losses.append(float(np.mean((y - pred) ** 2)))
    return GradientBoostingModel(base, learning_rate, trees, losses, schema)
