"""Histogram-based regression trees.

Features are discretized once into at most ``max_bins`` ordered bins
(exact midpoint edges when a column has few distinct values, quantile cuts
otherwise). Split search then works on bin histograms of the target, so a
node costs O(rows + bins) per feature. Stored thresholds are raw feature
values, so prediction never needs the binning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_EPS_GAIN = 1e-12


@dataclass
class BinnedDesign:
    codes: np.ndarray          # (n, p) uint16 bin indices
    edges: list[np.ndarray]    # per feature, ascending split thresholds
    n_bins: np.ndarray         # per feature

    @property
    def n_rows(self) -> int:
        return self.codes.shape[0]


def bin_features(X: np.ndarray, max_bins: int = 256) -> BinnedDesign:
    X = np.asarray(X, dtype=float)
    n, p = X.shape
    codes = np.empty((n, p), dtype=np.uint16)
    edges = []
    n_bins = np.empty(p, dtype=np.int64)
    for j in range(p):
        col = X[:, j]
        uniq = np.unique(col)
        if uniq.size <= max_bins:
            e = (uniq[:-1] + uniq[1:]) / 2.0
        else:
            qs = np.quantile(col, np.linspace(0.0, 1.0, max_bins + 1)[1:-1])
            e = np.unique(qs)
        codes[:, j] = np.searchsorted(e, col, side="left")
        edges.append(e)
        n_bins[j] = e.size + 1
    return BinnedDesign(codes, edges, n_bins)


@dataclass
class Tree:
    feature: np.ndarray     # split feature per node, -1 for leaves
    threshold: np.ndarray   # raw-value split threshold (go left when <=)
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray       # leaf payload (0 for internal nodes)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            idx = np.flatnonzero(active)
            nd = node[idx]
            f = self.feature[nd]
            go_left = X[idx, f] <= self.threshold[nd]
            node[idx] = np.where(go_left, self.left[nd], self.right[nd])
            active = self.feature[node] >= 0
        return self.value[node]


def grow_tree(
    design: BinnedDesign,
    target: np.ndarray,
    rows: np.ndarray,
    max_depth: int | None,
    min_samples_leaf: int,
    feature_fraction: float = 1.0,
    rng: np.random.Generator | None = None,
) -> tuple[Tree, np.ndarray]:
    """Grow one tree on the given rows; returns the tree and its fitted
    value for every training row of ``design`` (rows outside ``rows`` get
    whatever leaf they route to)."""
    depth_cap = max_depth if max_depth is not None else 1 << 30
    p = design.codes.shape[1]
    n_sub = max(1, int(round(feature_fraction * p))) if feature_fraction < 1.0 else p

    feature, threshold, left, right, value = [], [], [], [], []
    leaf_rows: list[tuple[int, np.ndarray]] = []

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    root = new_node()
    stack = [(root, rows, 0)]
    while stack:
        node_id, idx, depth = stack.pop()
        g = target[idx]
        n = idx.size
        total = g.sum()
        if depth >= depth_cap or n < 2 * min_samples_leaf:
            value[node_id] = total / n
            leaf_rows.append((node_id, idx))
            continue

        if n_sub < p:
            cand = rng.choice(p, size=n_sub, replace=False)
        else:
            cand = range(p)

        best_gain = _EPS_GAIN
        best = None
        base = total * total / n
        for j in cand:
            nb = int(design.n_bins[j])
            if nb < 2:
                continue
            code = design.codes[idx, j]
            counts = np.bincount(code, minlength=nb)
            sums = np.bincount(code, weights=g, minlength=nb)
            nl = np.cumsum(counts)[:-1]
            gl = np.cumsum(sums)[:-1]
            nr = n - nl
            ok = (nl >= min_samples_leaf) & (nr >= min_samples_leaf)
            if not ok.any():
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                score = gl * gl / nl + (total - gl) * (total - gl) / nr
            score = np.where(ok, score, -np.inf)
            b = int(np.argmax(score))
            gain = score[b] - base
            if gain > best_gain:
                best_gain = gain
                best = (int(j), b)

        if best is None:
            value[node_id] = total / n
            leaf_rows.append((node_id, idx))
            continue

        j, b = best
        go_left = design.codes[idx, j] <= b
        l_id, r_id = new_node(), new_node()
        feature[node_id] = j
        threshold[node_id] = float(design.edges[j][b])
        left[node_id] = l_id
        right[node_id] = r_id
        stack.append((r_id, idx[~go_left], depth + 1))
        stack.append((l_id, idx[go_left], depth + 1))

    tree = Tree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=float),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        value=np.asarray(value, dtype=float),
    )
    fitted = np.zeros(design.n_rows)
    for node_id, idx in leaf_rows:
        fitted[idx] = value[node_id]
    return tree, fitted
