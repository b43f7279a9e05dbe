"""Cross-validation and the seeded multi-architecture benchmark."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..metrics import MetricReport
from . import fit as _fit_dispatch


def cross_validate(spec, X, y, k: int = 4, mode: str = "shuffled", seed: int = 0) -> MetricReport:
    """k-fold validation returning metrics pooled over out-of-fold predictions.

    shuffled: a seeded permutation is split into k folds and every row is
    scored exactly once. chronological: rows are split into k contiguous
    blocks in time order and each block from the second onward is predicted
    by a model trained on all earlier blocks, so validation indices always
    follow their training data; the first block is never scored.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if not 2 <= k <= n:
        raise ValueError(f"k must be between 2 and {n}")
    if mode not in ("shuffled", "chronological"):
        raise ValueError(f"unknown mode {mode!r}")

    bounds = np.linspace(0, n, k + 1).astype(int)
    y_true_parts, y_pred_parts = [], []
    if mode == "shuffled":
        order = np.random.default_rng(seed).permutation(n)
        for i in range(k):
            val = order[bounds[i] : bounds[i + 1]]
            train = np.concatenate([order[: bounds[i]], order[bounds[i + 1] :]])
            model = _fit_dispatch(spec, X[train], y[train])
            y_true_parts.append(y[val])
            y_pred_parts.append(model.predict(X[val]))
    else:
        for i in range(1, k):
            train = np.arange(0, bounds[i])
            val = np.arange(bounds[i], bounds[i + 1])
            model = _fit_dispatch(spec, X[train], y[train])
            y_true_parts.append(y[val])
            y_pred_parts.append(model.predict(X[val]))

    return MetricReport.from_predictions(
        np.concatenate(y_true_parts), np.concatenate(y_pred_parts)
    )


@dataclass(frozen=True)
class BenchmarkEntry:
    label: str
    mape_mean: float
    mape_std: float
    mae_mean: float
    mae_std: float
    r2_mean: float
    r2_std: float


@dataclass(frozen=True)
class BenchmarkResult:
    entries: tuple[BenchmarkEntry, ...]
    winner: str
    n_train: int
    n_test: int

    def table(self) -> str:
        w = max(len(e.label) for e in self.entries)
        lines = [
            f"{'model':<{w}}  {'MAPE %':>14}  {'MAE':>14}  {'R2':>14}",
        ]
        for e in sorted(self.entries, key=lambda e: e.mape_mean):
            mark = " *" if e.label == self.winner else ""
            lines.append(
                f"{e.label:<{w}}  {e.mape_mean:8.3f}±{e.mape_std:<5.3f}  "
                f"{e.mae_mean:8.3f}±{e.mae_std:<5.3f}  {e.r2_mean:8.4f}±{e.r2_std:<5.4f}{mark}"
            )
        return "\n".join(lines)


def benchmark(specs, dataset, target_channel: str, n_seeds: int = 5, train_fraction: float = 0.75) -> BenchmarkResult:
    """Train every spec on one shared chronological split of the
    instantaneous design (parameters at time t against the target channel),
    refitting across seeds, and rank architectures by mean test MAPE."""
    specs = list(specs)
    if not specs:
        raise ValueError("no regressor specs to benchmark")
    if target_channel not in dataset.emissions:
        raise ValueError(f"no emission channel {target_channel!r}")

    ok = dataset.row_all_valid()
    X = dataset.params[ok]
    y = dataset.emissions[target_channel][ok]
    n = X.shape[0]
    cut = int(train_fraction * n)
    if cut < 1 or cut >= n:
        raise ValueError("split leaves an empty train or test side")
    Xtr, ytr, Xte, yte = X[:cut], y[:cut], X[cut:], y[cut:]

    labels = []
    counts: dict[str, int] = {}
    for s in specs:
        base = s.family.value
        counts[base] = counts.get(base, 0) + 1
        labels.append(base if counts[base] == 1 else f"{base}#{counts[base]}")

    entries = []
    for label, spec in zip(labels, specs):
        mapes, maes, r2s = [], [], []
        for i in range(n_seeds):
            model = _fit_dispatch(spec.reseeded(spec.seed + i), Xtr, ytr)
            rep = MetricReport.from_predictions(yte, model.predict(Xte))
            mapes.append(rep.mape)
            maes.append(rep.mae)
            r2s.append(rep.r2)
        entries.append(
            BenchmarkEntry(
                label=label,
                mape_mean=float(np.mean(mapes)),
                mape_std=float(np.std(mapes)),
                mae_mean=float(np.mean(maes)),
                mae_std=float(np.std(maes)),
                r2_mean=float(np.mean(r2s)),
                r2_std=float(np.std(r2s)),
            )
        )
    winner = min(entries, key=lambda e: e.mape_mean).label
    return BenchmarkResult(tuple(entries), winner, cut, n - cut)
