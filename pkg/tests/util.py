"""Shared helpers for building small hand-specified datasets in tests."""

from __future__ import annotations

import numpy as np

from kilnopt.dataset import TimeSeriesDataset


def make_dataset(
    params: dict[str, list],
    emissions: dict[str, list],
    timestamps=None,
    param_valid=None,
    emission_valid=None,
) -> TimeSeriesDataset:
    """Column-oriented constructor: params and emissions map names to value
    lists; timestamps default to consecutive minutes from zero."""
    names = tuple(params)
    cols = [np.asarray(params[n], dtype=float) for n in names]
    n = cols[0].shape[0] if cols else len(next(iter(emissions.values())))
    mat = np.column_stack(cols) if cols else np.empty((n, 0))
    if timestamps is None:
        timestamps = np.arange(n, dtype=np.int64)
    return TimeSeriesDataset(
        timestamps=np.asarray(timestamps, dtype=np.int64),
        param_names=names,
        params=mat,
        emissions={ch: np.asarray(v, dtype=float) for ch, v in emissions.items()},
        param_valid=param_valid,
        emission_valid=emission_valid,
    )


class FixedModel:
    """Deterministic stand-in regressor: applies a callable row-wise."""

    def __init__(self, fn, schema=None):
        self.fn = fn
        self.schema = tuple(schema) if schema is not None else None

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        return np.asarray([float(self.fn(row)) for row in X])


class LinearStub:
    """Vectorized linear model w @ x + b with an optional schema."""

    def __init__(self, w, b=0.0, schema=None):
        self.w = np.asarray(w, dtype=float)
        self.b = float(b)
        self.schema = tuple(schema) if schema is not None else None

    def predict(self, X):
        return np.asarray(X, dtype=float) @ self.w + self.b
