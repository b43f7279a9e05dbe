"""Regressor families behind one spec-driven entry point.

``RegressorSpec`` names the family and carries every hyperparameter any
family understands; ``fit`` dispatches and returns a model object exposing
``predict``. Tree hyperparameters follow the usual conventions; for
``max_depth=None`` boosting falls back to its default depth of 6 while
forests grow unbounded.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .linear import LinearModel, NumericalError, fit_lasso, fit_linear, fit_ridge
from .ensemble import (
    GradientBoostingModel,
    RandomForestModel,
    fit_forest,
    fit_gbt,
)


class Family(enum.Enum):
    LINEAR = "LINEAR"
    RIDGE = "RIDGE"
    LASSO = "LASSO"
    RANDOM_FOREST = "RANDOM_FOREST"
    GBT = "GBT"


@dataclass(frozen=True)
class RegressorSpec:
    family: Family
    seed: int = 0
    ridge_lambda: float = 1.0
    lasso_lambda: float = 1e-3
    lasso_tol: float = 1e-8
    lasso_max_sweeps: int = 10_000
    n_rounds: int = 400
    learning_rate: float = 0.1
    max_depth: int | None = None
    min_samples_leaf: int = 20
    n_trees: int = 200
    feature_subsample: float = 1.0
    bootstrap: bool = True
    max_bins: int = 256

    def reseeded(self, seed: int) -> "RegressorSpec":
        return replace(self, seed=seed)


def fit(spec: RegressorSpec, X, y, schema: tuple[str, ...] | None = None):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be 2-D")
    if X.shape[0] != y.shape[0]:
        raise ValueError("X and y row counts differ")
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    if schema is not None and len(schema) != X.shape[1]:
        raise ValueError("schema length does not match feature count")

    if spec.family is Family.LINEAR:
        return fit_linear(X, y, schema)
    if spec.family is Family.RIDGE:
        return fit_ridge(X, y, spec.ridge_lambda, schema)
    if spec.family is Family.LASSO:
        return fit_lasso(
            X, y, spec.lasso_lambda, spec.lasso_tol, spec.lasso_max_sweeps, schema
        )
    if spec.family is Family.RANDOM_FOREST:
        return fit_forest(
            X,
            y,
            n_trees=spec.n_trees,
            max_depth=spec.max_depth,
            min_samples_leaf=max(1, spec.min_samples_leaf),
            feature_subsample=spec.feature_subsample,
            bootstrap=spec.bootstrap,
            seed=spec.seed,
            max_bins=spec.max_bins,
            schema=schema,
        )
    if spec.family is Family.GBT:
        return fit_gbt(
            X,
            y,
            n_rounds=spec.n_rounds,
            learning_rate=spec.learning_rate,
            max_depth=6 if spec.max_depth is None else spec.max_depth,
            min_samples_leaf=spec.min_samples_leaf,
            feature_subsample=spec.feature_subsample,
            seed=spec.seed,
            max_bins=spec.max_bins,
            schema=schema,
        )
    raise ValueError(f"unknown family {spec.family!r}")


from .persist import load_model, save_model  # noqa: E402
from .validate import BenchmarkResult, benchmark, cross_validate  # noqa: E402

__all__ = [
    "Family",
    "RegressorSpec",
    "fit",
    "save_model",
    "load_model",
    "cross_validate",
    "benchmark",
    "BenchmarkResult",
    "LinearModel",
    "RandomForestModel",
    "GradientBoostingModel",
    "NumericalError",
]
