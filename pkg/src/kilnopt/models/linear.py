"""Linear regressors: ordinary least squares, ridge, and lasso.

All three fit an intercept. Ridge solves the augmented normal equations
(X~'X~ + lambda I) beta = X~'y where X~ carries a ones column, so the
penalty applies to the intercept coefficient as well; that keeps the
solution an exact root of the documented system. Lasso leaves the
intercept unpenalized and is solved by cyclic coordinate descent on the
objective (1/2n)||y - Xw - b||^2 + lambda * sum|w|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NumericalError(ArithmeticError):
    pass


@dataclass
class LinearModel:
    weights: np.ndarray
    intercept: float
    schema: tuple[str, ...] | None = None

    @classmethod
    def from_coefficients(cls, weights, intercept=0.0, schema=None) -> "LinearModel":
        return cls(np.asarray(weights, dtype=float), float(intercept), schema)

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.weights.shape[0]:
            raise ValueError(
                f"model expects {self.weights.shape[0]} features, got {X.shape[1]}"
            )
        return X @ self.weights + self.intercept


def _augment(X: np.ndarray) -> np.ndarray:
    return np.hstack([X, np.ones((X.shape[0], 1))])


def fit_linear(X, y, schema=None) -> LinearModel:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    Xa = _augment(X)
    beta, _, rank, _ = np.linalg.lstsq(Xa, y, rcond=None)
    if rank < Xa.shape[1]:
        raise NumericalError(
            "singular normal equations: features are collinear; "
            "prune correlated parameters before fitting"
        )
    return LinearModel(beta[:-1], float(beta[-1]), schema)


def fit_ridge(X, y, lam: float, schema=None) -> LinearModel:
    if lam < 0:
        raise ValueError("ridge penalty must be non-negative")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    Xa = _augment(X)
    if lam == 0.0:
        return fit_linear(X, y, schema)
    # augmented least squares [Xa; sqrt(lam) I] beta = [y; 0]: its exact
    # solution is the root of (Xa'Xa + lam I) beta = Xa'y, computed without
    # forming the squared-condition gram matrix
    p1 = Xa.shape[1]
    top = np.vstack([Xa, np.sqrt(lam) * np.eye(p1)])
    rhs = np.concatenate([y, np.zeros(p1)])
    beta, _, _, _ = np.linalg.lstsq(top, rhs, rcond=None)
    return LinearModel(beta[:-1], float(beta[-1]), schema)


def fit_lasso(
    X,
    y,
    lam: float,
    tol: float = 1e-8,
    max_sweeps: int = 10_000,
    schema=None,
) -> LinearModel:
    if lam < 0:
        raise ValueError("lasso penalty must be non-negative")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    col_sq = (X * X).sum(axis=0) / n

    w = np.zeros(p)
    b = float(y.mean())
    r = y - b
    for _ in range(max_sweeps):
        delta_max = 0.0
        for j in range(p):
            if col_sq[j] == 0.0:
                continue
            xj = X[:, j]
            rho = (xj @ r) / n + col_sq[j] * w[j]
            w_new = _soft_threshold(rho, lam) / col_sq[j]
            step = w_new - w[j]
            if step != 0.0:
                r -= step * xj
                w[j] = w_new
                delta_max = max(delta_max, abs(step))
        shift = float(r.mean())
        if shift != 0.0:
            b += shift
            r -= shift
            delta_max = max(delta_max, abs(shift))
        if delta_max <= tol:
            break
    return LinearModel(w, b, schema)


def _soft_threshold(value: float, lam: float) -> float:
    if value > lam:
        return value - lam
    if value < -lam:
        return value + lam
    return 0.0
