"""Pointwise regression error measures.

MAPE is reported in percent and is undefined whenever any true value is zero;
that case raises instead of silently returning inf. R2 is one minus the ratio
of residual to total sum of squares, where the total is taken about the mean
of the true values; a constant predictor therefore scores at most zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class MetricError(ValueError):
    pass


def _pair(y_true, y_pred):
    yt = np.asarray(y_true, dtype=float).ravel()
    yp = np.asarray(y_pred, dtype=float).ravel()
    if yt.shape != yp.shape:
        raise MetricError(f"length mismatch: {yt.shape[0]} vs {yp.shape[0]}")
    if yt.size == 0:
        raise MetricError("empty input")
    if not (np.isfinite(yt).all() and np.isfinite(yp).all()):
        raise MetricError("non-finite values")
    return yt, yp


def mape(y_true, y_pred) -> float:
    yt, yp = _pair(y_true, y_pred)
    if np.any(yt == 0.0):
        raise MetricError("MAPE undefined: y_true contains zero")
    return float(np.mean(np.abs(yp - yt) / np.abs(yt)) * 100.0)


def mae(y_true, y_pred) -> float:
    yt, yp = _pair(y_true, y_pred)
    return float(np.mean(np.abs(yp - yt)))


def r2(y_true, y_pred) -> float:
    yt, yp = _pair(y_true, y_pred)
    rss = float(np.sum((yt - yp) ** 2))
    tss = float(np.sum((yt - yt.mean()) ** 2))
    if tss == 0.0:
        raise MetricError("R2 undefined: y_true is constant")
    return 1.0 - rss / tss


@dataclass(frozen=True)
class MetricReport:
    mape: float
    mae: float
    r2: float
    n: int

    @classmethod
    def from_predictions(cls, y_true, y_pred) -> "MetricReport":
        yt, yp = _pair(y_true, y_pred)
        return cls(mape=mape(yt, yp), mae=mae(yt, yp), r2=r2(yt, yp), n=yt.size)

    def __str__(self) -> str:
        return f"MAPE {self.mape:.3f}%  MAE {self.mae:.4g}  R2 {self.r2:.4f}  (n={self.n})"
