"""Lagged design matrices for instantaneous and history-aware prediction.

The instantaneous design regresses an emission on the current parameter
vector only. The history design appends the previous ``tau`` parameter
vectors, giving the model the window the stack gas actually integrates
over. Lag windows never straddle a telemetry gap: designs are built per
contiguous segment and concatenated.

Feature order is lag-major: the current readings first, then the full
parameter block at t-1, and so on back to t-tau. Lag-0 features keep the
bare parameter name so a tau=0 design is column-compatible with the raw
parameter matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import TimeSeriesDataset, segment_continuous
from .metrics import MetricReport
from .models import RegressorSpec, fit


class TemporalError(ValueError):
    """Invalid lag-design request."""


@dataclass(frozen=True)
class LagDesign:
    """A supervised design: one row per usable minute, one column per
    (parameter, lag) pair, aligned with the target emission and the
    timestamp of the predicted minute."""

    X: np.ndarray
    y: np.ndarray
    timestamps: np.ndarray
    feature_names: tuple[str, ...]
    tau: int
    target_channel: str

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def restrict(self, mask: np.ndarray) -> "LagDesign":
        mask = np.asarray(mask, dtype=bool)
        return LagDesign(
            X=self.X[mask],
            y=self.y[mask],
            timestamps=self.timestamps[mask],
            feature_names=self.feature_names,
            tau=self.tau,
            target_channel=self.target_channel,
        )


def lag_feature_names(param_names, tau: int) -> tuple[str, ...]:
    names = []
    for lag in range(tau + 1):
        for name in param_names:
            names.append(name if lag == 0 else f"{name}@t-{lag}")
    return tuple(names)


def build_eph_matrix(
    dataset: TimeSeriesDataset,
    target_channel: str,
    tau: int,
    max_gap_minutes: int = 1,
) -> LagDesign:
    """History design: features are the parameter vectors at t, t-1, ...,
    t-tau. Samples whose lag window touches an invalid cell, or whose
    target reading is invalid, are dropped."""
    if tau < 0:
        raise TemporalError("tau must be non-negative")
    if target_channel not in dataset.emissions:
        raise TemporalError(f"unknown emission channel {target_channel!r}")

    target = dataset.emissions[target_channel]
    target_ok = dataset.emission_valid[target_channel]
    row_ok = dataset.param_valid.all(axis=1)

    window = np.ones(tau + 1)
    Xs, ys, ts = [], [], []
    for seg in segment_continuous(dataset, max_gap_minutes):
        m = seg.end - seg.start
        if m <= tau:
            continue
        P = dataset.params[seg.start : seg.end]
        ok = row_ok[seg.start : seg.end].astype(float)
        win_ok = np.convolve(ok, window, mode="valid") == tau + 1
        keep = win_ok & target_ok[seg.start + tau : seg.end]
        if not keep.any():
            continue
        blocks = [P[tau - lag : m - lag] for lag in range(tau + 1)]
        Xs.append(np.hstack(blocks)[keep])
        ys.append(target[seg.start + tau : seg.end][keep])
        ts.append(dataset.timestamps[seg.start + tau : seg.end][keep])

    if not Xs:
        raise TemporalError(
            f"no contiguous segment longer than tau={tau}; cannot build lagged design"
        )
    return LagDesign(
        X=np.vstack(Xs),
        y=np.concatenate(ys),
        timestamps=np.concatenate(ts),
        feature_names=lag_feature_names(dataset.param_names, tau),
        tau=tau,
        target_channel=target_channel,
    )


def build_ep_matrix(
    dataset: TimeSeriesDataset, target_channel: str, max_gap_minutes: int = 1
) -> LagDesign:
    """Instantaneous design: current parameter vector only."""
    return build_eph_matrix(dataset, target_channel, tau=0, max_gap_minutes=max_gap_minutes)


def time_boundary(dataset: TimeSeriesDataset, train_fraction: float) -> int:
    """Timestamp below-or-at which samples belong to the training period.

    A fixed clock boundary keeps train/test membership identical across
    designs with different tau, so sweeps compare models on the same
    minutes."""
    if not 0.0 < train_fraction < 1.0:
        raise TemporalError("train_fraction must be in (0, 1)")
    t0 = int(dataset.timestamps[0])
    t1 = int(dataset.timestamps[-1])
    return t0 + int(train_fraction * (t1 - t0))


def split_design(design: LagDesign, boundary_minute: int) -> tuple[LagDesign, LagDesign]:
    train_mask = design.timestamps <= boundary_minute
    train = design.restrict(train_mask)
    test = design.restrict(~train_mask)
    if train.n_samples == 0 or test.n_samples == 0:
        raise TemporalError("time boundary leaves an empty train or test split")
    return train, test


@dataclass(frozen=True)
class TauPoint:
    tau: int
    n_features: int
    n_train: int
    n_test: int
    report: MetricReport


def sweep_tau(
    dataset: TimeSeriesDataset,
    target_channel: str,
    taus,
    spec: RegressorSpec,
    train_fraction: float = 0.75,
) -> list[TauPoint]:
    """Fit one model per history length and score each on the held-out
    tail. The boundary is fixed in clock time so every tau is judged on
    the same test minutes."""
    taus = [int(t) for t in taus]
    if not taus:
        raise TemporalError("taus must be non-empty")
    boundary = time_boundary(dataset, train_fraction)
    points = []
    for tau in taus:
        design = build_eph_matrix(dataset, target_channel, tau)
        train, test = split_design(design, boundary)
        model = fit(spec, train.X, train.y, schema=design.feature_names)
        pred = model.predict(test.X)
        points.append(
            TauPoint(
                tau=tau,
                n_features=design.n_features,
                n_train=train.n_samples,
                n_test=test.n_samples,
                report=MetricReport.from_predictions(test.y, pred),
            )
        )
    return points
