"""Univariate autoregressive emission forecasting.

Future emissions are predicted from their own past observations only.
Two strategies are implemented over a shared sliding-window sample
format:

- SINGLE_STEP: one regressor predicts one minute ahead; longer horizons
  are produced recursively, feeding each prediction back into the input
  window. Errors compound along the recursion.
- MULTI_STEP: one regressor per step offset, every horizon value
  produced directly from the original window in a single pass.

Splits are chronological with a temporal buffer between train and test,
asserted on construction, so no test information can leak backwards
through the window overlap.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import TimeSeriesDataset, segment_continuous
from .models import Family, RegressorSpec, fit
from .models.linear import LinearModel


class ForecastError(ValueError):
    """Invalid forecasting request."""


def _default_regressor() -> RegressorSpec:
    # deliberately light boosting settings: forecasting fits 60 sub-models
    # per channel for the direct strategy, so per-model cost matters
    return RegressorSpec(
        family=Family.GBT, n_rounds=150, max_depth=4, min_samples_leaf=40
    )


@dataclass(frozen=True)
class ForecastConfig:
    lookback: int = 25
    horizon: int = 60
    train_fraction: float = 0.70
    buffer_minutes: int = 120
    n_events: int = 3000
    level: float = 0.90
    regressor: RegressorSpec = field(default_factory=_default_regressor)
    # adjacent sliding windows overlap almost entirely; thinning the
    # training windows caps the per-sub-model cost without losing coverage
    max_train_windows: int = 20_000

    def __post_init__(self):
        if self.lookback < 1:
            raise ForecastError("lookback must be >= 1")
        if self.horizon < 1:
            raise ForecastError("horizon must be >= 1")
        if self.buffer_minutes < 0:
            raise ForecastError("buffer_minutes must be >= 0")
        if not 0.0 < self.train_fraction < 1.0:
            raise ForecastError("train_fraction must be in (0, 1)")
        if not 0.0 < self.level < 1.0:
            raise ForecastError("confidence level must be in (0, 1)")
        if self.max_train_windows < 1:
            raise ForecastError("max_train_windows must be >= 1")


def _thin_windows(X: np.ndarray, Y: np.ndarray, cap: int) -> tuple[np.ndarray, np.ndarray]:
    n = X.shape[0]
    if n <= cap:
        return X, Y
    idx = np.unique(np.linspace(0, n - 1, cap).astype(int))
    return X[idx], Y[idx]


class ForecastKind(enum.Enum):
    SINGLE_STEP = "SINGLE_STEP"
    MULTI_STEP = "MULTI_STEP"


@dataclass(frozen=True)
class ForecastModel:
    kind: ForecastKind
    lookback: int
    horizon: int
    models: tuple
    band_lo: np.ndarray = None
    band_hi: np.ndarray = None

    def __post_init__(self):
        want = 1 if self.kind is ForecastKind.SINGLE_STEP else self.horizon
        if len(self.models) != want:
            raise ForecastError(
                f"{self.kind.value} forecaster needs {want} sub-models, "
                f"got {len(self.models)}"
            )


@dataclass(frozen=True)
class HorizonCurve:
    """Per-step mean absolute percentage error over sampled events, and
    the first step whose error sits within 5% relative of the plateau
    (mean APE of the last 10 steps)."""

    per_step_ape: np.ndarray
    effective_horizon: int
    plateau: float
    n_events: int


def channel_segments(
    dataset: TimeSeriesDataset, channel: str, max_gap_minutes: int = 1
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Contiguous (timestamps, values) runs of one emission channel.
    Invalid readings break a run just like a telemetry gap does."""
    if channel not in dataset.emissions:
        raise ForecastError(f"unknown emission channel {channel!r}")
    values = dataset.emissions[channel]
    ok = dataset.emission_valid[channel]
    out = []
    for seg in segment_continuous(dataset, max_gap_minutes):
        m = ok[seg.start : seg.end]
        if m.all():
            out.append(
                (dataset.timestamps[seg.start : seg.end], values[seg.start : seg.end])
            )
            continue
        idx = np.flatnonzero(m) + seg.start
        if idx.size == 0:
            continue
        cuts = np.flatnonzero(np.diff(idx) > 1) + 1
        for run in np.split(idx, cuts):
            out.append((dataset.timestamps[run], values[run]))
    return out


@dataclass(frozen=True)
class SeriesSplit:
    train_segments: list
    test_segments: list
    train_end_minute: int
    test_start_minute: int


def split_series(
    dataset: TimeSeriesDataset, channel: str, config: ForecastConfig
) -> SeriesSplit:
    """Chronological split of one channel with a buffer strip removed
    between the periods."""
    segments = channel_segments(dataset, channel)
    t0 = int(dataset.timestamps[0])
    t1 = int(dataset.timestamps[-1])
    train_end = t0 + int(config.train_fraction * (t1 - t0))
    test_start = train_end + config.buffer_minutes + 1

    train, test = [], []
    for ts, vals in segments:
        m = ts <= train_end
        if m.any():
            train.append(vals[m])
        m = ts >= test_start
        if m.any():
            test.append(vals[m])
    if not train or not test:
        raise ForecastError("split leaves an empty train or test period")

    # hygiene: the buffer strictly separates the periods in clock time
    max_train = max(int(ts[ts <= train_end][-1]) for ts, _ in segments if (ts <= train_end).any())
    min_test = min(int(ts[ts >= test_start][0]) for ts, _ in segments if (ts >= test_start).any())
    if not max_train + config.buffer_minutes < min_test:
        raise ForecastError("train and test periods are not buffer-separated")
    return SeriesSplit(
        train_segments=train,
        test_segments=test,
        train_end_minute=train_end,
        test_start_minute=test_start,
    )


def make_ar_samples(segments, lookback: int, horizon: int) -> tuple[np.ndarray, np.ndarray]:
    """Sliding supervised windows: X rows are the lookback values
    [y(t-L) .. y(t-1)], Y rows the next horizon values [y(t) .. y(t+H-1)].
    Windows never span two segments; a segment of length L+H yields
    exactly one sample, shorter ones none."""
    if lookback < 1 or horizon < 1:
        raise ForecastError("lookback and horizon must be >= 1")
    span = lookback + horizon
    Xs, Ys = [], []
    for seg in segments:
        vals = np.asarray(seg, dtype=float)
        if vals.ndim != 1:
            raise ForecastError("segments must be 1-D value arrays")
        if vals.size < span:
            continue
        win = np.lib.stride_tricks.sliding_window_view(vals, span)
        Xs.append(win[:, :lookback])
        Ys.append(win[:, lookback:])
    if not Xs:
        raise ForecastError(
            f"every segment is shorter than lookback+horizon = {span}; no samples"
        )
    return np.vstack(Xs), np.vstack(Ys)


def _window_schema(lookback: int) -> tuple[str, ...]:
    return tuple(f"y@t-{lookback - i}" for i in range(lookback))


def fit_single_step(config: ForecastConfig, samples) -> ForecastModel:
    X, Y = samples
    X, Y = _thin_windows(X, Y, config.max_train_windows)
    model = fit(config.regressor, X, Y[:, 0], schema=_window_schema(config.lookback))
    return ForecastModel(
        kind=ForecastKind.SINGLE_STEP,
        lookback=config.lookback,
        horizon=config.horizon,
        models=(model,),
    )


def fit_multi_step(config: ForecastConfig, samples) -> ForecastModel:
    X, Y = samples
    if Y.shape[1] < config.horizon:
        raise ForecastError(
            f"samples provide {Y.shape[1]} target steps, horizon is {config.horizon}"
        )
    X, Y = _thin_windows(X, Y, config.max_train_windows)
    schema = _window_schema(config.lookback)
    models = []
    for h in range(config.horizon):
        spec = config.regressor.reseeded(config.regressor.seed + 7919 * h)
        models.append(fit(spec, X, Y[:, h], schema=schema))
    return ForecastModel(
        kind=ForecastKind.MULTI_STEP,
        lookback=config.lookback,
        horizon=config.horizon,
        models=tuple(models),
    )


def _check_windows(model: ForecastModel, windows: np.ndarray) -> np.ndarray:
    windows = np.asarray(windows, dtype=float)
    if windows.ndim != 2 or windows.shape[1] != model.lookback:
        raise ForecastError(
            f"windows must have {model.lookback} columns, got shape {windows.shape}"
        )
    return windows


def forecast_batch(model: ForecastModel, windows: np.ndarray, horizon: int = None) -> np.ndarray:
    """Trajectories for many windows at once, shape (n_windows, horizon)."""
    windows = _check_windows(model, windows)
    H = model.horizon if horizon is None else int(horizon)
    if H < 1:
        raise ForecastError("horizon must be >= 1")
    n = windows.shape[0]
    if model.kind is ForecastKind.SINGLE_STEP:
        buf = windows.copy()
        out = np.empty((n, H))
        for k in range(H):
            step = model.models[0].predict(buf)
            out[:, k] = step
            buf = np.hstack([buf[:, 1:], step[:, None]])
        return out
    if H > model.horizon:
        raise ForecastError("direct forecaster cannot exceed its trained horizon")
    return np.column_stack([model.models[h].predict(windows) for h in range(H)])


def recursive_forecast(model: ForecastModel, window, horizon: int = None) -> np.ndarray:
    """Feed-back recursion: the input for step k holds the last lookback
    values of (window ++ predictions so far), i.e. min(k-1, L) of them are
    the model's own outputs."""
    if model.kind is not ForecastKind.SINGLE_STEP:
        raise ForecastError("recursive forecasting needs a SINGLE_STEP model")
    window = np.asarray(window, dtype=float)
    if window.ndim != 1:
        raise ForecastError("window must be 1-D")
    return forecast_batch(model, window[None, :], horizon)[0]


def forecast_multi_step(model: ForecastModel, window) -> np.ndarray:
    """Whole trajectory in one pass; a pure function of the window."""
    if model.kind is not ForecastKind.MULTI_STEP:
        raise ForecastError("direct forecasting needs a MULTI_STEP model")
    window = np.asarray(window, dtype=float)
    if window.ndim != 1:
        raise ForecastError("window must be 1-D")
    return forecast_batch(model, window[None, :])[0]


def propagate_one_step_error(model: ForecastModel, epsilon: float, horizon: int = None) -> np.ndarray:
    """Closed-form displacement of a recursive trajectory when the step-1
    prediction is perturbed by epsilon and then fed back.

    Valid for linear sub-models only, where the local sensitivity of the
    forecaster equals its coefficient vector: the step-k displacement is
    the linear recursion of the perturbation through the window. For a
    one-lag model with coefficient a this is a**(k-1) * epsilon."""
    if model.kind is not ForecastKind.SINGLE_STEP:
        raise ForecastError("error propagation applies to SINGLE_STEP models")
    reg = model.models[0]
    if not isinstance(reg, LinearModel):
        raise ForecastError("closed-form propagation needs a linear sub-model")
    H = model.horizon if horizon is None else int(horizon)
    w = np.asarray(reg.weights, dtype=float)
    L = w.shape[0]
    deltas = np.empty(H)
    hist = np.zeros(L)
    deltas[0] = epsilon
    hist[-1] = epsilon
    for k in range(1, H):
        deltas[k] = float(w @ hist)
        hist = np.roll(hist, -1)
        hist[-1] = deltas[k]
    return deltas


def uncertainty_bands(model: ForecastModel, samples, level: float = None) -> tuple[np.ndarray, np.ndarray]:
    """Empirical per-step residual quantiles at (1 +/- level)/2, as additive
    offsets around a trajectory. Outer-order statistics are used (lower
    interpolation for the low edge, higher for the high edge), so a step
    whose residuals are exactly {-1, +1} yields the band [-1, +1] at any
    level below one."""
    if level is None:
        level = 0.90
    if not 0.0 < level < 1.0:
        raise ForecastError("confidence level must be in (0, 1)")
    X, Y = samples
    traj = forecast_batch(model, X, horizon=Y.shape[1])
    residuals = Y - traj
    lo = np.percentile(residuals, (1.0 - level) / 2.0 * 100.0, axis=0, method="lower")
    hi = np.percentile(residuals, (1.0 + level) / 2.0 * 100.0, axis=0, method="higher")
    return lo, hi


def with_bands(model: ForecastModel, lo: np.ndarray, hi: np.ndarray) -> ForecastModel:
    return replace(model, band_lo=np.asarray(lo, dtype=float), band_hi=np.asarray(hi, dtype=float))


def sample_events(
    test_segments, lookback: int, horizon: int, n_events: int, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform without-replacement draw of forecast events (window, truth)
    from the admissible test windows. Falls back to all admissible events
    with a warning when fewer exist than requested."""
    X, Y = make_ar_samples(test_segments, lookback, horizon)
    n_adm = X.shape[0]
    if n_adm < n_events:
        warnings.warn(
            f"only {n_adm} admissible forecast events for {n_events} requested; using all",
            stacklevel=2,
        )
        return X, Y
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(n_adm, size=n_events, replace=False))
    return X[idx], Y[idx]


def horizon_curve_from_trajectories(truth: np.ndarray, traj: np.ndarray) -> HorizonCurve:
    if truth.shape != traj.shape:
        raise ForecastError("truth and trajectory shapes differ")
    if np.any(truth == 0):
        raise ForecastError("true values contain zeros; APE is undefined")
    ape = np.abs(traj - truth) / np.abs(truth) * 100.0
    per_step = ape.mean(axis=0)
    tail = per_step[-min(10, per_step.shape[0]) :]
    plateau = float(tail.mean())
    within = np.abs(per_step - plateau) <= 0.05 * plateau
    effective = int(np.flatnonzero(within)[0]) + 1 if within.any() else per_step.shape[0]
    return HorizonCurve(
        per_step_ape=per_step,
        effective_horizon=effective,
        plateau=plateau,
        n_events=truth.shape[0],
    )


def evaluate_horizon(
    model: ForecastModel, test_segments, n_events: int = 3000, seed: int = 0
) -> HorizonCurve:
    """Per-step APE averaged over seeded forecast events drawn from the
    held-out period."""
    X, Y = sample_events(test_segments, model.lookback, model.horizon, n_events, seed)
    traj = forecast_batch(model, X)
    return horizon_curve_from_trajectories(Y, traj)


@dataclass(frozen=True)
class LookbackPoint:
    lookback: int
    mape: float
    mae: float
    n_test: int


def sweep_lookback(
    dataset: TimeSeriesDataset,
    channel: str,
    lookbacks=range(5, 125, 5),
    config: ForecastConfig = None,
) -> list[LookbackPoint]:
    """One-step-ahead test error of a single-step forecaster at each
    look-back length, on identical chronological splits."""
    base = config if config is not None else ForecastConfig()
    lookbacks = [int(l) for l in lookbacks]
    if not lookbacks:
        raise ForecastError("lookbacks must be non-empty")
    split = split_series(dataset, channel, base)
    points = []
    for L in lookbacks:
        cfg = replace(base, lookback=L, horizon=1)
        model = fit_single_step(cfg, make_ar_samples(split.train_segments, L, 1))
        Xt, Yt = make_ar_samples(split.test_segments, L, 1)
        pred = model.models[0].predict(Xt)
        err = Yt[:, 0] - pred
        if np.any(Yt[:, 0] == 0):
            raise ForecastError("true values contain zeros; APE is undefined")
        points.append(
            LookbackPoint(
                lookback=L,
                mape=float(np.mean(np.abs(err) / np.abs(Yt[:, 0])) * 100.0),
                mae=float(np.mean(np.abs(err))),
                n_test=Xt.shape[0],
            )
        )
    return points
