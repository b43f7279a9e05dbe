"""Minute-resolution plant telemetry: the dataset model and gap segmentation.

A dataset is a rectangular table keyed by epoch-minute timestamps. Process
parameters live in a single float matrix (one column per parameter, names
carry units, e.g. ``"calciner_fuel [t/h]"``). Emission channels are stored
as named vectors; recognized channels and their units are fixed by
``EMISSION_UNITS``. Missing cells are representable: a False entry in the
validity masks marks a cell as absent, which is distinct from a stored zero.

Timestamps must be non-decreasing at construction. Duplicate timestamps are
tolerated here because raw exports contain them; the consistency stage of the
preprocessing pipeline consolidates duplicates, after which timestamps are
strictly increasing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

EMISSION_UNITS = {
    "NOX": "PPM",
    "CO": "PPM",
    "CO2": "PPM",
    "CLINKER_FLOW": "t/h",
    "FCAO": "wt%",
}


class DatasetError(ValueError):
    """Violation of a dataset structural invariant."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeriesDataset:
    timestamps: np.ndarray
    param_names: tuple[str, ...]
    params: np.ndarray
    emissions: dict[str, np.ndarray]
    param_valid: np.ndarray = None
    emission_valid: dict[str, np.ndarray] = None

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.int64)
        params = np.asarray(self.params, dtype=np.float64)
        names = tuple(self.param_names)
        n = ts.shape[0]

        if params.ndim != 2:
            raise DatasetError("params must be a 2-D matrix")
        if params.shape[0] != n:
            raise DatasetError(
                f"params has {params.shape[0]} rows, timestamps have {n}"
            )
        if params.shape[1] != len(names):
            raise DatasetError(
                f"params has {params.shape[1]} columns for {len(names)} names"
            )
        if len(set(names)) != len(names):
            raise DatasetError("duplicate parameter names")
        if n > 1 and np.any(np.diff(ts) < 0):
            bad = int(np.argmax(np.diff(ts) < 0)) + 1
            raise DatasetError(f"timestamps decrease at row {bad}")

        emissions = {}
        for ch, vec in self.emissions.items():
            if ch not in EMISSION_UNITS:
                raise DatasetError(f"unknown emission channel {ch!r}")
            v = np.asarray(vec, dtype=np.float64)
            if v.shape != (n,):
                raise DatasetError(f"channel {ch} length {v.shape} != {n}")
            emissions[ch] = _freeze(v)

        pv = self.param_valid
        if pv is None:
            pv = np.ones(params.shape, dtype=bool)
        else:
            pv = np.asarray(pv, dtype=bool)
            if pv.shape != params.shape:
                raise DatasetError("param_valid shape mismatch")

        ev_in = self.emission_valid or {}
        ev = {}
        for ch in emissions:
            m = ev_in.get(ch)
            if m is None:
                m = np.ones(n, dtype=bool)
            else:
                m = np.asarray(m, dtype=bool)
                if m.shape != (n,):
                    raise DatasetError(f"emission_valid[{ch}] shape mismatch")
            ev[ch] = _freeze(m)

        object.__setattr__(self, "timestamps", _freeze(ts))
        object.__setattr__(self, "param_names", names)
        object.__setattr__(self, "params", _freeze(params))
        object.__setattr__(self, "emissions", emissions)
        object.__setattr__(self, "param_valid", _freeze(pv))
        object.__setattr__(self, "emission_valid", ev)

    @property
    def n_rows(self) -> int:
        return self.timestamps.shape[0]

    @property
    def n_params(self) -> int:
        return len(self.param_names)

    @property
    def channels(self) -> tuple[str, ...]:
        return tuple(self.emissions)

    def strictly_increasing(self) -> bool:
        if self.n_rows < 2:
            return True
        return bool(np.all(np.diff(self.timestamps) > 0))

    def param_index(self, name: str) -> int:
        try:
            return self.param_names.index(name)
        except ValueError:
            raise DatasetError(f"no parameter named {name!r}") from None

    def param_column(self, name: str) -> np.ndarray:
        return self.params[:, self.param_index(name)]

    def take(self, rows) -> "TimeSeriesDataset":
        """New dataset restricted to the given row indexer (indices or bool mask)."""
        rows = np.asarray(rows)
        return TimeSeriesDataset(
            timestamps=self.timestamps[rows],
            param_names=self.param_names,
            params=self.params[rows],
            emissions={ch: v[rows] for ch, v in self.emissions.items()},
            param_valid=self.param_valid[rows],
            emission_valid={ch: m[rows] for ch, m in self.emission_valid.items()},
        )

    def keep_params(self, names) -> "TimeSeriesDataset":
        """New dataset keeping only the named parameter columns, order preserved."""
        keep = [n for n in self.param_names if n in set(names)]
        idx = [self.param_index(n) for n in keep]
        return TimeSeriesDataset(
            timestamps=self.timestamps,
            param_names=tuple(keep),
            params=self.params[:, idx],
            emissions=dict(self.emissions),
            param_valid=self.param_valid[:, idx],
            emission_valid=dict(self.emission_valid),
        )

    def row_all_valid(self) -> np.ndarray:
        """Mask of rows with every parameter and every channel cell present."""
        ok = self.param_valid.all(axis=1)
        for m in self.emission_valid.values():
            ok = ok & m
        return ok


@dataclass(frozen=True)
class Segment:
    """A maximal run of rows with no internal time gap. Bounds are row indices,
    start inclusive, end exclusive."""

    start: int
    end: int

    def __len__(self) -> int:
        return self.end - self.start


def segment_continuous(dataset: TimeSeriesDataset, max_gap_minutes: int = 1) -> list[Segment]:
    """Split the dataset into maximal segments whose consecutive timestamps
    differ by at most ``max_gap_minutes``. Every row belongs to exactly one
    segment; a gapless dataset yields a single segment."""
    if max_gap_minutes < 1:
        raise ValueError("max_gap_minutes must be >= 1")
    n = dataset.n_rows
    if n == 0:
        return []
    deltas = np.diff(dataset.timestamps)
    breaks = np.flatnonzero(deltas > max_gap_minutes) + 1
    bounds = np.concatenate(([0], breaks, [n]))
    return [Segment(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]
