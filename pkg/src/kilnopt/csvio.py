"""CSV ingestion and emission of telemetry tables.

Layout: first column ``timestamp`` holding ISO-8601 wall-clock times at
minute resolution, then one column per process parameter (header is the
parameter name with its unit suffix), then one column per emission channel
(``NOX [PPM]``, ``CO [PPM]``, ``CO2 [PPM]``, optionally ``CLINKER_FLOW [t/h]``
and ``FCAO [wt%]``). An empty cell is a missing value and is loaded as an
invalid entry in the dataset mask, never as zero. Floats are written with
shortest round-trip formatting, so a write/load cycle reproduces values
exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from .dataset import EMISSION_UNITS, TimeSeriesDataset

_EPOCH = datetime(1970, 1, 1)


class CsvFormatError(ValueError):
    """Malformed telemetry CSV; message carries the offending line number."""


@dataclass(frozen=True)
class CsvSchema:
    """Expected column layout. When passed to load_csv, headers must match."""

    param_names: tuple[str, ...]
    channels: tuple[str, ...]


def minutes_to_iso(minute: int) -> str:
    return (_EPOCH + timedelta(minutes=int(minute))).isoformat(timespec="minutes")


def iso_to_minutes(text: str, line: int) -> int:
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        raise CsvFormatError(f"line {line}: bad timestamp {text!r}") from None
    if dt.second or dt.microsecond:
        raise CsvFormatError(f"line {line}: timestamp {text!r} is finer than minute resolution")
    return int((dt - _EPOCH).total_seconds() // 60)


def _channel_header(ch: str) -> str:
    return f"{ch} [{EMISSION_UNITS[ch]}]"


def write_csv(dataset: TimeSeriesDataset, path) -> None:
    channels = list(dataset.emissions)
    header = ["timestamp"] + list(dataset.param_names) + [_channel_header(c) for c in channels]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(dataset.n_rows):
            row = [minutes_to_iso(dataset.timestamps[i])]
            for j in range(dataset.n_params):
                # builtin float repr: shortest string that round-trips
                row.append(
                    repr(float(dataset.params[i, j])) if dataset.param_valid[i, j] else ""
                )
            for c in channels:
                row.append(
                    repr(float(dataset.emissions[c][i]))
                    if dataset.emission_valid[c][i]
                    else ""
                )
            writer.writerow(row)


def load_csv(path, schema: CsvSchema | None = None) -> TimeSeriesDataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError("line 1: empty file") from None
        if not header or header[0] != "timestamp":
            raise CsvFormatError("line 1: first column must be 'timestamp'")

        param_names = []
        channels = []
        for h in header[1:]:
            ch = _match_channel(h)
            if ch is not None:
                channels.append(ch)
            else:
                if channels:
                    raise CsvFormatError(
                        f"line 1: parameter column {h!r} after emission columns"
                    )
                param_names.append(h)
        if schema is not None:
            if tuple(param_names) != tuple(schema.param_names):
                raise CsvFormatError(
                    f"line 1: parameter columns {param_names} do not match schema"
                )
            if tuple(channels) != tuple(schema.channels):
                raise CsvFormatError(
                    f"line 1: emission columns {channels} do not match schema"
                )

        p = len(param_names)
        k = len(channels)
        width = 1 + p + k

        ts, pvals, pmask, evals, emask = [], [], [], [], []
        prev = None
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise CsvFormatError(f"line {line}: expected {width} cells, got {len(row)}")
            minute = iso_to_minutes(row[0], line)
            if prev is not None and minute < prev:
                raise CsvFormatError(f"line {line}: timestamp goes backwards")
            prev = minute
            ts.append(minute)
            vals = np.empty(p + k)
            mask = np.empty(p + k, dtype=bool)
            for j, cell in enumerate(row[1:]):
                cell = cell.strip()
                if cell == "":
                    vals[j] = np.nan
                    mask[j] = False
                else:
                    try:
                        vals[j] = float(cell)
                    except ValueError:
                        raise CsvFormatError(
                            f"line {line}: cell {header[1 + j]!r} = {cell!r} is not numeric"
                        ) from None
                    mask[j] = True
            pvals.append(vals[:p])
            pmask.append(mask[:p])
            evals.append(vals[p:])
            emask.append(mask[p:])

    n = len(ts)
    params = np.array(pvals) if n else np.empty((0, p))
    param_valid = np.array(pmask) if n else np.empty((0, p), dtype=bool)
    em = np.array(evals) if n else np.empty((0, k))
    em_mask = np.array(emask) if n else np.empty((0, k), dtype=bool)
    return TimeSeriesDataset(
        timestamps=np.array(ts, dtype=np.int64),
        param_names=tuple(param_names),
        params=params,
        emissions={c: em[:, i] for i, c in enumerate(channels)},
        param_valid=param_valid,
        emission_valid={c: em_mask[:, i] for i, c in enumerate(channels)},
    )


def _match_channel(header: str) -> str | None:
    for ch in EMISSION_UNITS:
        if header == _channel_header(ch):
            return ch
    return None
