"""Telemetry cleaning pipeline: consistency, physical rules, percentile
outlier rejection, and correlation pruning, in that fixed order.

Each stage consumes the previous stage's output and reports how many rows it
removed. Percentile bands and correlation estimates are always computed on
the data entering that stage. Deletion, not imputation: a row that violates
any check is dropped whole.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import TimeSeriesDataset


class PreprocessError(ValueError):
    pass


@dataclass(frozen=True)
class PhysicalRuleSet:
    """Closed admissible interval per column. Keys name either a process
    parameter (full name with unit) or an emission channel."""

    rules: dict[str, tuple[float, float]]

    @classmethod
    def from_text(cls, text: str) -> "PhysicalRuleSet":
        """Parse ``column = min, max`` lines; '#' starts a comment."""
        rules = {}
        for ln, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise PreprocessError(f"rules line {ln}: expected 'column = min, max'")
            name, _, bounds = line.partition("=")
            parts = bounds.split(",")
            if len(parts) != 2:
                raise PreprocessError(f"rules line {ln}: expected two bounds")
            try:
                lo, hi = float(parts[0]), float(parts[1])
            except ValueError:
                raise PreprocessError(f"rules line {ln}: bounds must be numeric") from None
            if lo > hi:
                raise PreprocessError(f"rules line {ln}: min exceeds max")
            rules[name.strip()] = (lo, hi)
        return cls(rules)


def default_rules() -> PhysicalRuleSet:
    """Plausibility intervals for the stock plant schema."""
    return PhysicalRuleSet(
        {
            "preheater_id_fan [%]": (0.0, 100.0),
            "o2_kiln_inlet [%]": (0.0, 25.0),
            "rm_cao [wt%]": (0.0, 100.0),
            "rm_sio2 [wt%]": (0.0, 100.0),
            "NOX": (0.0, 5000.0),
            "CO": (0.0, 20000.0),
            "CO2": (0.0, 1e6),
            "CLINKER_FLOW": (0.0, 1e4),
            "FCAO": (0.0, 100.0),
        }
    )


@dataclass
class PreprocessReport:
    rows_in: int = 0
    removed_consistency: int = 0
    removed_physical: int = 0
    removed_outlier: int = 0
    rows_out: int = 0
    params_in: int = 0
    params_out: int = 0
    pruned: dict[str, str] = field(default_factory=dict)
    zero_variance: tuple[str, ...] = ()

    def __str__(self) -> str:
        lines = [
            f"rows in              {self.rows_in}",
            f"  consistency   -{self.removed_consistency}",
            f"  physical      -{self.removed_physical}",
            f"  outlier       -{self.removed_outlier}",
            f"rows out             {self.rows_out}",
            f"params {self.params_in} -> {self.params_out}",
        ]
        for gone, kept in self.pruned.items():
            lines.append(f"  pruned {gone} (kept {kept})")
        for name in self.zero_variance:
            lines.append(f"  zero variance: {name} (retained)")
        return "\n".join(lines)


def consistency_check(dataset: TimeSeriesDataset) -> tuple[TimeSeriesDataset, int]:
    """Keep the first row of every duplicated timestamp, then drop any row
    with a missing parameter or emission cell. Output timestamps are strictly
    increasing and every surviving cell is valid."""
    ts = dataset.timestamps
    first = np.ones(dataset.n_rows, dtype=bool)
    if dataset.n_rows > 1:
        first[1:] = np.diff(ts) > 0
    complete = dataset.row_all_valid()
    keep = first & complete
    removed = int(dataset.n_rows - keep.sum())
    return dataset.take(keep), removed


def physical_validation(
    dataset: TimeSeriesDataset, rules: PhysicalRuleSet
) -> tuple[TimeSeriesDataset, int]:
    """Drop rows whose valid cells fall outside the closed rule interval.
    Rules naming a column absent from the dataset raise."""
    keep = np.ones(dataset.n_rows, dtype=bool)
    for name, (lo, hi) in rules.rules.items():
        if name in dataset.emissions:
            v = dataset.emissions[name]
            mask = dataset.emission_valid[name]
        elif name in dataset.param_names:
            j = dataset.param_index(name)
            v = dataset.params[:, j]
            mask = dataset.param_valid[:, j]
        else:
            raise PreprocessError(f"rule references unknown column {name!r}")
        bad = mask & ((v < lo) | (v > hi))
        keep &= ~bad
    removed = int(dataset.n_rows - keep.sum())
    return dataset.take(keep), removed


def _columns(dataset: TimeSeriesDataset):
    for j, name in enumerate(dataset.param_names):
        yield name, dataset.params[:, j], dataset.param_valid[:, j]
    for ch in dataset.emissions:
        yield ch, dataset.emissions[ch], dataset.emission_valid[ch]


def percentile_bands(
    dataset: TimeSeriesDataset, lo: float = 0.01, hi: float = 99.99
) -> dict[str, tuple[float, float]]:
    """Per-column [lo, hi] empirical percentile interval over valid cells,
    linear interpolation between closest ranks."""
    if not (0.0 <= lo < hi <= 100.0):
        raise PreprocessError("percentile bounds must satisfy 0 <= lo < hi <= 100")
    bands = {}
    for name, values, mask in _columns(dataset):
        v = values[mask]
        if v.size == 0:
            raise PreprocessError(f"column {name!r} has no valid cells")
        qlo, qhi = np.percentile(v, [lo, hi], method="linear")
        bands[name] = (float(qlo), float(qhi))
    return bands


def outlier_filter(
    dataset: TimeSeriesDataset,
    lo: float = 0.01,
    hi: float = 99.99,
    bands: dict[str, tuple[float, float]] | None = None,
) -> tuple[TimeSeriesDataset, int]:
    """Drop rows with any valid cell strictly outside its percentile band.

    Bands are computed on the data entering this call. A recomputed band on
    the survivors always interpolates strictly inside the surviving extremes,
    so exact re-application stability is only meaningful against fixed band
    values; pass ``bands`` to rerun with the first pass's intervals.
    """
    if bands is None:
        bands = percentile_bands(dataset, lo, hi)
    keep = np.ones(dataset.n_rows, dtype=bool)
    for name, values, mask in _columns(dataset):
        if name not in bands:
            raise PreprocessError(f"no band for column {name!r}")
        blo, bhi = bands[name]
        bad = mask & ((values < blo) | (values > bhi))
        keep &= ~bad
    removed = int(dataset.n_rows - keep.sum())
    return dataset.take(keep), removed


def _pearson(x, y) -> float:
    sx, sy = x.std(), y.std()
    if sx == 0.0 or sy == 0.0:
        return 0.0
    return float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * sy))


def prune_correlated(
    dataset: TimeSeriesDataset,
    target_channel: str = "NOX",
    threshold: float = 0.80,
) -> tuple[TimeSeriesDataset, dict[str, str], tuple[str, ...]]:
    """Collapse groups of mutually correlated parameters to one survivor.

    Parameters whose pairwise |Pearson r| exceeds the threshold are joined
    into connected components; within each, the parameter most correlated in
    magnitude with the target channel survives, ties (within 1e-12) falling
    to the lexicographically smaller name. Zero-variance columns never join a
    component; they are retained and reported separately.

    Returns the reduced dataset, a {pruned name: survivor name} map, and the
    zero-variance column names.
    """
    if target_channel not in dataset.emissions:
        raise PreprocessError(f"no emission channel {target_channel!r}")
    names = dataset.param_names
    p = len(names)
    target = dataset.emissions[target_channel]
    tmask = dataset.emission_valid[target_channel]

    cols = [dataset.params[:, j] for j in range(p)]
    masks = [dataset.param_valid[:, j] for j in range(p)]
    zero_var = tuple(
        names[j] for j in range(p) if cols[j][masks[j]].size == 0 or cols[j][masks[j]].std() == 0.0
    )
    active = [j for j in range(p) if names[j] not in zero_var]

    adj = {j: set() for j in active}
    for a_i, j in enumerate(active):
        for k in active[a_i + 1 :]:
            both = masks[j] & masks[k]
            if both.sum() < 2:
                continue
            if abs(_pearson(cols[j][both], cols[k][both])) > threshold:
                adj[j].add(k)
                adj[k].add(j)

    seen = set()
    pruned: dict[str, str] = {}
    for j in active:
        if j in seen:
            continue
        comp = []
        stack = [j]
        seen.add(j)
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(comp) < 2:
            continue
        scored = []
        for u in comp:
            both = masks[u] & tmask
            r = abs(_pearson(cols[u][both], target[both])) if both.sum() >= 2 else 0.0
            scored.append((u, r))
        best = max(r for _, r in scored)
        winners = sorted(names[u] for u, r in scored if best - r <= 1e-12)
        survivor = winners[0]
        for u, _ in scored:
            if names[u] != survivor:
                pruned[names[u]] = survivor

    kept = [n for n in names if n not in pruned]
    return dataset.keep_params(kept), pruned, zero_var


def run_pipeline(
    dataset: TimeSeriesDataset,
    rules: PhysicalRuleSet | None = None,
    lo: float = 0.01,
    hi: float = 99.99,
    threshold: float = 0.80,
    target_channel: str = "NOX",
) -> tuple[TimeSeriesDataset, PreprocessReport]:
    report = PreprocessReport(rows_in=dataset.n_rows, params_in=dataset.n_params)
    d, report.removed_consistency = consistency_check(dataset)
    if rules is not None:
        d, report.removed_physical = physical_validation(d, rules)
    d, report.removed_outlier = outlier_filter(d, lo, hi)
    d, report.pruned, report.zero_variance = prune_correlated(d, target_channel, threshold)
    report.rows_out = d.n_rows
    report.params_out = d.n_params
    return d, report
