"""Seeded synthetic kiln with known ground-truth emission dynamics.

The generator produces minute-resolution telemetry whose statistical structure
the rest of the package is exercised against:

- Process parameters follow mean-reverting AR(1) deviations around fixed
  bases, plus regime offsets and optional high-load stress windows.
- NOX responds to a 21-tap decaying lag kernel over the parameter history,
  with a fuel*fan interaction and a convex overload term, so the recent
  history is genuinely informative beyond the instantaneous readings.
- CO is a memoryless nonlinear map with heavy measurement noise.
- CO2 tracks a slow exponentially weighted average of the fuel mix with tiny
  noise, so it moves smoothly and stays predictable far ahead.

Consequences relied on elsewhere: minute-to-minute volatility orders as
CO > NOX >> CO2, and the forecastability horizon orders the opposite way.
Identical specs produce bitwise-identical datasets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import TimeSeriesDataset

START_MINUTE = 26_297_280  # 2020-01-01T00:00

# name with unit, nominal base, deviation scale (one sigma of stationary AR)
PLANT_PARAMS = (
    ("primary_air [m3/h]", 9500.0, 500.0),
    ("cooling_air [m3/h]", 285000.0, 14000.0),
    ("preheater_id_fan [%]", 76.0, 3.4),
    ("calciner_fuel [t/h]", 11.5, 0.55),
    ("kiln_fuel [t/h]", 5.8, 0.28),
    ("kiln_drive [kW]", 315.0, 16.0),
    ("kiln_inlet_pressure [mbar]", 5.2, 0.26),
    ("rm_flow [t/h]", 240.0, 4.5),
    ("rm_cao [wt%]", 43.2, 0.35),
    ("rm_sio2 [wt%]", 13.8, 0.21),
    ("secondary_air_temp [C]", 1050.0, 14.0),
    ("o2_kiln_inlet [%]", 3.2, 0.16),
)

PARAM_PHI = 0.88
CO2_EWMA_ALPHA = 1.0 / 180.0
_BURN = 260

DEFAULT_NOISE = {
    "NOX": 1.2,
    "CO": 6.0,
    "CO2": 0.2,
    "CLINKER_FLOW": 0.25,
    "FCAO": 0.02,
}


def default_kernel(n_taps: int = 21, decay: float = 7.0, delay: int = 2) -> tuple[float, ...]:
    """Decaying response weights over the parameter history. The first
    ``delay`` taps are zero: gas takes a couple of minutes to travel from
    the burning zone to the stack analyzer, so the newest readings have not
    reached the measurement yet."""
    lags = np.arange(n_taps, dtype=float)
    w = np.where(lags < delay, 0.0, np.exp(-(lags - delay) / decay))
    return tuple(w / w.sum())


@dataclass(frozen=True)
class GroundTruth:
    """Coefficients of the generating equations, in standardized-deviation
    units (per one deviation scale of each parameter)."""

    nox_base: float
    nox_weights: dict[str, float]
    product_pair: tuple[str, str]
    product_coef: float
    convex_pair: tuple[str, str]
    convex_coef: float
    convex_threshold: float
    convex_cap: float
    co_base: float
    co_weights: dict[str, float]
    co_quad_param: str
    co_quad_coef: float
    co2_base: float
    co2_gain: float
    co2_mix: dict[str, float]
    kernel: tuple[float, ...]
    phi: float


def ground_truth(spec: "SyntheticPlantSpec") -> GroundTruth:
    return GroundTruth(
        nox_base=320.0,
        nox_weights={
            "primary_air [m3/h]": 8.0,
            "cooling_air [m3/h]": -6.0,
            "preheater_id_fan [%]": 24.0,
            "calciner_fuel [t/h]": 30.0,
            "kiln_fuel [t/h]": 12.0,
            "kiln_drive [kW]": 4.0,
            "kiln_inlet_pressure [mbar]": -5.0,
            "rm_flow [t/h]": 3.0,
            "rm_cao [wt%]": -4.0,
            "rm_sio2 [wt%]": 2.0,
            "secondary_air_temp [C]": 9.0,
            "o2_kiln_inlet [%]": 10.0,
        },
        product_pair=("calciner_fuel [t/h]", "preheater_id_fan [%]"),
        product_coef=5.0,
        convex_pair=("calciner_fuel [t/h]", "preheater_id_fan [%]"),
        convex_coef=12.0,
        convex_threshold=2.5,
        convex_cap=2.0,
        co_base=150.0,
        co_weights={
            "kiln_fuel [t/h]": 14.0,
            "o2_kiln_inlet [%]": -12.0,
            "primary_air [m3/h]": 6.0,
            "secondary_air_temp [C]": -5.0,
        },
        co_quad_param="o2_kiln_inlet [%]",
        co_quad_coef=4.0,
        co2_base=2000.0,
        co2_gain=50.0,
        co2_mix={
            "calciner_fuel [t/h]": 0.5,
            "kiln_fuel [t/h]": 0.3,
            "o2_kiln_inlet [%]": 0.2,
        },
        kernel=tuple(spec.nox_memory_kernel),
        phi=PARAM_PHI,
    )


@dataclass(frozen=True)
class SyntheticPlantSpec:
    seed: int = 0
    duration_minutes: int = 50_000
    n_params: int = 12
    nox_memory_kernel: tuple[float, ...] = field(default_factory=default_kernel)
    noise_sigma: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_NOISE))
    # (start_minute, end_minute, {param name: raw-unit offset}), end exclusive,
    # minutes counted from the first dataset row
    regime_schedule: tuple = ()
    # (start_minute, end_minute) windows whose rows are deleted outright
    gap_schedule: tuple = ()
    stress_fraction: float = 0.0
    param_drift_scale: float = 1.0


def default_plant_spec(seed: int = 0, duration_minutes: int = 50_000) -> SyntheticPlantSpec:
    """Spec with mild operating regimes, two maintenance gaps, and a slice of
    high-load stress operation. This is the configuration the command line and
    most tests run against."""
    d = duration_minutes
    regimes = (
        (
            int(0.25 * d),
            int(0.45 * d),
            {
                "calciner_fuel [t/h]": 0.8 * 0.55,
                "kiln_fuel [t/h]": -0.5 * 0.28,
                "o2_kiln_inlet [%]": 0.6 * 0.16,
            },
        ),
        (
            int(0.60 * d),
            int(0.80 * d),
            {
                "rm_flow [t/h]": 0.7 * 4.5,
                "kiln_drive [kW]": 0.5 * 16.0,
                "primary_air [m3/h]": 0.4 * 500.0,
            },
        ),
    )
    gaps = (
        (int(0.35 * d), int(0.35 * d) + 400),
        (int(0.70 * d), int(0.70 * d) + 250),
    )
    return SyntheticPlantSpec(
        seed=seed,
        duration_minutes=duration_minutes,
        regime_schedule=regimes,
        gap_schedule=gaps,
        stress_fraction=0.05,
    )


def _param_table(n_params: int):
    if n_params < len(PLANT_PARAMS):
        raise ValueError(f"n_params must be >= {len(PLANT_PARAMS)}")
    table = list(PLANT_PARAMS)
    for i in range(n_params - len(PLANT_PARAMS)):
        table.append((f"aux_{i:02d} [u]", 100.0, 5.0))
    return table


def generate_synthetic_plant(spec: SyntheticPlantSpec) -> TimeSeriesDataset:
    if spec.duration_minutes <= 0:
        raise ValueError("duration_minutes must be positive")
    kernel = np.asarray(spec.nox_memory_kernel, dtype=float)
    if kernel.size == 0:
        raise ValueError("nox_memory_kernel must be non-empty")
    kernel = kernel / kernel.sum()
    if not (0.0 <= spec.stress_fraction < 1.0):
        raise ValueError("stress_fraction must be in [0, 1)")

    table = _param_table(spec.n_params)
    names = [t[0] for t in table]
    bases = np.array([t[1] for t in table])
    scales = np.array([t[2] for t in table])
    col = {n: i for i, n in enumerate(names)}

    gt = ground_truth(spec)
    rng = np.random.default_rng(spec.seed)
    n = spec.duration_minutes
    total = n + _BURN
    p = len(table)

    # mean-reverting deviations, stationary sigma = scale * drift_scale
    innov_sigma = scales * spec.param_drift_scale * math.sqrt(1.0 - PARAM_PHI**2)
    shocks = rng.standard_normal((total, p)) * innov_sigma
    dev = np.empty((total, p))
    dev[0] = shocks[0] / math.sqrt(1.0 - PARAM_PHI**2)
    for t in range(1, total):
        dev[t] = PARAM_PHI * dev[t - 1] + shocks[t]

    offsets = np.zeros((total, p))
    for start, end, shift in spec.regime_schedule:
        a, b = _BURN + int(start), _BURN + int(end)
        for name, raw in shift.items():
            if name not in col:
                raise ValueError(f"regime offset names unknown parameter {name!r}")
            offsets[a:b, col[name]] += raw

    for a, b in _stress_windows(spec, rng):
        offsets[_BURN + a : _BURN + b, col["calciner_fuel [t/h]"]] += 2.5 * 0.55
        offsets[_BURN + a : _BURN + b, col["preheater_id_fan [%]"]] += 2.5 * 3.4
        offsets[_BURN + a : _BURN + b, col["kiln_fuel [t/h]"]] += 1.0 * 0.28

    raw = bases + dev + offsets
    fan = col["preheater_id_fan [%]"]
    raw[:, fan] = np.clip(raw[:, fan], 0.0, 100.0)
    dev_eff = raw - bases

    z_inst = dev_eff / scales
    z_sm = np.empty_like(z_inst)
    for j in range(p):
        z_sm[:, j] = np.convolve(dev_eff[:, j], kernel, mode="full")[:total] / scales[j]

    mix = sum(w * z_inst[:, col[name]] for name, w in gt.co2_mix.items())
    slow = np.empty(total)
    slow[0] = 0.0
    a = CO2_EWMA_ALPHA
    for t in range(1, total):
        slow[t] = (1.0 - a) * slow[t - 1] + a * mix[t]

    sig = dict(DEFAULT_NOISE)
    sig.update(spec.noise_sigma)

    nox = np.full(total, gt.nox_base)
    for name, w in gt.nox_weights.items():
        nox += w * z_sm[:, col[name]]
    za, zb = z_sm[:, col[gt.product_pair[0]]], z_sm[:, col[gt.product_pair[1]]]
    nox += gt.product_coef * za * zb
    # overload response saturates: formation chemistry tops out
    overload = np.clip(za + zb - gt.convex_threshold, 0.0, gt.convex_cap)
    nox += gt.convex_coef * overload**2
    nox += sig["NOX"] * rng.standard_normal(total)

    co = np.full(total, gt.co_base)
    for name, w in gt.co_weights.items():
        co += w * z_inst[:, col[name]]
    zq = z_inst[:, col[gt.co_quad_param]]
    co += gt.co_quad_coef * (zq**2 - 1.0)
    co += sig["CO"] * rng.standard_normal(total)

    co2 = gt.co2_base + gt.co2_gain * slow + sig["CO2"] * rng.standard_normal(total)

    z_drive = z_sm[:, col["kiln_drive [kW]"]]
    z_kf = z_sm[:, col["kiln_fuel [t/h]"]]
    clinker = 0.62 * raw[:, col["rm_flow [t/h]"]] * (
        1.0 + 0.0004 * z_drive + 0.0005 * z_kf
    ) + sig["CLINKER_FLOW"] * rng.standard_normal(total)

    fcao = (
        1.0
        + 0.10 * z_sm[:, col["rm_flow [t/h]"]]
        - 0.06 * za
        - 0.05 * z_sm[:, col["secondary_air_temp [C]"]]
        + sig["FCAO"] * rng.standard_normal(total)
    )

    sl = slice(_BURN, total)
    emissions = {
        "NOX": np.maximum(nox[sl], 1.0),
        "CO": np.maximum(co[sl], 1.0),
        "CO2": np.maximum(co2[sl], 1.0),
        "CLINKER_FLOW": np.maximum(clinker[sl], 0.1),
        "FCAO": np.maximum(fcao[sl], 0.05),
    }
    params = raw[sl]
    timestamps = START_MINUTE + np.arange(n, dtype=np.int64)

    keep = np.ones(n, dtype=bool)
    for a_, b_ in spec.gap_schedule:
        keep[int(a_) : int(b_)] = False

    return TimeSeriesDataset(
        timestamps=timestamps[keep],
        param_names=tuple(names),
        params=params[keep],
        emissions={ch: v[keep] for ch, v in emissions.items()},
    )


def _stress_windows(spec: SyntheticPlantSpec, rng: np.random.Generator):
    """Contiguous 180-minute high-load blocks covering roughly
    stress_fraction of the run, placed by the spec's own rng stream."""
    if spec.stress_fraction <= 0.0:
        return []
    block = 180
    n_blocks = max(1, round(spec.stress_fraction * spec.duration_minutes / block))
    starts = np.arange(0, max(1, spec.duration_minutes - block), block)
    if len(starts) < n_blocks:
        n_blocks = len(starts)
    chosen = rng.choice(starts, size=n_blocks, replace=False)
    return [(int(s), int(s) + block) for s in sorted(chosen)]


@dataclass(frozen=True)
class InjectionLog:
    """Row bookkeeping for artificially corrupted datasets."""

    duplicate_rows: tuple[int, ...]
    missing_rows: tuple[int, ...]
    negative_rows: tuple[int, ...]

    @property
    def consistency_removals(self) -> int:
        return len(self.duplicate_rows) + len(self.missing_rows)


def inject_artifacts(
    dataset: TimeSeriesDataset,
    duplicate_fraction: float = 0.0,
    missing_fraction: float = 0.0,
    negative_fraction: float = 0.0,
    seed: int = 0,
) -> tuple[TimeSeriesDataset, InjectionLog]:
    """Corrupt a clean dataset in controlled, disjoint ways and log exactly
    what was done, so cleaning stages can be checked against ground truth.

    Duplicates insert a second copy of a row at the same timestamp directly
    after the original (values perturbed, so keep-first is observable).
    Missing marks one parameter cell invalid in otherwise distinct rows.
    Negatives overwrite the NOX value of further distinct rows with a
    negative reading.
    """
    rng = np.random.default_rng(seed)
    n = dataset.n_rows
    n_dup = int(round(duplicate_fraction * n))
    n_miss = int(round(missing_fraction * n))
    n_neg = int(round(negative_fraction * n))
    if n_dup + n_miss + n_neg > n:
        raise ValueError("corruption fractions exceed dataset size")

    perm = rng.permutation(n)
    dup_rows = np.sort(perm[:n_dup])
    miss_rows = np.sort(perm[n_dup : n_dup + n_miss])
    neg_rows = np.sort(perm[n_dup + n_miss : n_dup + n_miss + n_neg])

    params = dataset.params.copy()
    param_valid = dataset.param_valid.copy()
    emissions = {ch: v.copy() for ch, v in dataset.emissions.items()}
    emission_valid = {ch: m.copy() for ch, m in dataset.emission_valid.items()}

    for r in miss_rows:
        j = rng.integers(dataset.n_params)
        param_valid[r, j] = False
    if "NOX" in emissions:
        for r in neg_rows:
            emissions["NOX"][r] = -abs(emissions["NOX"][r]) - 1.0

    ts = dataset.timestamps
    dup_set = set(int(r) for r in dup_rows)
    idx = []
    is_copy = []
    for i in range(n):
        idx.append(i)
        is_copy.append(False)
        if i in dup_set:
            idx.append(i)
            is_copy.append(True)
    idx = np.asarray(idx)
    is_copy = np.asarray(is_copy)

    new_params = params[idx]
    new_valid = param_valid[idx]
    jitter = rng.standard_normal(new_params.shape) * 1e-6
    new_params[is_copy] += np.abs(new_params[is_copy]) * jitter[is_copy]
    corrupted = TimeSeriesDataset(
        timestamps=ts[idx],
        param_names=dataset.param_names,
        params=new_params,
        emissions={ch: v[idx] for ch, v in emissions.items()},
        param_valid=new_valid,
        emission_valid={ch: m[idx] for ch, m in emission_valid.items()},
    )
    log = InjectionLog(
        duplicate_rows=tuple(int(r) for r in dup_rows),
        missing_rows=tuple(int(r) for r in miss_rows),
        negative_rows=tuple(int(r) for r in neg_rows),
    )
    return corrupted, log
