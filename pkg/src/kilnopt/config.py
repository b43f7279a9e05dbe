"""Sectioned run configuration: INI file, environment overrides, defaults.

Precedence, lowest to highest: built-in defaults, config file,
``KILNOPT_<SECTION>_<KEY>`` environment variables. Unknown sections or
keys are rejected outright - a typo should fail the run, not silently
fall back to a default.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field

from .controller import ControllerConfig
from .econ import EconConfig
from .forecast import ForecastConfig
from .models import Family, RegressorSpec

ENV_PREFIX = "KILNOPT_"


class ConfigError(ValueError):
    """Malformed or unknown configuration input."""


_SCHEMA = {
    "paths": {"out_dir": str, "input": str},
    "generate": {"seed": int, "duration_minutes": int, "stress_fraction": float},
    "preprocess": {
        "percentile_lo": float,
        "percentile_hi": float,
        "corr_threshold": float,
        "target_channel": str,
    },
    "surrogate": {
        "family": str,
        "tau": int,
        "train_fraction": float,
        "seed": int,
        "n_rounds": int,
        "learning_rate": float,
        "max_depth": int,
        "min_samples_leaf": int,
        "n_trees": int,
        "ridge_lambda": float,
        "lasso_lambda": float,
    },
    "benchmark": {"families": str, "n_seeds": int, "train_fraction": float},
    "forecast": {
        "lookback": int,
        "horizon": int,
        "train_fraction": float,
        "buffer_minutes": int,
        "n_events": int,
        "level": float,
        "seed": int,
    },
    "controller": {
        "delta": float,
        "w_corr": float,
        "w_operate": float,
        "iterations": int,
        "population_size": int,
        "hard_penalty": float,
        "seed": int,
        "n_trials": int,
        "train_fraction": float,
    },
    "econ": {
        "nsr": float,
        "nh3_price_usd_per_t": float,
        "eta_normal": float,
        "eta_stress": float,
        "stress_threshold_ppm": float,
        "flue_gas_nm3_per_kg_clinker": float,
    },
}

_DEFAULTS = {
    "paths": {"out_dir": "out", "input": ""},
    "generate": {"seed": 0, "duration_minutes": 50_000, "stress_fraction": 0.05},
    "preprocess": {
        "percentile_lo": 0.01,
        "percentile_hi": 99.99,
        "corr_threshold": 0.80,
        "target_channel": "NOX",
    },
    "surrogate": {
        "family": "GBT",
        "tau": 20,
        "train_fraction": 0.75,
        "seed": 0,
        "n_rounds": 250,
        "learning_rate": 0.1,
        "max_depth": 5,
        "min_samples_leaf": 20,
        "n_trees": 200,
        "ridge_lambda": 1.0,
        "lasso_lambda": 1e-3,
    },
    "benchmark": {
        "families": "LINEAR,RIDGE,LASSO,RANDOM_FOREST,GBT",
        "n_seeds": 3,
        "train_fraction": 0.75,
    },
    "forecast": {
        "lookback": 25,
        "horizon": 60,
        "train_fraction": 0.70,
        "buffer_minutes": 120,
        "n_events": 3000,
        "level": 0.90,
        "seed": 0,
    },
    "controller": {
        "delta": 0.05,
        "w_corr": 0.20,
        "w_operate": 0.15,
        "iterations": 35,
        "population_size": 32,
        "hard_penalty": 1e6,
        "seed": 0,
        "n_trials": 500,
        "train_fraction": 0.70,
    },
    "econ": {
        "nsr": 1.2,
        "nh3_price_usd_per_t": 450.0,
        "eta_normal": 0.34,
        "eta_stress": 0.64,
        "stress_threshold_ppm": 500.0,
        "flue_gas_nm3_per_kg_clinker": 1.7,
    },
}


@dataclass(frozen=True)
class RunConfig:
    values: dict = field(default_factory=dict)
    source_path: str = ""
    source_text: str = ""

    def get(self, section: str, key: str):
        return self.values[section][key]

    def section(self, section: str) -> dict:
        return dict(self.values[section])


def _coerce(section: str, key: str, raw: str):
    kind = _SCHEMA[section][key]
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return str(raw)
    except ValueError:
        raise ConfigError(
            f"config value [{section}] {key} = {raw!r} is not a valid {kind.__name__}"
        ) from None


def load_config(path: str = None, env: dict = None) -> RunConfig:
    values = {sec: dict(keys) for sec, keys in _DEFAULTS.items()}
    text = ""
    if path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        parser = configparser.ConfigParser()
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"config parse error: {exc}") from None
        for sec in parser.sections():
            if sec not in _SCHEMA:
                raise ConfigError(f"unknown config section [{sec}]")
            for key, raw in parser.items(sec):
                if key not in _SCHEMA[sec]:
                    raise ConfigError(f"unknown config key [{sec}] {key}")
                values[sec][key] = _coerce(sec, key, raw)

    env = env if env is not None else os.environ
    for name, raw in env.items():
        if not name.startswith(ENV_PREFIX):
            continue
        rest = name[len(ENV_PREFIX) :].lower()
        sec, _, key = rest.partition("_")
        if sec not in _SCHEMA or key not in _SCHEMA[sec]:
            raise ConfigError(f"unknown config override {name}")
        values[sec][key] = _coerce(sec, key, raw)

    inp = values["paths"]["input"]
    if inp and not os.path.exists(inp):
        raise ConfigError(f"input path does not exist: {inp}")
    return RunConfig(values=values, source_path=path or "", source_text=text)


def regressor_spec_from(config: RunConfig, family: str = None, seed: int = None) -> RegressorSpec:
    sec = config.section("surrogate")
    name = (family or sec["family"]).upper()
    try:
        fam = Family[name]
    except KeyError:
        raise ConfigError(
            f"unknown model family {name!r}; choose from "
            f"{', '.join(f.name for f in Family)}"
        ) from None
    return RegressorSpec(
        family=fam,
        seed=sec["seed"] if seed is None else seed,
        ridge_lambda=sec["ridge_lambda"],
        lasso_lambda=sec["lasso_lambda"],
        n_rounds=sec["n_rounds"],
        learning_rate=sec["learning_rate"],
        max_depth=sec["max_depth"],
        min_samples_leaf=sec["min_samples_leaf"],
        n_trees=sec["n_trees"],
    )


def forecast_config_from(config: RunConfig, **overrides) -> ForecastConfig:
    sec = config.section("forecast")
    sec.pop("seed")
    sec.update(overrides)
    return ForecastConfig(**sec)


def controller_config_from(config: RunConfig, seed: int = None) -> ControllerConfig:
    sec = config.section("controller")
    sec.pop("n_trials")
    sec.pop("train_fraction")
    if seed is not None:
        sec["seed"] = seed
    return ControllerConfig(**sec)


def econ_config_from(config: RunConfig) -> EconConfig:
    return EconConfig(**config.section("econ"))
