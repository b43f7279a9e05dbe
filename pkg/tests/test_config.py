"""Layered run configuration: defaults, INI file, environment overrides,
and the typed builders the CLI hands to each stage."""

import pytest

from kilnopt.config import (
    ConfigError,
    controller_config_from,
    econ_config_from,
    forecast_config_from,
    load_config,
    regressor_spec_from,
)
from kilnopt.models import Family


def test_defaults_without_file_or_env():
    cfg = load_config(None, env={})
    assert cfg.get("generate", "seed") == 0
    assert cfg.get("generate", "duration_minutes") == 50_000
    assert cfg.get("surrogate", "family") == "GBT"
    assert cfg.get("surrogate", "tau") == 20
    assert cfg.get("econ", "nsr") == 1.2
    assert cfg.get("forecast", "horizon") == 60
    assert cfg.source_path == "" and cfg.source_text == ""
    # section() hands out a copy
    sec = cfg.section("generate")
    sec["seed"] = 99
    assert cfg.get("generate", "seed") == 0


def test_file_overrides_defaults(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text(
        "[generate]\nseed = 7\nduration_minutes = 1200\n"
        "[surrogate]\nfamily = ridge\nridge_lambda = 2.5\n"
    )
    cfg = load_config(str(p), env={})
    assert cfg.get("generate", "seed") == 7
    assert isinstance(cfg.get("generate", "seed"), int)
    assert cfg.get("surrogate", "family") == "ridge"
    assert cfg.get("surrogate", "ridge_lambda") == 2.5
    # untouched keys keep their defaults
    assert cfg.get("generate", "stress_fraction") == 0.05
    assert cfg.source_text == p.read_text()


def test_env_overrides_beat_file(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text("[generate]\nseed = 7\n")
    env = {
        "KILNOPT_GENERATE_SEED": "9",
        "KILNOPT_GENERATE_DURATION_MINUTES": "600",
        "KILNOPT_ECON_NH3_PRICE_USD_PER_T": "500.5",
        "UNRELATED": "ignored",
    }
    cfg = load_config(str(p), env=env)
    assert cfg.get("generate", "seed") == 9
    assert cfg.get("generate", "duration_minutes") == 600
    assert cfg.get("econ", "nh3_price_usd_per_t") == 500.5


def test_unknown_section_key_and_env_rejected(tmp_path):
    bad_section = tmp_path / "a.ini"
    bad_section.write_text("[nosuch]\nx = 1\n")
    with pytest.raises(ConfigError, match="unknown config section"):
        load_config(str(bad_section), env={})

    bad_key = tmp_path / "b.ini"
    bad_key.write_text("[generate]\nspeed = 1\n")
    with pytest.raises(ConfigError, match="unknown config key"):
        load_config(str(bad_key), env={})

    with pytest.raises(ConfigError, match="unknown config override"):
        load_config(None, env={"KILNOPT_GENERATE_SPEED": "1"})


def test_coercion_and_parse_errors(tmp_path):
    bad_value = tmp_path / "v.ini"
    bad_value.write_text("[generate]\nseed = soon\n")
    with pytest.raises(ConfigError, match=r"\[generate\] seed"):
        load_config(str(bad_value), env={})
    with pytest.raises(ConfigError, match="not a valid int"):
        load_config(None, env={"KILNOPT_GENERATE_SEED": "1.5"})

    mangled = tmp_path / "m.ini"
    mangled.write_text("seed = 1\n")  # key before any section header
    with pytest.raises(ConfigError, match="parse error"):
        load_config(str(mangled), env={})

    with pytest.raises(ConfigError, match="not found"):
        load_config(str(tmp_path / "absent.ini"), env={})


def test_input_path_must_exist(tmp_path):
    missing = tmp_path / "i.ini"
    missing.write_text("[paths]\ninput = /no/such/file.csv\n")
    with pytest.raises(ConfigError, match="does not exist"):
        load_config(str(missing), env={})

    data = tmp_path / "data.csv"
    data.write_text("x\n")
    ok = tmp_path / "ok.ini"
    ok.write_text(f"[paths]\ninput = {data}\n")
    assert load_config(str(ok), env={}).get("paths", "input") == str(data)


def test_regressor_spec_builder():
    cfg = load_config(None, env={})
    spec = regressor_spec_from(cfg)
    assert spec.family is Family.GBT
    assert spec.n_rounds == 250
    assert spec.seed == 0
    # explicit family (any case) and seed win over the config
    spec = regressor_spec_from(cfg, family="linear", seed=4)
    assert spec.family is Family.LINEAR
    assert spec.seed == 4
    with pytest.raises(ConfigError, match="choose from"):
        regressor_spec_from(cfg, family="SVM")


def test_stage_config_builders():
    cfg = load_config(None, env={})
    fc = forecast_config_from(cfg)
    assert fc.lookback == 25 and fc.horizon == 60
    assert forecast_config_from(cfg, horizon=12).horizon == 12

    cc = controller_config_from(cfg)
    assert cc.iterations == 35 and cc.population_size == 32
    assert controller_config_from(cfg, seed=8).seed == 8

    ec = econ_config_from(cfg)
    assert ec.nsr == 1.2 and ec.eta_stress == 0.64
