import numpy as np
import pytest

from kilnopt.csvio import (
    CsvFormatError,
    CsvSchema,
    iso_to_minutes,
    load_csv,
    minutes_to_iso,
    write_csv,
)
from util import make_dataset


def test_minute_iso_round_trip():
    assert minutes_to_iso(0) == "1970-01-01T00:00"
    assert iso_to_minutes("1970-01-01T01:30", line=2) == 90
    for m in (0, 1, 525_600, 26_297_280):
        assert iso_to_minutes(minutes_to_iso(m), line=2) == m


def test_fractional_timestamp_rejected():
    with pytest.raises(CsvFormatError, match="finer than minute"):
        iso_to_minutes("1970-01-01T00:00:30", line=7)
    with pytest.raises(CsvFormatError, match="line 7"):
        iso_to_minutes("not-a-time", line=7)


def test_write_load_round_trip_exact(tmp_path):
    rng = np.random.default_rng(3)
    ds = make_dataset(
        {"a [u]": rng.normal(5, 2, 20), "b [u]": rng.normal(-3, 7, 20)},
        {"NOX": rng.uniform(100, 900, 20), "CO": rng.uniform(50, 3000, 20)},
        timestamps=np.arange(100, 120),
    )
    path = tmp_path / "t.csv"
    write_csv(ds, path)
    back = load_csv(path)
    np.testing.assert_array_equal(back.timestamps, ds.timestamps)
    assert back.param_names == ds.param_names
    np.testing.assert_array_equal(back.params, ds.params)
    assert back.channels == ds.channels
    for ch in ds.channels:
        np.testing.assert_array_equal(back.emissions[ch], ds.emissions[ch])


def test_missing_cells_survive_round_trip_as_invalid(tmp_path):
    ds = make_dataset(
        {"a [u]": [1.0, 2.0, 3.0]},
        {"NOX": [7.0, 8.0, 9.0]},
        param_valid=np.array([[True], [False], [True]]),
        emission_valid={"NOX": np.array([True, True, False])},
    )
    path = tmp_path / "t.csv"
    write_csv(ds, path)
    back = load_csv(path)
    np.testing.assert_array_equal(back.param_valid[:, 0], [True, False, True])
    np.testing.assert_array_equal(back.emission_valid["NOX"], [True, True, False])
    # missing loads as masked NaN, never as zero
    assert np.isnan(back.params[1, 0])
    assert back.emissions["NOX"][1] == 8.0


def test_write_is_deterministic(tmp_path):
    rng = np.random.default_rng(5)
    ds = make_dataset(
        {"a [u]": rng.normal(size=50)}, {"NOX": rng.uniform(1, 2, 50)}
    )
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(ds, p1)
    write_csv(ds, p2)
    assert p1.read_bytes() == p2.read_bytes()


def _write(tmp_path, text):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    return p


def test_empty_file_rejected(tmp_path):
    with pytest.raises(CsvFormatError, match="line 1"):
        load_csv(_write(tmp_path, ""))


def test_header_must_start_with_timestamp(tmp_path):
    with pytest.raises(CsvFormatError, match="timestamp"):
        load_csv(_write(tmp_path, "a [u],NOX [PPM]\n"))


def test_param_after_emission_rejected(tmp_path):
    text = "timestamp,NOX [PPM],a [u]\n"
    with pytest.raises(CsvFormatError, match="after emission"):
        load_csv(_write(tmp_path, text))


def test_wrong_cell_count_reports_line(tmp_path):
    text = "timestamp,a [u],NOX [PPM]\n1970-01-01T00:00,1.0,2.0\n1970-01-01T00:01,1.0\n"
    with pytest.raises(CsvFormatError, match="line 3"):
        load_csv(_write(tmp_path, text))


def test_non_numeric_cell_reports_column(tmp_path):
    text = "timestamp,a [u],NOX [PPM]\n1970-01-01T00:00,oops,2.0\n"
    with pytest.raises(CsvFormatError, match="'a \\[u\\]'"):
        load_csv(_write(tmp_path, text))


def test_backwards_time_rejected(tmp_path):
    text = (
        "timestamp,a [u],NOX [PPM]\n"
        "1970-01-01T00:05,1.0,2.0\n"
        "1970-01-01T00:04,1.0,2.0\n"
    )
    with pytest.raises(CsvFormatError, match="backwards"):
        load_csv(_write(tmp_path, text))


def test_duplicate_timestamps_load(tmp_path):
    text = (
        "timestamp,a [u],NOX [PPM]\n"
        "1970-01-01T00:05,1.0,2.0\n"
        "1970-01-01T00:05,3.0,4.0\n"
    )
    ds = load_csv(_write(tmp_path, text))
    assert ds.n_rows == 2
    assert not ds.strictly_increasing()


def test_schema_enforcement(tmp_path):
    ds = make_dataset({"a [u]": [1.0]}, {"NOX": [2.0]})
    path = tmp_path / "t.csv"
    write_csv(ds, path)
    good = CsvSchema(param_names=("a [u]",), channels=("NOX",))
    load_csv(path, schema=good)
    with pytest.raises(CsvFormatError, match="parameter columns"):
        load_csv(path, schema=CsvSchema(param_names=("b [u]",), channels=("NOX",)))
    with pytest.raises(CsvFormatError, match="emission columns"):
        load_csv(path, schema=CsvSchema(param_names=("a [u]",), channels=("CO",)))


def test_round_trip_on_generated_plant(tmp_path, small_raw):
    ds, _ = small_raw
    path = tmp_path / "plant.csv"
    write_csv(ds, path)
    back = load_csv(path)
    np.testing.assert_array_equal(back.timestamps, ds.timestamps)
    valid = ds.param_valid
    np.testing.assert_array_equal(back.param_valid, valid)
    np.testing.assert_array_equal(back.params[valid], ds.params[valid])
    for ch in ds.channels:
        m = ds.emission_valid[ch]
        np.testing.assert_array_equal(back.emission_valid[ch], m)
        np.testing.assert_array_equal(back.emissions[ch][m], ds.emissions[ch][m])
