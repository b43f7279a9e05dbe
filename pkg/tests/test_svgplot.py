"""SVG chart rendering: well-formed markup, escaping, determinism."""

import xml.etree.ElementTree as ET

import numpy as np
import pytest

from kilnopt.svgplot import line_chart, write_svg

_NS = "{http://www.w3.org/2000/svg}"


def _chart(**kw):
    xs = np.arange(10.0)
    return line_chart(
        [("alpha", xs, np.sin(xs)), ("beta", xs, np.cos(xs))],
        title="two waves",
        x_label="minute",
        y_label="level",
        **kw,
    )


def test_chart_is_well_formed_svg():
    root = ET.fromstring(_chart())
    assert root.tag == f"{_NS}svg"
    assert root.get("width") == "760"
    polylines = root.findall(f"{_NS}polyline")
    assert len(polylines) == 2
    texts = [t.text for t in root.iter(f"{_NS}text")]
    assert "two waves" in texts
    assert "alpha" in texts and "beta" in texts
    assert "minute" in texts and "level" in texts


def test_chart_escapes_markup_in_labels():
    xs = [0.0, 1.0]
    svg = line_chart(
        [("a < b & c", xs, [1.0, 2.0])], title="x>y", x_label="<t>", y_label="&v"
    )
    root = ET.fromstring(svg)  # parse would fail on raw < & in text
    texts = [t.text for t in root.iter(f"{_NS}text")]
    assert "a < b & c" in texts
    assert "x>y" in texts


def test_band_adds_polygon_behind_lines():
    xs = np.arange(6.0)
    svg = line_chart(
        [("m", xs, xs * 2.0)],
        title="forecast",
        x_label="step",
        y_label="ppm",
        band=(xs, xs * 2.0 - 1.0, xs * 2.0 + 1.0),
    )
    root = ET.fromstring(svg)
    assert len(root.findall(f"{_NS}polygon")) == 1
    body = svg
    assert body.index("<polygon") < body.index("<polyline")


def test_chart_determinism_and_size():
    assert _chart() == _chart()
    small = _chart(width=320, height=200)
    assert ET.fromstring(small).get("height") == "200"


def test_degenerate_extents_still_render():
    # constant series and a single point must not divide by zero
    one = line_chart([("p", [3.0], [7.0])], title="t", x_label="x", y_label="y")
    flat = line_chart([("f", [0.0, 1.0], [5.0, 5.0])], title="t", x_label="x", y_label="y")
    ET.fromstring(one)
    ET.fromstring(flat)


def test_chart_validation():
    with pytest.raises(ValueError, match="at least one"):
        line_chart([], title="t", x_label="x", y_label="y")
    with pytest.raises(ValueError, match="lengths"):
        line_chart([("a", [1.0, 2.0], [1.0])], title="t", x_label="x", y_label="y")


def test_write_svg_round_trip(tmp_path):
    svg = _chart()
    path = tmp_path / "chart.svg"
    write_svg(str(path), svg)
    assert path.read_text(encoding="utf-8") == svg
