"""Minimal SVG line charts, emitted as direct markup.

Charts here are diagnostic artifacts for CLI runs. Every chart the CLI
writes is paired with a CSV holding the same numbers, so nothing is
locked inside the picture. No plotting library is involved; the output
is deterministic byte-for-byte for identical inputs.
"""

from __future__ import annotations

import math

_PALETTE = ("#1f6fb2", "#d1495b", "#3e8e5a", "#8c5fa8", "#c78a2d", "#4a4a4a")

_MARGIN_L = 64
_MARGIN_R = 16
_MARGIN_T = 36
_MARGIN_B = 46


def _esc(text: str) -> str:
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
    )


def _fmt(x: float) -> str:
    # trim trailing zeros so identical data renders identically
    s = f"{x:.6g}"
    return "0" if s == "-0" else s


def _ticks(lo: float, hi: float, n: int = 5) -> list:
    """Round tick positions covering [lo, hi] using a 1-2-5 ladder."""
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    raw = span / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if step >= raw:
            break
    start = math.floor(lo / step) * step
    out = []
    t = start
    while t <= hi + 0.5 * step:
        out.append(round(t, 10))
        t += step
    return out


def line_chart(
    series: list,
    title: str,
    x_label: str,
    y_label: str,
    width: int = 760,
    height: int = 440,
    band: tuple = None,
) -> str:
    """Render labelled polylines (and an optional shaded band) to SVG.

    series: [(label, xs, ys), ...]; band: (xs, lo, hi) drawn behind the
    lines, e.g. a forecast uncertainty envelope.
    """
    if not series:
        raise ValueError("line_chart needs at least one series")
    all_x, all_y = [], []
    for _, xs, ys in series:
        if len(xs) != len(ys):
            raise ValueError("series x and y lengths differ")
        all_x.extend(float(v) for v in xs)
        all_y.extend(float(v) for v in ys)
    if band is not None:
        bx, blo, bhi = band
        all_x.extend(float(v) for v in bx)
        all_y.extend(float(v) for v in blo)
        all_y.extend(float(v) for v in bhi)
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.04 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    plot_w = width - _MARGIN_L - _MARGIN_R
    plot_h = height - _MARGIN_T - _MARGIN_B

    def px(x: float) -> float:
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14" '
        f'font-weight="bold">{_esc(title)}</text>',
    ]

    for t in _ticks(x_lo, x_hi):
        if t < x_lo - 1e-12 or t > x_hi + 1e-12:
            continue
        x = px(t)
        parts.append(
            f'<line x1="{x:.1f}" y1="{_MARGIN_T}" x2="{x:.1f}" '
            f'y2="{_MARGIN_T + plot_h}" stroke="#dddddd"/>'
        )
        parts.append(
            f'<text x="{x:.1f}" y="{_MARGIN_T + plot_h + 16}" '
            f'text-anchor="middle">{_fmt(t)}</text>'
        )
    for t in _ticks(y_lo, y_hi):
        if t < y_lo - 1e-12 or t > y_hi + 1e-12:
            continue
        y = py(t)
        parts.append(
            f'<line x1="{_MARGIN_L}" y1="{y:.1f}" x2="{_MARGIN_L + plot_w}" '
            f'y2="{y:.1f}" stroke="#dddddd"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_L - 6}" y="{y + 4:.1f}" '
            f'text-anchor="end">{_fmt(t)}</text>'
        )
    parts.append(
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="#333333"/>'
    )

    if band is not None:
        bx, blo, bhi = band
        fwd = " ".join(f"{px(float(x)):.1f},{py(float(y)):.1f}" for x, y in zip(bx, bhi))
        rev = " ".join(
            f"{px(float(x)):.1f},{py(float(y)):.1f}"
            for x, y in zip(reversed(list(bx)), reversed(list(blo)))
        )
        parts.append(f'<polygon points="{fwd} {rev}" fill="#1f6fb2" opacity="0.15"/>')

    for i, (label, xs, ys) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{px(float(x)):.1f},{py(float(y)):.1f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.6"/>'
        )
        ly = _MARGIN_T + 14 + 16 * i
        lx = _MARGIN_L + plot_w - 150
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(f'<text x="{lx + 28}" y="{ly}">{_esc(label)}</text>')

    parts.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{height - 10}" '
        f'text-anchor="middle">{_esc(x_label)}</text>'
    )
    parts.append(
        f'<text x="16" y="{_MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MARGIN_T + plot_h / 2:.1f})">{_esc(y_label)}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path: str, svg: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg)
