"""Minimal static SVG rendering for histograms, spectra, and overlays.

Deterministic output: fixed decimal formatting, no timestamps.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

__all__ = ["bar_chart", "overlay_chart"]

_HEADER = '<?xml version="1.0" encoding="UTF-8"?>\n'


def _fmt(x: float) -> str:
    return f"{x:.3f}".rstrip("0").rstrip(".")


def _frame(width: int, height: int, body: list[str], title: str) -> str:
    parts = [
        _HEADER,
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<title>{title}</title>',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    parts.extend(body)
    parts.append("</svg>\n")
    return "\n".join(parts)


def bar_chart(values: Sequence[float], path: str | Path, title: str = "",
              width: int = 800, height: int = 400, color: str = "#4477aa") -> None:
    """Bars over [0,1) bins; y axis from 0 to slightly above the max."""
    n = len(values)
    vmax = max(max(values), 1e-12)
    top = vmax * 1.08
    pad = 28
    w = (width - 2 * pad) / n
    body = [
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" '
        'stroke="black" stroke-width="1"/>',
        f'<text x="{pad}" y="{pad - 8}" font-size="12">{title} (max {_fmt(vmax)})</text>',
    ]
    for i, v in enumerate(values):
        h = (height - 2 * pad) * (v / top)
        x = pad + i * w
        y = height - pad - h
        body.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(max(w, 0.3))}" '
            f'height="{_fmt(h)}" fill="{color}"/>')
    Path(path).write_text(_frame(width, height, body, title), encoding="utf-8")


def overlay_chart(series: list[tuple[str, Sequence[float], str]], path: str | Path,
                  title: str = "", width: int = 800, height: int = 400) -> None:
    """Polyline overlay of several equal-length series (label, values, color)."""
    if not series:
        raise ValueError("no series")
    n = len(series[0][1])
    vmax = max(max(vals) for _, vals, _ in series)
    vmin = min(min(vals) for _, vals, _ in series)
    span = max(vmax - vmin, 1e-12)
    pad = 28
    body = [
        f'<text x="{pad}" y="{pad - 8}" font-size="12">{title}</text>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" '
        'stroke="black" stroke-width="1"/>',
    ]
    for li, (label, vals, color) in enumerate(series):
        pts = []
        for i, v in enumerate(vals):
            x = pad + (width - 2 * pad) * (i / max(n - 1, 1))
            y = height - pad - (height - 2 * pad) * ((v - vmin) / span)
            pts.append(f"{_fmt(x)},{_fmt(y)}")
        body.append(
            f'<polyline points="{" ".join(pts)}" fill="none" stroke="{color}" '
            'stroke-width="1.5"/>')
        body.append(
            f'<text x="{width - pad - 120}" y="{pad + 14 * li}" font-size="11" '
            f'fill="{color}">{label}</text>')
    Path(path).write_text(_frame(width, height, body, title), encoding="utf-8")
