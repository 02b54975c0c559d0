"""Minimal self-contained SVG emitters for histograms and scatter plots.

Just enough to render the distribution reports as standalone vector files;
no styling knobs beyond labels.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

_W, _H = 480, 400
_ML, _MR, _MT, _MB = 60, 20, 30, 50  # margins


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="11">',
        f'<text x="{_W / 2}" y="18" text-anchor="middle" font-size="13">{title}</text>',
    ]


def _axes(xlabel: str, ylabel: str, xlim, ylim) -> list[str]:
    x0, y0 = _ML, _H - _MB
    x1, y1 = _W - _MR, _MT
    parts = [
        f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="black"/>',
        f'<text x="{(x0 + x1) / 2}" y="{_H - 12}" text-anchor="middle">{xlabel}</text>',
        f'<text x="14" y="{(y0 + y1) / 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {(y0 + y1) / 2})">{ylabel}</text>',
        f'<text x="{x0}" y="{y0 + 14}" text-anchor="middle">{xlim[0]:.2g}</text>',
        f'<text x="{x1}" y="{y0 + 14}" text-anchor="middle">{xlim[1]:.2g}</text>',
        f'<text x="{x0 - 6}" y="{y0}" text-anchor="end">{ylim[0]:.2g}</text>',
        f'<text x="{x0 - 6}" y="{y1 + 8}" text-anchor="end">{ylim[1]:.2g}</text>',
    ]
    return parts


def _to_px(x, y, xlim, ylim):
    fx = (x - xlim[0]) / (xlim[1] - xlim[0] or 1.0)
    fy = (y - ylim[0]) / (ylim[1] - ylim[0] or 1.0)
    return _ML + fx * (_W - _ML - _MR), (_H - _MB) - fy * (_H - _MT - _MB)


def write_histogram1d(path: str | Path, counts, edges, title: str, xlabel: str) -> None:
    counts = np.asarray(counts, dtype=float)
    edges = np.asarray(edges, dtype=float)
    ymax = float(counts.max()) if counts.size and counts.max() > 0 else 1.0
    xlim = (float(edges[0]), float(edges[-1]))
    ylim = (0.0, ymax)
    parts = _header(title) + _axes(xlabel, "count", xlim, ylim)
    for i, c in enumerate(counts):
        x_a, y_a = _to_px(edges[i], 0.0, xlim, ylim)
        x_b, y_b = _to_px(edges[i + 1], float(c), xlim, ylim)
        parts.append(
            f'<rect x="{x_a:.1f}" y="{y_b:.1f}" width="{max(x_b - x_a, 0.5):.1f}" '
            f'height="{max(y_a - y_b, 0):.1f}" fill="#4878cf" stroke="white" stroke-width="0.5"/>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))


def write_histogram2d(path: str | Path, counts, xedges, yedges, title: str, xlabel: str, ylabel: str) -> None:
    counts = np.asarray(counts, dtype=float)
    xedges = np.asarray(xedges, dtype=float)
    yedges = np.asarray(yedges, dtype=float)
    cmax = float(counts.max()) if counts.size and counts.max() > 0 else 1.0
    xlim = (float(xedges[0]), float(xedges[-1]))
    ylim = (float(yedges[0]), float(yedges[-1]))
    parts = _header(title) + _axes(xlabel, ylabel, xlim, ylim)
    for i in range(counts.shape[0]):
        for j in range(counts.shape[1]):
            c = counts[i, j]
            if c <= 0:
                continue
            x_a, y_a = _to_px(xedges[i], yedges[j], xlim, ylim)
            x_b, y_b = _to_px(xedges[i + 1], yedges[j + 1], xlim, ylim)
            shade = 1.0 - min(1.0, math.sqrt(c / cmax))
            color = int(40 + 200 * shade)
            parts.append(
                f'<rect x="{x_a:.1f}" y="{y_b:.1f}" width="{(x_b - x_a):.1f}" '
                f'height="{(y_a - y_b):.1f}" fill="rgb({color},{color},255)"/>'
            )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))


def write_scatter(path: str | Path, xs, ys, title: str, xlabel: str, ylabel: str) -> None:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size == 0:
        xlim = ylim = (0.0, 1.0)
    else:
        pad = lambda lo, hi: ((lo - 0.05 * (hi - lo + 1e-9)), (hi + 0.05 * (hi - lo + 1e-9)))
        xlim = pad(float(xs.min()), float(xs.max()))
        ylim = pad(float(ys.min()), float(ys.max()))
    parts = _header(title) + _axes(xlabel, ylabel, xlim, ylim)
    for x, y in zip(xs, ys):
        px, py = _to_px(float(x), float(y), xlim, ylim)
        parts.append(f'<circle cx="{px:.1f}" cy="{py:.1f}" r="1.2" fill="#4878cf" fill-opacity="0.4"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))
