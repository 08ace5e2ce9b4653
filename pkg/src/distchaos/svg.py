"""Minimal hand-written SVG charts (line plot and heat map)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939"]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def line_plot(path, series, title: str, xlabel: str, ylabel: str, logx: bool = False,
              width: int = 640, height: int = 420) -> None:
    """series: list of (label, xs, ys)."""
    ml, mr, mt, mb = 60, 140, 30, 45
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    fx = (lambda v: math.log10(v)) if logx else float
    x0, x1 = fx(min(xs_all)), fx(max(xs_all))
    y0, y1 = min(0.0, min(ys_all)), max(1.0, max(ys_all))
    x1 = x1 if x1 > x0 else x0 + 1

    def px(v):
        return ml + (fx(v) - x0) / (x1 - x0) * (width - ml - mr)

    def py(v):
        return height - mb - (v - y0) / (y1 - y0) * (height - mt - mb)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<text x="{width / 2}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
           f'<line x1="{ml}" y1="{height - mb}" x2="{width - mr}" y2="{height - mb}" stroke="black"/>',
           f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height - mb}" stroke="black"/>',
           f'<text x="{(width - mr + ml) / 2}" y="{height - 8}" text-anchor="middle" '
           f'font-size="12">{escape(xlabel)}</text>',
           f'<text x="14" y="{height / 2}" font-size="12" transform="rotate(-90 14 {height / 2})" '
           f'text-anchor="middle">{escape(ylabel)}</text>']
    for frac in (0.0, 0.5, 1.0):
        yv = y0 + frac * (y1 - y0)
        out.append(f'<text x="{ml - 6}" y="{_fmt(py(yv) + 4)}" text-anchor="end" '
                   f'font-size="10">{yv:g}</text>')
    for i, (label, xs, ys) in enumerate(series):
        col = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{col}" stroke-width="1.5" points="{pts}"/>')
        ly = mt + 14 * i + 8
        out.append(f'<line x1="{width - mr + 10}" y1="{ly}" x2="{width - mr + 28}" y2="{ly}" '
                   f'stroke="{col}" stroke-width="2"/>')
        out.append(f'<text x="{width - mr + 32}" y="{ly + 4}" font-size="10">{escape(label)}</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


def heat_map(path, values, colors: dict, title: str, cell: int = 2) -> None:
    """values: 2-D integer grid (row 0 at the bottom); colors maps value -> fill."""
    rows = len(values)
    cols = len(values[0]) if rows else 0
    w, h = cols * cell, rows * cell + 24
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
           f'shape-rendering="crispEdges">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<text x="{w / 2}" y="16" text-anchor="middle" font-size="12">{escape(title)}</text>']
    for j in range(rows):
        y = 24 + (rows - 1 - j) * cell
        i = 0
        row = values[j]
        while i < cols:
            v = int(row[i])
            k = i
            while k < cols and int(row[k]) == v:
                k += 1
            col = colors.get(v)
            if col:
                out.append(f'<rect x="{i * cell}" y="{y}" width="{(k - i) * cell}" '
                           f'height="{cell}" fill="{col}"/>')
            i = k
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
