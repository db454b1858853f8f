"""CSV, JSON and SVG output for experiment results."""

from __future__ import annotations

import csv
import json
import math
import os
from html import escape

import numpy as np

from .runner import MetricSeries

METRICS = ("mre", "nrmse")
_PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
    "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939", "#8c6d31", "#843c39",
]


def _num(x) -> float | None:
    x = float(x)
    return None if math.isnan(x) else x


def series_to_json(series: MetricSeries) -> dict:
    return {
        "algorithms": series.algorithms,
        "checkpoints": series.checkpoints,
        "target": series.target,
        "truth": series.truth.tolist(),
        "metrics": {
            m: {a: [[_num(v) for v in row] for row in getattr(series, m)[a]] for a in series.algorithms}
            for m in METRICS
        },
        "query_stats": series.query_stats,
    }


def series_from_json(data: dict) -> MetricSeries:
    s = MetricSeries(data["algorithms"], data["checkpoints"], np.array(data["truth"]), data.get("target", "concentrations"))
    for m in METRICS:
        for a, rows in data["metrics"][m].items():
            getattr(s, m)[a] = np.array([[np.nan if v is None else v for v in r] for r in rows], dtype=float)
    s.query_stats = data.get("query_stats", {})
    return s


def write_csv(series: MetricSeries, path: str) -> int:
    n = 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["algo", "type", "checkpoint", "metric", "value"])
        for a in series.algorithms:
            for m in METRICS:
                arr = getattr(series, m)[a]
                for ci, cp in enumerate(series.checkpoints):
                    for t in range(arr.shape[1]):
                        v = arr[ci, t]
                        w.writerow([a, t + 1, cp, m, "" if math.isnan(v) else repr(float(v))])
                        n += 1
    return n


# -- SVG ---------------------------------------------------------------------


def _svg_header(width: int, height: int, title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi):
        return []
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=mag * 10)
    start = math.floor(lo / step) * step
    ticks = []
    t = start
    while t <= hi + step * 1e-9:
        ticks.append(round(t, 12))
        t += step
    return ticks


class _Frame:
    def __init__(self, width, height, x_range, y_range, margin=(60, 20, 40, 50)):
        self.w, self.h = width, height
        self.left, self.right, self.top, self.bottom = margin[0], margin[1], margin[2], margin[3]
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range

    def px(self, x):
        span = (self.x1 - self.x0) or 1.0
        return self.left + (x - self.x0) / span * (self.w - self.left - self.right)

    def py(self, y):
        span = (self.y1 - self.y0) or 1.0
        return self.h - self.bottom - (y - self.y0) / span * (self.h - self.top - self.bottom)

    def axes(self, xlabel, ylabel, xticks, yticks, xfmt="{:g}", yfmt="{:g}") -> list[str]:
        out = []
        for t in yticks:
            y = self.py(t)
            out.append(f'<line x1="{self.left}" y1="{y:.1f}" x2="{self.w - self.right}" y2="{y:.1f}" stroke="#eee"/>')
            out.append(f'<text x="{self.left - 5}" y="{y + 4:.1f}" text-anchor="end">{yfmt.format(t)}</text>')
        for t in xticks:
            x = self.px(t)
            out.append(f'<text x="{x:.1f}" y="{self.h - self.bottom + 15}" text-anchor="middle">{xfmt.format(t)}</text>')
        out.append(
            f'<line x1="{self.left}" y1="{self.h - self.bottom}" x2="{self.w - self.right}" '
            f'y2="{self.h - self.bottom}" stroke="#333"/>'
        )
        out.append(f'<line x1="{self.left}" y1="{self.top}" x2="{self.left}" y2="{self.h - self.bottom}" stroke="#333"/>')
        out.append(
            f'<text x="{(self.left + self.w - self.right) / 2}" y="{self.h - 8}" text-anchor="middle">{escape(xlabel)}</text>'
        )
        cy = (self.top + self.h - self.bottom) / 2
        out.append(
            f'<text x="14" y="{cy}" text-anchor="middle" transform="rotate(-90 14 {cy})">{escape(ylabel)}</text>'
        )
        return out


def bar_chart(values: np.ndarray, title: str, ylabel: str) -> str:
    w, h = 640, 360
    finite = [v for v in values if math.isfinite(v)]
    ymax = max(finite) if finite else 1.0
    ticks = _nice_ticks(0.0, ymax)
    fr = _Frame(w, h, (0.5, len(values) + 0.5), (0.0, ticks[-1] if ticks else 1.0))
    out = _svg_header(w, h, title)
    out += fr.axes("graphlet type", ylabel, range(1, len(values) + 1), ticks)
    bw = (fr.px(1) - fr.px(0)) * 0.7
    for i, v in enumerate(values, start=1):
        if not math.isfinite(v):
            continue
        x = fr.px(i) - bw / 2
        y = fr.py(v)
        out.append(
            f'<rect x="{x:.1f}" y="{y:.1f}" width="{bw:.1f}" height="{fr.py(0) - y:.1f}" fill="{_PALETTE[0]}">'
            f"<title>type {i}: {v:.4g}</title></rect>"
        )
    out.append("</svg>")
    return "\n".join(out)


def line_chart(xs, series: dict[str, np.ndarray], title: str, ylabel: str) -> str:
    w, h = 720, 400
    vals = [v for ys in series.values() for v in ys if math.isfinite(v)]
    ymax = max(vals) if vals else 1.0
    yt = _nice_ticks(0.0, ymax)
    xt = _nice_ticks(min(xs), max(xs))
    fr = _Frame(w, h, (min(xs), max(xs)), (0.0, yt[-1] if yt else 1.0), margin=(60, 110, 40, 50))
    out = _svg_header(w, h, title)
    out += fr.axes("steps", ylabel, [t for t in xt if min(xs) <= t <= max(xs)], yt)
    for k, (name, ys) in enumerate(series.items()):
        pts = [(fr.px(x), fr.py(y)) for x, y in zip(xs, ys) if math.isfinite(y)]
        if not pts:
            continue
        colour = _PALETTE[k % len(_PALETTE)]
        path = " ".join(f"{x:.1f},{y:.1f}" for x, y in pts)
        out.append(f'<polyline points="{path}" fill="none" stroke="{colour}" stroke-width="1.5"/>')
        ly = fr.top + 14 * k
        out.append(f'<rect x="{w - 100}" y="{ly - 8}" width="10" height="10" fill="{colour}"/>')
        out.append(f'<text x="{w - 85}" y="{ly + 1}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out)


def scatter_chart(xs, ys, labels, title: str, xlabel: str, ylabel: str) -> str:
    w, h = 560, 420
    pts = [(x, y, l) for x, y, l in zip(xs, ys, labels) if math.isfinite(x) and math.isfinite(y)]
    if pts:
        xlo, xhi = min(p[0] for p in pts), max(p[0] for p in pts)
        ylo, yhi = min(p[1] for p in pts), max(p[1] for p in pts)
    else:
        xlo, xhi, ylo, yhi = -1.0, 0.0, -1.0, 0.0
    xt = _nice_ticks(math.floor(xlo), math.ceil(xhi) if xhi > xlo else xlo + 1)
    yt = _nice_ticks(math.floor(ylo), math.ceil(yhi) if yhi > ylo else ylo + 1)
    fr = _Frame(w, h, (xt[0], xt[-1]), (yt[0], yt[-1]))
    out = _svg_header(w, h, title)
    out += fr.axes(xlabel, ylabel, xt, yt)
    for x, y, l in pts:
        cx, cy = fr.px(x), fr.py(y)
        out.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="4" fill="{_PALETTE[3]}"><title>type {l}</title></circle>')
        out.append(f'<text x="{cx + 6:.1f}" y="{cy - 4:.1f}" font-size="9">{l}</text>')
    out.append("</svg>")
    return "\n".join(out)


def emit_report(series: MetricSeries, out_dir: str) -> list[str]:
    """Write results.csv, results.json and three SVG charts per algorithm."""
    if not series.algorithms or not series.checkpoints:
        raise ValueError("empty metric series")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    path = os.path.join(out_dir, "results.csv")
    write_csv(series, path)
    written.append(path)
    path = os.path.join(out_dir, "results.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(series_to_json(series), fh, indent=1)
    written.append(path)
    types = [str(i) for i in range(1, len(series.truth) + 1)]
    for a in series.algorithms:
        mre = series.mre[a]
        files = {
            f"{a}_mre.svg": bar_chart(mre[-1], f"{a}: MRE per type at n={series.checkpoints[-1]}", "MRE"),
            f"{a}_nrmse.svg": line_chart(
                series.checkpoints,
                {f"type {t}": series.nrmse[a][:, i] for i, t in enumerate(types)},
                f"{a}: NRMSE vs steps",
                "NRMSE",
            ),
        }
        with np.errstate(divide="ignore", invalid="ignore"):
            lx = np.log10(series.truth)
            ly = np.log10(mre[-1])
        files[f"{a}_scatter.svg"] = scatter_chart(
            lx, ly, types, f"{a}: concentration vs MRE", "log10 d_i", "log10 MRE"
        )
        for name, svg in files.items():
            path = os.path.join(out_dir, name)
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(svg)
            written.append(path)
    return written
