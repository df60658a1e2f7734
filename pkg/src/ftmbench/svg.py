"""Self-contained SVG 1.1 charts for benchmark results.

Output is a plain string; numbers are printed with fixed precision so the
same input always produces the same bytes.
"""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

import numpy as np

__all__ = [
    "covariance_ellipse",
    "ladder_svg",
    "scatter_svg",
    "histogram_svg",
    "paired_svg",
]

PALETTE = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d",
           "#666666"]
FONT = 'font-family="Helvetica, Arial, sans-serif"'


def _f(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _doc(width: float, height: float, body: list[str], title: str = "") -> str:
    head = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(width)}" '
        f'height="{_f(height)}" viewBox="0 0 {_f(width)} {_f(height)}">',
        f'<rect x="0" y="0" width="{_f(width)}" height="{_f(height)}" fill="#ffffff"/>',
    ]
    if title:
        head.append(f'<text x="{_f(width / 2)}" y="20" text-anchor="middle" {FONT} '
                    f'font-size="14">{escape(title)}</text>')
    return "\n".join(head + body + ["</svg>"]) + "\n"


class _Axis:
    def __init__(self, lo: float, hi: float, p0: float, p1: float):
        if not hi > lo:
            pad = abs(lo) * 0.1 or 1.0
            lo, hi = lo - pad, hi + pad
        self.lo, self.hi, self.p0, self.p1 = lo, hi, p0, p1

    def __call__(self, v: float) -> float:
        return self.p0 + (v - self.lo) / (self.hi - self.lo) * (self.p1 - self.p0)

    def ticks(self, n: int = 5) -> list[float]:
        raw = (self.hi - self.lo) / n
        mag = 10 ** math.floor(math.log10(raw))
        step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
        start = math.ceil(self.lo / step) * step
        out = []
        v = start
        while v <= self.hi + 1e-9 * step:
            out.append(round(v, 10))
            v += step
        return out


def _padded(values: Sequence[float], frac: float = 0.08) -> tuple[float, float]:
    lo, hi = float(np.min(values)), float(np.max(values))
    pad = (hi - lo) * frac or (abs(hi) * 0.1 or 1.0)
    return lo - pad, hi + pad


def _tick_label(v: float) -> str:
    return f"{v:g}"


def _x_axis(ax: _Axis, y: float, label: str) -> list[str]:
    out = [f'<line x1="{_f(ax.p0)}" y1="{_f(y)}" x2="{_f(ax.p1)}" y2="{_f(y)}" stroke="#000"/>']
    for t in ax.ticks():
        x = ax(t)
        out.append(f'<line x1="{_f(x)}" y1="{_f(y)}" x2="{_f(x)}" y2="{_f(y + 4)}" stroke="#000"/>')
        out.append(f'<text x="{_f(x)}" y="{_f(y + 16)}" text-anchor="middle" {FONT} '
                   f'font-size="10">{_tick_label(t)}</text>')
    out.append(f'<text x="{_f((ax.p0 + ax.p1) / 2)}" y="{_f(y + 32)}" text-anchor="middle" '
               f'{FONT} font-size="12">{escape(label)}</text>')
    return out


def _y_axis(ax: _Axis, x: float, label: str) -> list[str]:
    out = [f'<line x1="{_f(x)}" y1="{_f(ax.p0)}" x2="{_f(x)}" y2="{_f(ax.p1)}" stroke="#000"/>']
    for t in ax.ticks():
        y = ax(t)
        out.append(f'<line x1="{_f(x - 4)}" y1="{_f(y)}" x2="{_f(x)}" y2="{_f(y)}" stroke="#000"/>')
        out.append(f'<text x="{_f(x - 6)}" y="{_f(y + 3)}" text-anchor="end" {FONT} '
                   f'font-size="10">{_tick_label(t)}</text>')
    mid = (ax.p0 + ax.p1) / 2
    out.append(f'<text x="{_f(x - 40)}" y="{_f(mid)}" text-anchor="middle" {FONT} '
               f'font-size="12" transform="rotate(-90 {_f(x - 40)} {_f(mid)})">'
               f'{escape(label)}</text>')
    return out


def _legend(classes: Sequence[str], x: float, y: float) -> list[str]:
    out = []
    for i, c in enumerate(classes):
        color = PALETTE[i % len(PALETTE)]
        yy = y + 16 * i
        out.append(f'<rect x="{_f(x)}" y="{_f(yy - 8)}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{_f(x + 14)}" y="{_f(yy + 1)}" {FONT} font-size="11">'
                   f'{escape(str(c))}</text>')
    return out


def ladder_svg(rows: Sequence[dict], title: str = "", xlabel: str = "Accuracy (%)") -> str:
    """Per-problem mean +/- 1 sd accuracy with the chance level as a cross.

    Each row needs ``problem``, ``mean``, ``sd`` and ``chance`` (fractions);
    rows are drawn top to bottom in the given order.
    """
    if not rows:
        raise ValueError("ladder needs at least one row")
    row_h, left, right, top = 18.0, 200.0, 30.0, 40.0
    width = 700.0
    height = top + row_h * len(rows) + 50
    ax = _Axis(0.0, 100.0, left, width - right)
    body = []
    for t in ax.ticks():
        x = ax(t)
        body.append(f'<line x1="{_f(x)}" y1="{_f(top)}" x2="{_f(x)}" '
                    f'y2="{_f(top + row_h * len(rows))}" stroke="#dddddd"/>')
    for i, row in enumerate(rows):
        y = top + row_h * (i + 0.5)
        mean, sd, chance = 100 * row["mean"], 100 * row["sd"], 100 * row["chance"]
        lo, hi = max(0.0, mean - sd), min(100.0, mean + sd)
        cx = ax(chance)
        body.append(f'<g class="row" data-problem={quoteattr(str(row["problem"]))}>')
        body.append(f'<text x="{_f(left - 8)}" y="{_f(y + 4)}" text-anchor="end" {FONT} '
                    f'font-size="11">{escape(str(row["problem"]))}</text>')
        body.append(f'<line class="errorbar" x1="{_f(ax(lo))}" y1="{_f(y)}" x2="{_f(ax(hi))}" '
                    f'y2="{_f(y)}" stroke="{PALETTE[0]}" stroke-width="2"/>')
        body.append(f'<circle class="mean" cx="{_f(ax(mean))}" cy="{_f(y)}" r="4" '
                    f'fill="{PALETTE[0]}"/>')
        body.append(f'<path class="chance-cross" d="M {_f(cx - 4)} {_f(y - 4)} L {_f(cx + 4)} '
                    f'{_f(y + 4)} M {_f(cx - 4)} {_f(y + 4)} L {_f(cx + 4)} {_f(y - 4)}" '
                    f'stroke="#000000" stroke-width="1.5"/>')
        body.append("</g>")
    body += _x_axis(ax, top + row_h * len(rows), xlabel)
    return _doc(width, height, body, title)


def covariance_ellipse(x: Sequence[float], y: Sequence[float], n_sd: float = 2.0
                       ) -> tuple[float, float, float, float, float]:
    """Centre, semi-axes and rotation (degrees) of the n_sd covariance ellipse."""
    pts = np.column_stack([np.asarray(x, float), np.asarray(y, float)])
    center = pts.mean(axis=0)
    cov = np.cov(pts, rowvar=False) if len(pts) > 1 else np.zeros((2, 2))
    evals, evecs = np.linalg.eigh(cov)
    evals = np.clip(evals, 0.0, None)
    major = evecs[:, 1]
    angle = math.degrees(math.atan2(major[1], major[0]))
    return (float(center[0]), float(center[1]), n_sd * math.sqrt(evals[1]),
            n_sd * math.sqrt(evals[0]), angle)


def _ellipse_path(ell, ax_x: _Axis, ax_y: _Axis, n: int = 72) -> str:
    cx, cy, a, b, ang = ell
    th = math.radians(ang)
    pts = []
    for i in range(n):
        t = 2 * math.pi * i / n
        ex = cx + a * math.cos(t) * math.cos(th) - b * math.sin(t) * math.sin(th)
        ey = cy + a * math.cos(t) * math.sin(th) + b * math.sin(t) * math.cos(th)
        pts.append(f"{_f(ax_x(ex))} {_f(ax_y(ey))}")
    return "M " + " L ".join(pts) + " Z"


def scatter_svg(x: Sequence[float], y: Sequence[float], labels: Sequence[str],
                xlabel: str = "mean", ylabel: str = "stddev", title: str = "") -> str:
    """2-D feature scatter coloured by class, with 2-sd covariance ellipses per class."""
    if len(x) == 0:
        raise ValueError("scatter needs at least one point")
    x, y = np.asarray(x, float), np.asarray(y, float)
    labels = list(labels)
    classes = list(dict.fromkeys(labels))
    ellipses = {}
    all_x, all_y = list(x), list(y)
    for c in classes:
        mask = np.array([lab == c for lab in labels])
        ell = covariance_ellipse(x[mask], y[mask])
        ellipses[c] = ell
        r = max(ell[2], ell[3])
        all_x += [ell[0] - r, ell[0] + r]
        all_y += [ell[1] - r, ell[1] + r]
    width, height, left, right, top, bottom = 560.0, 460.0, 70.0, 100.0, 40.0, 60.0
    ax_x = _Axis(*_padded(all_x, 0.02), left, width - right)
    ax_y = _Axis(*_padded(all_y, 0.02), height - bottom, top)
    body = []
    for i, c in enumerate(classes):
        color = PALETTE[i % len(PALETTE)]
        body.append(f'<path class="ellipse" data-class={quoteattr(str(c))} '
                    f'd="{_ellipse_path(ellipses[c], ax_x, ax_y)}" fill="{color}" '
                    f'fill-opacity="0.2" stroke="{color}"/>')
    for xi, yi, lab in zip(x, y, labels):
        color = PALETTE[classes.index(lab) % len(PALETTE)]
        body.append(f'<circle cx="{_f(ax_x(xi))}" cy="{_f(ax_y(yi))}" r="3" fill="{color}" '
                    f'fill-opacity="0.8"/>')
    body += _x_axis(ax_x, height - bottom, xlabel)
    body += _y_axis(ax_y, left, ylabel)
    body += _legend(classes, width - right + 10, top + 10)
    return _doc(width, height, body, title)


def histogram_svg(values: Sequence[float], labels: Sequence[str], feature: str = "mean",
                  bins: int = 30, title: str = "") -> str:
    """Per-class histograms of one feature on shared bins."""
    if len(values) == 0:
        raise ValueError("histogram needs at least one value")
    v = np.asarray(values, float)
    labels = list(labels)
    classes = list(dict.fromkeys(labels))
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)
    counts = {}
    for c in classes:
        mask = np.array([lab == c for lab in labels])
        counts[c], _ = np.histogram(v[mask], bins=edges)
    ymax = max(int(cnt.max()) for cnt in counts.values())
    width, height, left, right, top, bottom = 560.0, 400.0, 70.0, 100.0, 40.0, 60.0
    ax_x = _Axis(lo, hi, left, width - right)
    ax_y = _Axis(0.0, ymax * 1.05, height - bottom, top)
    body = []
    for i, c in enumerate(classes):
        color = PALETTE[i % len(PALETTE)]
        body.append(f'<g class="histogram" data-class={quoteattr(str(c))}>')
        for j, cnt in enumerate(counts[c]):
            if cnt == 0:
                continue
            x0, x1 = ax_x(edges[j]), ax_x(edges[j + 1])
            y0 = ax_y(cnt)
            body.append(f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(x1 - x0)}" '
                        f'height="{_f(ax_y(0) - y0)}" fill="{color}" fill-opacity="0.5"/>')
        body.append("</g>")
    body += _x_axis(ax_x, height - bottom, feature)
    body += _y_axis(ax_y, left, "count")
    body += _legend(classes, width - right + 10, top + 10)
    return _doc(width, height, body, title)


def _box_stats(v: np.ndarray) -> tuple[float, float, float, float, float]:
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    iqr = q3 - q1
    lo = float(v[v >= q1 - 1.5 * iqr].min())
    hi = float(v[v <= q3 + 1.5 * iqr].max())
    return lo, float(q1), float(med), float(q3), hi


def paired_svg(series: dict[str, Sequence[float]], ylabel: str = "Balanced accuracy (%)",
               title: str = "") -> str:
    """Boxplot per model plus grey lines joining each resample's values across models."""
    if not series or any(len(v) == 0 for v in series.values()):
        raise ValueError("paired plot needs non-empty value lists")
    names = list(series)
    n = len(next(iter(series.values())))
    if any(len(v) != n for v in series.values()):
        raise ValueError("every model needs the same number of paired values")
    data = {m: 100 * np.asarray(series[m], float) for m in names}
    allv = np.concatenate(list(data.values()))
    width, height, left, top, bottom = 140.0 + 120.0 * len(names), 420.0, 80.0, 40.0, 60.0
    ax_y = _Axis(*_padded(allv), height - bottom, top)
    xs = {m: left + 60 + 120 * i for i, m in enumerate(names)}
    body = []
    for j in range(n):
        pts = " L ".join(f"{_f(xs[m])} {_f(ax_y(data[m][j]))}" for m in names)
        body.append(f'<path class="pair" d="M {pts}" stroke="#999999" fill="none" '
                    f'stroke-width="1"/>')
    for i, m in enumerate(names):
        color = PALETTE[i % len(PALETTE)]
        lo, q1, med, q3, hi = _box_stats(data[m])
        x = xs[m]
        body.append(f'<g class="box" data-model={quoteattr(m)}>')
        body.append(f'<line x1="{_f(x)}" y1="{_f(ax_y(lo))}" x2="{_f(x)}" y2="{_f(ax_y(hi))}" '
                    f'stroke="{color}"/>')
        body.append(f'<rect x="{_f(x - 20)}" y="{_f(ax_y(q3))}" width="40" '
                    f'height="{_f(ax_y(q1) - ax_y(q3))}" fill="{color}" fill-opacity="0.35" '
                    f'stroke="{color}"/>')
        body.append(f'<line x1="{_f(x - 20)}" y1="{_f(ax_y(med))}" x2="{_f(x + 20)}" '
                    f'y2="{_f(ax_y(med))}" stroke="{color}" stroke-width="2"/>')
        for v in data[m]:
            body.append(f'<circle cx="{_f(x)}" cy="{_f(ax_y(v))}" r="2.5" fill="{color}"/>')
        body.append("</g>")
        body.append(f'<text x="{_f(x)}" y="{_f(height - bottom + 18)}" text-anchor="middle" '
                    f'{FONT} font-size="12">{escape(m)}</text>')
    body += _y_axis(ax_y, left, ylabel)
    return _doc(width, height, body, title)
