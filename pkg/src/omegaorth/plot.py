"""Minimal hand-written SVG line plots of the orthogonal functions."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .recurrence import RecurrenceTable
from .zeros import find_zeros

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def plot_data(table: RecurrenceTable, orders, samples=800):
    """Sample ``W_m`` on a uniform grid of [-1, 1]; returns ``(x, values[k, :])``."""
    orders = [int(m) for m in orders]
    if not orders:
        raise ValueError("at least one order is required")
    if samples < 2:
        raise ValueError("samples must be at least 2")
    top = max(orders)
    if min(orders) < 0 or top > table.N:
        raise ValueError(f"orders must lie in 0..{table.N}")
    x = np.linspace(-1.0, 1.0, samples)
    w = table.values_theta(2.0 * np.arccos(x), top)
    return x, np.stack([w[m] for m in orders])


def _nice_ticks(lo, hi, count=5):
    span = hi - lo
    raw = span / count
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + 0.5 * step, step)


def svg_plot(table: RecurrenceTable, orders, samples=800, zeros=False, width=640, height=400,
             title=None) -> str:
    """SVG document with one polyline per order, axes, tick labels and a legend.

    With ``zeros=True`` each curve's zeros are marked with small circles.
    """
    orders = [int(m) for m in orders]
    x, vals = plot_data(table, orders, samples)
    ymin = min(float(vals.min()), 0.0)
    ymax = max(float(vals.max()), 0.0)
    if ymax - ymin < 1e-12:
        ymin, ymax = ymin - 1.0, ymax + 1.0
    pad = 0.05 * (ymax - ymin)
    ymin, ymax = ymin - pad, ymax + pad

    left, right, top, bottom = 60, 20, 30 if title else 15, 40
    pw, ph = width - left - right, height - top - bottom

    def px(v):
        return left + (v + 1.0) / 2.0 * pw

    def py(v):
        return top + (ymax - v) / (ymax - ymin) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>']
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="18" text-anchor="middle">{escape(title)}</text>')

    # frame, zero line, ticks
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append(f'<line class="axis" x1="{left}" y1="{py(0.0):.2f}" x2="{left + pw}" y2="{py(0.0):.2f}" '
               'stroke="#888" stroke-dasharray="4 3"/>')
    for t in np.linspace(-1.0, 1.0, 5):
        out.append(f'<line x1="{px(t):.2f}" y1="{top + ph}" x2="{px(t):.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px(t):.2f}" y="{top + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(ymin, ymax):
        out.append(f'<line x1="{left - 5}" y1="{py(t):.2f}" x2="{left}" y2="{py(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py(t) + 4:.2f}" text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 5}" text-anchor="middle">x</text>')

    for i, (m, v) in enumerate(zip(orders, vals)):
        color = COLORS[i % len(COLORS)]
        pts = " ".join(f"{px(a):.3f},{py(b):.3f}" for a, b in zip(x, v))
        out.append(f'<polyline class="curve" data-order="{m}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5" points="{pts}"/>')
        ly = top + 15 + 16 * i
        out.append(f'<line x1="{left + pw - 70}" y1="{ly - 4}" x2="{left + pw - 50}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text class="label" x="{left + pw - 45}" y="{ly}">W{m}</text>')
        if zeros and m >= 1:
            for z in find_zeros(table, m).x:
                out.append(f'<circle class="zero" data-order="{m}" data-x="{z:.15g}" cx="{px(z):.3f}" '
                           f'cy="{py(0.0):.3f}" r="3" fill="none" stroke="{color}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
