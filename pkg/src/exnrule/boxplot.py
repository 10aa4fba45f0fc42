"""Box statistics and a dependency-free SVG box plot.

Quartiles use linear interpolation between order statistics (Hyndman-Fan
type 7, numpy's default), so anyone recomputing them from the TSV gets the
same numbers that are drawn.
"""
from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape, quoteattr

import numpy as np


@dataclass(frozen=True)
class BoxStats:
    q1: float
    median: float
    q3: float
    whisker_lo: float
    whisker_hi: float
    outliers: tuple[float, ...]

    @classmethod
    def of(cls, values) -> "BoxStats":
        v = np.sort(np.asarray(values, dtype=np.float64))
        if v.size == 0:
            raise ValueError("no values")
        q1, med, q3 = np.quantile(v, [0.25, 0.5, 0.75], method="linear")
        iqr = q3 - q1
        lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
        inside = v[(v >= lo_fence) & (v <= hi_fence)]
        out = v[(v < lo_fence) | (v > hi_fence)]
        return cls(float(q1), float(med), float(q3), float(inside.min()), float(inside.max()),
                   tuple(float(x) for x in out))


def render_svg(groups: dict[str, list[float]], title: str = "") -> str:
    width_per, height, margin = 90, 360, 50
    stats = {name: BoxStats.of(vals) for name, vals in groups.items()}
    all_vals = np.concatenate([np.asarray(v, dtype=float) for v in groups.values()])
    lo, hi = float(all_vals.min()), float(all_vals.max())
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    plot_h = height - 2 * margin

    def y(v: float) -> float:
        return round(margin + (hi - v) / (hi - lo) * plot_h, 3)

    W = margin * 2 + width_per * len(groups)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{height}" viewBox="0 0 {W} {height}">',
           f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
           f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>']
    for t in np.linspace(lo + pad, hi - pad, 5):
        out.append(f'<text x="{margin - 4}" y="{y(t) + 4}" text-anchor="end" font-size="10">{t:.3g}</text>')
    for i, (name, s) in enumerate(stats.items()):
        cx = margin + width_per * (i + 0.5)
        x0, x1 = cx - width_per * 0.3, cx + width_per * 0.3
        attrs = " ".join(f'data-{k}="{getattr(s, k.replace("-", "_"))!r}"'
                         for k in ("q1", "median", "q3", "whisker-lo", "whisker-hi"))
        out.append(f'<g class="box" data-group={quoteattr(name)} {attrs}>')
        out.append(f'<line x1="{cx}" y1="{y(s.whisker_hi)}" x2="{cx}" y2="{y(s.q3)}" stroke="black"/>')
        out.append(f'<line x1="{cx}" y1="{y(s.q1)}" x2="{cx}" y2="{y(s.whisker_lo)}" stroke="black"/>')
        for w in (s.whisker_lo, s.whisker_hi):
            out.append(f'<line x1="{cx - 8}" y1="{y(w)}" x2="{cx + 8}" y2="{y(w)}" stroke="black"/>')
        out.append(f'<rect x="{x0}" y="{y(s.q3)}" width="{x1 - x0}" height="{round(y(s.q1) - y(s.q3), 3)}" '
                   f'fill="#cfe3f3" stroke="black"/>')
        out.append(f'<line x1="{x0}" y1="{y(s.median)}" x2="{x1}" y2="{y(s.median)}" stroke="black" stroke-width="2"/>')
        for o in s.outliers:
            out.append(f'<circle cx="{cx}" cy="{y(o)}" r="2.5" fill="none" stroke="black"/>')
        out.append(f'<text x="{cx}" y="{height - margin + 14}" text-anchor="middle" font-size="9">{escape(name)}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
