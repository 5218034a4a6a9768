"""SVG renderings: annotated correlation heatmaps and pair plots.

Output is built as plain text with fixed-precision coordinates, so equal
inputs give byte-identical documents.
"""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from tabsynth.data import CorrelationMatrix, Dataset
from tabsynth.errors import ShapeError
from tabsynth.evaluation import SCATTER_CAP, check_schema, deterministic_subsample, histogram_pair

CELL = 80
LABEL_W = 150
TITLE_H = 40
NEG = (33, 102, 172)
POS = (178, 24, 43)
REAL_COLOR = "#1f77b4"
SYNTH_COLOR = "#ff7f0e"
MAX_PAIRPLOT_COLS = 8


def _f(v: float) -> str:
    return f"{v:.2f}"


def _header(width: float, height: float) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(width)}" '
        f'height="{_f(height)}" viewBox="0 0 {_f(width)} {_f(height)}" '
        'font-family="Helvetica, Arial, sans-serif">',
        f'<rect x="0" y="0" width="{_f(width)}" height="{_f(height)}" fill="#ffffff"/>',
    ]


def diverging_color(v: float, vmax: float = 1.0) -> str:
    """Blue-white-red; -vmax is full blue, 0 white, +vmax full red."""
    t = max(-1.0, min(1.0, v / vmax)) if vmax > 0 else 0.0
    end = POS if t > 0 else NEG
    rgb = [round(255 + (c - 255) * abs(t)) for c in end]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _annotation(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def render_matrix(labels: Sequence[str], values, title: str = "", vmax: float = 1.0) -> str:
    values = np.asarray(values, dtype=np.float64)
    k = len(labels)
    if values.shape != (k, k):
        raise ShapeError(f"matrix shape {values.shape} does not match {k} labels")
    width = LABEL_W + k * CELL + 20
    height = TITLE_H + k * CELL + LABEL_W
    out = _header(width, height)
    if title:
        out.append(f'<text x="{_f(width / 2)}" y="26" font-size="16" text-anchor="middle">'
                   f'{escape(title)}</text>')
    for i in range(k):
        y = TITLE_H + i * CELL
        out.append(f'<text x="{_f(LABEL_W - 8)}" y="{_f(y + CELL / 2 + 4)}" font-size="12" '
                   f'text-anchor="end">{escape(labels[i])}</text>')
        for j in range(k):
            x = LABEL_W + j * CELL
            v = float(values[i, j])
            fg = "#ffffff" if abs(v) > 0.6 * vmax else "#000000"
            out.append(f'<rect x="{_f(x)}" y="{_f(y)}" width="{CELL}" height="{CELL}" '
                       f'fill="{diverging_color(v, vmax)}" stroke="#ffffff"/>')
            out.append(f'<text x="{_f(x + CELL / 2)}" y="{_f(y + CELL / 2 + 5)}" font-size="14" '
                       f'text-anchor="middle" fill="{fg}">{_annotation(v)}</text>')
    base = TITLE_H + k * CELL + 8
    for j in range(k):
        x = LABEL_W + j * CELL + CELL / 2
        out.append(f'<text x="{_f(x)}" y="{_f(base)}" font-size="12" text-anchor="end" '
                   f'transform="rotate(-45 {_f(x)} {_f(base)})">{escape(labels[j])}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_heatmap(m: CorrelationMatrix, title: str = "Correlation heatmap") -> str:
    return render_matrix(m.labels, m.values, title=title, vmax=1.0)


PANEL = 160
PAD = 12


def render_pairplot(real: Dataset, synth: Dataset | None = None, title: str = "Pair plot") -> str:
    """k-by-k grid: overlaid histograms on the diagonal, overlaid scatter elsewhere.

    With ``synth=None`` only ``real`` is drawn, which doubles as a trends
    view of a single generated dataset.
    """
    if synth is not None:
        check_schema(real, synth)
    k = real.n_cols
    if k > MAX_PAIRPLOT_COLS:
        raise ShapeError(f"pair plot supports at most {MAX_PAIRPLOT_COLS} columns, got {k}")
    sets = [(real, REAL_COLOR, "real")]
    if synth is not None:
        sets.append((synth, SYNTH_COLOR, "synthetic"))
    both = np.vstack([d.values for d, _, _ in sets])
    lo = both.min(axis=0) if both.size else np.zeros(k)
    hi = both.max(axis=0) if both.size else np.ones(k)
    span = np.where(hi > lo, hi - lo, 1.0)

    width = LABEL_W + k * PANEL + 20
    height = TITLE_H + k * PANEL + 60
    out = _header(width, height)
    out.append(f'<text x="{_f(width / 2)}" y="26" font-size="16" text-anchor="middle">'
               f'{escape(title)}</text>')

    def px(j, v):
        return LABEL_W + j * PANEL + PAD + (v - lo[j]) / span[j] * (PANEL - 2 * PAD)

    def py(i, v):
        return TITLE_H + (i + 1) * PANEL - PAD - (v - lo[i]) / span[i] * (PANEL - 2 * PAD)

    samples = [d.values[deterministic_subsample(d.n_rows, SCATTER_CAP)] for d, _, _ in sets]
    for i in range(k):
        out.append(f'<text x="{_f(LABEL_W - 8)}" y="{_f(TITLE_H + i * PANEL + PANEL / 2)}" '
                   f'font-size="12" text-anchor="end">{escape(real.names[i])}</text>')
        for j in range(k):
            x0, y0 = LABEL_W + j * PANEL, TITLE_H + i * PANEL
            out.append(f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{PANEL}" height="{PANEL}" '
                       'fill="none" stroke="#cccccc"/>')
            if i == j:
                out.extend(_hist_panel(real, synth, j, x0, y0))
                continue
            for (_, color, _), pts in zip(sets, samples):
                for row in pts:
                    out.append(f'<circle cx="{_f(px(j, row[j]))}" cy="{_f(py(i, row[i]))}" '
                               f'r="1.5" fill="{color}" fill-opacity="0.4"/>')
    for j in range(k):
        out.append(f'<text x="{_f(LABEL_W + j * PANEL + PANEL / 2)}" '
                   f'y="{_f(TITLE_H + k * PANEL + 18)}" font-size="12" text-anchor="middle">'
                   f'{escape(real.names[j])}</text>')
    ly = TITLE_H + k * PANEL + 42
    for n, (_, color, label) in enumerate(sets):
        lx = LABEL_W + n * 110
        out.append(f'<rect x="{_f(lx)}" y="{_f(ly - 10)}" width="12" height="12" fill="{color}"/>')
        out.append(f'<text x="{_f(lx + 18)}" y="{_f(ly)}" font-size="12">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _hist_panel(real: Dataset, synth: Dataset | None, j: int, x0: float, y0: float) -> list[str]:
    a = real.values[:, j]
    b = synth.values[:, j] if synth is not None else a
    if a.size == 0 or b.size == 0:
        return []
    h = histogram_pair(real.names[j], a, b)
    series = [(np.asarray(h.real_counts) / max(a.size, 1), REAL_COLOR)]
    if synth is not None:
        series.append((np.asarray(h.synth_counts) / max(b.size, 1), SYNTH_COLOR))
    top = max(float(s.max()) for s, _ in series) or 1.0
    nb = len(h.real_counts)
    bw = (PANEL - 2 * PAD) / nb
    out = []
    for dens, color in series:
        for n, v in enumerate(dens):
            bh = v / top * (PANEL - 2 * PAD)
            if bh <= 0:
                continue
            out.append(f'<rect x="{_f(x0 + PAD + n * bw)}" y="{_f(y0 + PANEL - PAD - bh)}" '
                       f'width="{_f(bw)}" height="{_f(bh)}" fill="{color}" fill-opacity="0.45"/>')
    return out
