"""Self-contained SVG output: solution overlays and existence heat maps.

Plain string assembly keeps the files byte-for-byte reproducible (no
timestamps, no generated ids, no external fonts or stylesheets).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Union
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=140, top=30, bottom=50)
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
FOUND, NOT_FOUND = "#4daf4a", "#d9d9d9"


@dataclass(frozen=True)
class SolutionOverlay:
    x: np.ndarray
    curves: Dict[str, np.ndarray]
    title: str = ""


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick(v: float) -> str:
    return f"{v:.4g}"


def _header(title: str) -> list:
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle">{escape(title)}</text>')
    return out


def solution_svg(overlay: SolutionOverlay) -> str:
    x = np.asarray(overlay.x, dtype=float)
    if x.size == 0 or not overlay.curves:
        raise ValueError("nothing to plot")
    ys = [np.asarray(v, dtype=float) for v in overlay.curves.values()]
    x0, x1 = float(x.min()), float(x.max())
    y0 = min(0.0, min(float(v.min()) for v in ys))
    y1 = max(float(v.max()) for v in ys)
    if y1 <= y0:
        y1 = y0 + 1.0
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return MARGIN["left"] + (v - x0) / (x1 - x0) * pw

    def py(v):
        return MARGIN["top"] + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = _header(overlay.title)
    out.append(
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black"/>'
    )
    for k in range(5):
        xv = x0 + k * (x1 - x0) / 4
        yv = y0 + k * (y1 - y0) / 4
        out.append(
            f'<text x="{_fmt(px(xv))}" y="{HEIGHT - MARGIN["bottom"] + 18}" '
            f'text-anchor="middle">{_tick(xv)}</text>'
        )
        out.append(
            f'<text x="{MARGIN["left"] - 6}" y="{_fmt(py(yv) + 4)}" text-anchor="end">{_tick(yv)}</text>'
        )
    for idx, (label, y) in enumerate(zip(overlay.curves, ys)):
        color = PALETTE[idx % len(PALETTE)]
        pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(x, y))
        out.append(
            f'<polyline class="curve" data-label="{escape(label)}" fill="none" '
            f'stroke="{color}" stroke-width="1.5" points="{pts}"/>'
        )
        ly = MARGIN["top"] + 16 + 18 * idx
        lx = WIDTH - MARGIN["right"] + 12
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 20}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def heatmap_svg(emap) -> str:
    """Two-colour map of ``solver_found``; a dark border marks predicted cells."""
    xs, ys = emap.axis_values(0), emap.axis_values(1)
    nx, ny = len(xs), len(ys)
    if nx == 0 or ny == 0 or not emap.cells:
        raise ValueError("empty sweep")
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
    cw, ch = pw / nx, ph / ny
    out = _header(f"existence map: {emap.axis_name(0)} x {emap.axis_name(1)}")
    for (i, j), cell in sorted(emap.cells.items()):
        fill = FOUND if cell.solver_found else NOT_FOUND
        stroke = "black" if cell.theorem_predicts else "white"
        width = 2 if cell.theorem_predicts else 1
        x = MARGIN["left"] + i * cw
        y = MARGIN["top"] + (ny - 1 - j) * ch
        out.append(
            f'<rect class="cell" x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(cw)}" height="{_fmt(ch)}" '
            f'fill="{fill}" stroke="{stroke}" stroke-width="{width}"/>'
        )
    for i, v in enumerate(xs):
        out.append(
            f'<text x="{_fmt(MARGIN["left"] + (i + 0.5) * cw)}" y="{HEIGHT - MARGIN["bottom"] + 16}" '
            f'text-anchor="middle" font-size="10">{_tick(v)}</text>'
        )
    for j, v in enumerate(ys):
        out.append(
            f'<text x="{MARGIN["left"] - 6}" y="{_fmt(MARGIN["top"] + (ny - 1 - j + 0.5) * ch + 4)}" '
            f'text-anchor="end" font-size="10">{_tick(v)}</text>'
        )
    out.append(
        f'<text x="{MARGIN["left"] + pw / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle">'
        f"{escape(emap.axis_name(0))}</text>"
    )
    out.append(
        f'<text x="16" y="{MARGIN["top"] + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2:.1f})">{escape(emap.axis_name(1))}</text>'
    )
    lx = WIDTH - MARGIN["right"] + 12
    for k, (color, label) in enumerate(((FOUND, "solution found"), (NOT_FOUND, "not found"))):
        y = MARGIN["top"] + 10 + 20 * k
        out.append(f'<rect x="{lx}" y="{y}" width="14" height="14" fill="{color}"/>')
        out.append(f'<text x="{lx + 20}" y="{y + 11}">{label}</text>')
    y = MARGIN["top"] + 50
    out.append(f'<rect x="{lx}" y="{y}" width="14" height="14" fill="white" stroke="black" stroke-width="2"/>')
    out.append(f'<text x="{lx + 20}" y="{y + 11}">predicted</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(artifact, path: Union[str, Path]) -> Path:
    """Render a ``SolutionOverlay`` or an ``ExistenceMap`` to ``path``."""
    if isinstance(artifact, SolutionOverlay):
        text = solution_svg(artifact)
    elif hasattr(artifact, "cells") and hasattr(artifact, "axes"):
        text = heatmap_svg(artifact)
    else:
        raise TypeError(f"cannot render {type(artifact).__name__} as SVG")
    path = Path(path)
    path.write_text(text)
    return path
