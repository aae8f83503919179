"""Self-contained SVG rendering for error-rate curves and constellations.

No plotting stack: the outputs are small hand-written SVG documents that
diff cleanly. Error-rate plots are semilog-y against Eb/N0; constellation
plots are labeled scatters.
"""

import math
import os

from ..errors import ParseError
from .exports import (
    CONSTELLATION_HEADER,
    RESULTS_HEADER,
    read_constellation_csv,
    read_results_csv,
)

_W, _H = 640, 480
_ML, _MR, _MT, _MB = 70, 20, 20, 50
_COLORS = ["#000000", "#1f4fd8", "#c23b22", "#1a8a47", "#8a2be2", "#b8860b"]


def _csv_kind(path):
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().strip()
    if not first:
        raise ParseError(f"{path}: empty CSV")
    cols = first.split(",")
    if cols == RESULTS_HEADER:
        return "results"
    if cols == CONSTELLATION_HEADER:
        return "constellation"
    raise ParseError(f"{path}: unrecognized header {first!r}")


def emit_plot(csv_paths, out_path):
    """Render one or more CSVs (all of one kind) into an SVG file."""
    if isinstance(csv_paths, str):
        csv_paths = [csv_paths]
    if not csv_paths:
        raise ParseError("no input CSVs")
    kinds = {_csv_kind(p) for p in csv_paths}
    if len(kinds) > 1:
        raise ParseError("cannot mix results and constellation CSVs in one plot")
    kind = kinds.pop()
    if kind == "results":
        svg = _render_curves(csv_paths)
    else:
        if len(csv_paths) > 1:
            raise ParseError("constellation plots take a single CSV")
        svg = _render_constellation(csv_paths[0])
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(svg)


def _render_curves(paths):
    curves = []  # (name, [(x, y>0), ...])
    for p in paths:
        rows = read_results_csv(p)
        if not rows:
            raise ParseError(f"{p}: no data rows")
        stem = os.path.splitext(os.path.basename(p))[0]
        for metric in ("ber", "bler"):
            pts = [(r.ebn0_db, getattr(r, metric)) for r in rows
                   if getattr(r, metric) > 0.0]
            if pts:
                curves.append((f"{stem} {metric.upper()}", pts))
    if not curves:
        raise ParseError("no positive error rates to plot")

    xs = [x for _, pts in curves for x, _ in pts]
    ys = [y for _, pts in curves for _, y in pts]
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    ymin_dec = math.floor(math.log10(min(ys)))
    ymax_dec = math.ceil(math.log10(max(ys))) if max(ys) < 1 else 0
    if ymax_dec <= ymin_dec:
        ymax_dec = ymin_dec + 1

    def sx(x):
        return _ML + (x - x0) / (x1 - x0) * (_W - _ML - _MR)

    def sy(y):
        d = math.log10(y)
        return _MT + (ymax_dec - d) / (ymax_dec - ymin_dec) * (_H - _MT - _MB)

    parts = [_svg_open(), _rect_bg()]
    # decade gridlines and y tick labels
    for d in range(ymin_dec, ymax_dec + 1):
        yy = sy(10.0 ** d)
        parts.append(f'<line x1="{_ML}" y1="{yy:.1f}" x2="{_W - _MR}" y2="{yy:.1f}" '
                     'stroke="#cccccc" stroke-width="0.7"/>')
        parts.append(f'<text x="{_ML - 6}" y="{yy + 4:.1f}" text-anchor="end" '
                     f'font-size="11">1e{d}</text>')
    # x ticks: ~8 round steps
    span = x1 - x0
    step = max(round(span / 8, 1), 0.1)
    t = math.ceil(x0 / step) * step
    while t <= x1 + 1e-9:
        xx = sx(t)
        parts.append(f'<line x1="{xx:.1f}" y1="{_MT}" x2="{xx:.1f}" y2="{_H - _MB}" '
                     'stroke="#eeeeee" stroke-width="0.7"/>')
        parts.append(f'<text x="{xx:.1f}" y="{_H - _MB + 16}" text-anchor="middle" '
                     f'font-size="11">{t:.4g}</text>')
        t += step
    parts.append(_axes_box())
    parts.append(f'<text x="{(_ML + _W - _MR) / 2:.1f}" y="{_H - 12}" '
                 'text-anchor="middle" font-size="12">Eb/N0 [dB]</text>')
    parts.append(f'<text x="16" y="{(_MT + _H - _MB) / 2:.1f}" font-size="12" '
                 f'transform="rotate(-90 16 {(_MT + _H - _MB) / 2:.1f})" '
                 'text-anchor="middle">error rate</text>')

    for ci, (name, pts) in enumerate(curves):
        color = _COLORS[ci % len(_COLORS)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                     'stroke-width="1.5"/>')
        for x, y in pts:
            parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.5" '
                         f'fill="{color}"/>')
        ly = _MT + 16 + 16 * ci
        parts.append(f'<line x1="{_W - _MR - 150}" y1="{ly}" x2="{_W - _MR - 125}" '
                     f'y2="{ly}" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{_W - _MR - 120}" y="{ly + 4}" font-size="11" '
                     f'class="legend">{name}</text>')
    parts.append("</svg>\n")
    return "\n".join(parts)


def _render_constellation(path):
    labels, pts = read_constellation_csv(path)
    if len(pts) == 0:
        raise ParseError(f"{path}: no constellation points")
    lim = 1.1 * max(max(abs(pts.real)), max(abs(pts.imag)), 1e-9)

    def sx(v):
        return _ML + (v + lim) / (2 * lim) * (_W - _ML - _MR)

    def sy(v):
        return _MT + (lim - v) / (2 * lim) * (_H - _MT - _MB)

    parts = [_svg_open(), _rect_bg()]
    parts.append(f'<line x1="{sx(-lim):.1f}" y1="{sy(0):.1f}" x2="{sx(lim):.1f}" '
                 f'y2="{sy(0):.1f}" stroke="#bbbbbb"/>')
    parts.append(f'<line x1="{sx(0):.1f}" y1="{sy(-lim):.1f}" x2="{sx(0):.1f}" '
                 f'y2="{sy(lim):.1f}" stroke="#bbbbbb"/>')
    parts.append(_axes_box())
    for lab, p in zip(labels, pts):
        parts.append(f'<circle cx="{sx(p.real):.2f}" cy="{sy(p.imag):.2f}" r="4" '
                     'fill="#1f4fd8" class="point"/>')
        parts.append(f'<text x="{sx(p.real) + 6:.2f}" y="{sy(p.imag) - 5:.2f}" '
                     f'font-size="9">{lab}</text>')
    parts.append(f'<text x="{(_ML + _W - _MR) / 2:.1f}" y="{_H - 12}" '
                 'text-anchor="middle" font-size="12">in-phase</text>')
    parts.append("</svg>\n")
    return "\n".join(parts)


def _svg_open():
    return ('<svg xmlns="http://www.w3.org/2000/svg" '
            f'viewBox="0 0 {_W} {_H}" font-family="sans-serif">')


def _rect_bg():
    return f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="#ffffff"/>'


def _axes_box():
    return (f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
            f'height="{_H - _MT - _MB}" fill="none" stroke="#000000"/>')
