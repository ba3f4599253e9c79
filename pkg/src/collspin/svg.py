"""Minimal deterministic SVG plotting.

No plotting framework is involved: every element is written by hand with
fixed-precision coordinates, so two runs on the same data produce identical
bytes.  Three plot kinds are supported, each taking a plain dict:

``scatter`` / ``curves``
    ``{"title", "panels": [panel, ...]}`` or a single panel dict.  A panel has
    ``xlabel``, ``ylabel``, optional ``xlim``/``ylim``, ``series`` (marker
    sets: ``points``, ``color``, ``r``, ``label``, ``hollow``) and ``curves``
    (polylines: ``points``, ``color``, ``width``, ``dash``, ``label``).  ``legend``
    picks the corner for the key: ``"tr"`` (default), ``"tl"``, ``"br"``, ``"bl"``.  A
    curve may contain NaN rows to break the line.
``heatmap``
    ``{"x", "y", "z"}`` with ``z`` shaped ``(len(y), len(x))``, plus optional
    ``curves`` overlaid on the map and ``insets`` (panels drawn to the right).
"""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["EmptyPlotError", "render_svg", "svg_document", "nice_ticks", "colormap"]

PLOT_KINDS = ("scatter", "heatmap", "curves")

PANEL_W, PANEL_H = 520, 340
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 40, 50
INSET_W, INSET_H = 300, 150

# viridis anchors, enough for a smooth ramp
_CMAP = np.array([
    (68, 1, 84), (71, 44, 122), (59, 81, 139), (44, 113, 142), (33, 144, 141),
    (39, 173, 129), (92, 200, 99), (170, 220, 50), (253, 231, 37),
], dtype=float)


class EmptyPlotError(ValueError):
    pass


def _f(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def colormap(t: float) -> str:
    t = min(max(float(t), 0.0), 1.0) * (len(_CMAP) - 1)
    i = min(int(t), len(_CMAP) - 2)
    c = _CMAP[i] + (t - i) * (_CMAP[i + 1] - _CMAP[i])
    return "#{:02x}{:02x}{:02x}".format(*(int(round(v)) for v in c))


def nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else round(t, 12))
        t += step
    return ticks


def _tick_label(v: float) -> str:
    return f"{v:.6g}"


class _Frame:
    """Data-to-pixel mapping for one rectangular panel."""

    def __init__(self, x0, y0, w, h, xlim, ylim):
        self.x0, self.y0, self.w, self.h = x0, y0, w, h
        self.xlim, self.ylim = xlim, ylim

    def px(self, x):
        a, b = self.xlim
        return self.x0 + (x - a) / (b - a) * self.w

    def py(self, y):
        a, b = self.ylim
        return self.y0 + self.h - (y - a) / (b - a) * self.h


def _limits(arrays, pad=0.04):
    data = [a for a in arrays if a.size]
    if not data:
        return (0.0, 1.0)
    allv = np.concatenate(data)
    allv = allv[np.isfinite(allv)]
    if allv.size == 0:
        return (0.0, 1.0)
    lo, hi = float(allv.min()), float(allv.max())
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    d = (hi - lo) * pad
    return (lo - d, hi + d)


def _as_points(pts) -> np.ndarray:
    a = np.asarray(pts, dtype=float)
    if a.size == 0:
        return np.empty((0, 2))
    if a.ndim != 2 or a.shape[1] != 2:
        raise ValueError("points must be an (n, 2) array")
    return a


def _axes(out, fr: _Frame, xlabel, ylabel, title, font=12):
    out.append(f'<rect x="{_f(fr.x0)}" y="{_f(fr.y0)}" width="{_f(fr.w)}" height="{_f(fr.h)}" '
               'fill="none" stroke="#000" stroke-width="1"/>')
    for t in nice_ticks(*fr.xlim):
        x = fr.px(t)
        yb = fr.y0 + fr.h
        out.append(f'<line x1="{_f(x)}" y1="{_f(yb)}" x2="{_f(x)}" y2="{_f(yb + 5)}" stroke="#000"/>')
        out.append(f'<text x="{_f(x)}" y="{_f(yb + 17)}" font-size="{font - 2}" '
                   f'text-anchor="middle">{_tick_label(t)}</text>')
    for t in nice_ticks(*fr.ylim):
        y = fr.py(t)
        out.append(f'<line x1="{_f(fr.x0 - 5)}" y1="{_f(y)}" x2="{_f(fr.x0)}" y2="{_f(y)}" stroke="#000"/>')
        out.append(f'<text x="{_f(fr.x0 - 8)}" y="{_f(y + 4)}" font-size="{font - 2}" '
                   f'text-anchor="end">{_tick_label(t)}</text>')
    if xlabel:
        out.append(f'<text x="{_f(fr.x0 + fr.w / 2)}" y="{_f(fr.y0 + fr.h + 36)}" font-size="{font}" '
                   f'text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        cx, cy = fr.x0 - 52, fr.y0 + fr.h / 2
        out.append(f'<text x="{_f(cx)}" y="{_f(cy)}" font-size="{font}" text-anchor="middle" '
                   f'transform="rotate(-90 {_f(cx)} {_f(cy)})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{_f(fr.x0 + fr.w / 2)}" y="{_f(fr.y0 - 10)}" font-size="{font + 1}" '
                   f'text-anchor="middle">{escape(title)}</text>')


def _polyline_segments(pts: np.ndarray):
    ok = np.all(np.isfinite(pts), axis=1)
    start = None
    for i, good in enumerate(list(ok) + [False]):
        if good and start is None:
            start = i
        elif not good and start is not None:
            if i - start >= 2:
                yield pts[start:i]
            start = None


def _draw_panel(out, fr: _Frame, panel: dict, clip_id: str, font=12):
    out.append(f'<clipPath id="{clip_id}"><rect x="{_f(fr.x0)}" y="{_f(fr.y0)}" '
               f'width="{_f(fr.w)}" height="{_f(fr.h)}"/></clipPath>')
    out.append(f'<g clip-path="url(#{clip_id})">')
    for c in panel.get("curves", []):
        pts = _as_points(c["points"])
        color = c.get("color", "#000")
        width = c.get("width", 1.5)
        dash = f' stroke-dasharray="{c["dash"]}"' if c.get("dash") else ""
        for seg in _polyline_segments(pts):
            coords = " ".join(f"{_f(fr.px(x))},{_f(fr.py(y))}" for x, y in seg)
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                       f'stroke-width="{_f(width)}"{dash}/>')
    for s in panel.get("series", []):
        pts = _as_points(s["points"])
        color = s.get("color", "#000")
        r = s.get("r", 2.0)
        fill = 'fill="none" stroke="{}"'.format(color) if s.get("hollow") else f'fill="{color}"'
        out.append(f'<g {fill}>')
        for x, y in pts:
            if math.isfinite(x) and math.isfinite(y):
                out.append(f'<circle cx="{_f(fr.px(x))}" cy="{_f(fr.py(y))}" r="{_f(r)}"/>')
        out.append("</g>")
    out.append("</g>")
    _axes(out, fr, panel.get("xlabel", ""), panel.get("ylabel", ""), panel.get("title", ""), font)
    _legend(out, fr, panel, font)


def _legend(out, fr: _Frame, panel: dict, font):
    items = [(s.get("label"), s.get("color", "#000"), "dot") for s in panel.get("series", [])]
    items += [(c.get("label"), c.get("color", "#000"), "line") for c in panel.get("curves", [])]
    items = [it for it in items if it[0]]
    corner = panel.get("legend", "tr")
    y = fr.y0 + 14 if corner[0] == "t" else fr.y0 + fr.h - 14 * len(items) + 4
    x = fr.x0 + fr.w - 150 if corner[1] == "r" else fr.x0 + 12
    for label, color, kind in items:
        if kind == "dot":
            out.append(f'<circle cx="{_f(x + 8)}" cy="{_f(y - 4)}" r="3" fill="{color}"/>')
        else:
            out.append(f'<line x1="{_f(x)}" y1="{_f(y - 4)}" x2="{_f(x + 16)}" y2="{_f(y - 4)}" '
                       f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{_f(x + 22)}" y="{_f(y)}" font-size="{font - 2}">{escape(label)}</text>')
        y += 14


def _panel_limits(panel: dict):
    xs, ys = [], []
    for item in panel.get("series", []) + panel.get("curves", []):
        pts = _as_points(item["points"])
        xs.append(pts[:, 0])
        ys.append(pts[:, 1])
    xlim = tuple(panel["xlim"]) if "xlim" in panel else _limits(xs)
    ylim = tuple(panel["ylim"]) if "ylim" in panel else _limits(ys)
    return xlim, ylim


def _panel_is_empty(panel: dict) -> bool:
    n = sum(_as_points(it["points"]).shape[0] for it in panel.get("series", []) + panel.get("curves", []))
    return n == 0


def svg_document(width: int, height: int, body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif">')
    return "\n".join([head, f'<rect width="{width}" height="{height}" fill="#fff"/>', *body, "</svg>"]) + "\n"


def _render_panels(data: dict, kind: str) -> str:
    panels = data.get("panels", [data])
    if not panels or all(_panel_is_empty(p) for p in panels):
        raise EmptyPlotError(f"{kind} plot has no data")
    key = "series" if kind == "scatter" else "curves"
    if not any(p.get(key) for p in panels):
        raise EmptyPlotError(f"{kind} plot needs at least one entry in '{key}'")
    top = 30 if data.get("title") else 0
    cell_h = PANEL_H + MARGIN_T + MARGIN_B
    width = PANEL_W + MARGIN_L + MARGIN_R
    height = top + cell_h * len(panels)
    out = []
    if data.get("title"):
        out.append(f'<text x="{_f(width / 2)}" y="20" font-size="15" text-anchor="middle">'
                   f'{escape(data["title"])}</text>')
    for i, panel in enumerate(panels):
        xlim, ylim = _panel_limits(panel)
        fr = _Frame(MARGIN_L, top + i * cell_h + MARGIN_T, PANEL_W, PANEL_H, xlim, ylim)
        _draw_panel(out, fr, panel, f"clip{i}")
    return svg_document(width, height, out)


def _render_heatmap(data: dict) -> str:
    x = np.asarray(data.get("x", []), dtype=float)
    y = np.asarray(data.get("y", []), dtype=float)
    z = np.asarray(data.get("z", []), dtype=float)
    if x.size == 0 or y.size == 0 or z.size == 0:
        raise EmptyPlotError("heatmap has no data")
    if z.shape != (y.size, x.size):
        raise ValueError(f"z must have shape ({y.size}, {x.size}), got {z.shape}")
    finite = z[np.isfinite(z) & (z > 0)]
    if finite.size == 0:
        raise EmptyPlotError("heatmap has no positive finite values")
    vmax = float(data.get("vmax", np.quantile(finite, 0.98)))
    insets = data.get("insets", [])
    width = MARGIN_L + PANEL_W + MARGIN_R + (INSET_W + MARGIN_L + MARGIN_R if insets else 0)
    n_inset_rows = len(insets)
    height = max(PANEL_H + MARGIN_T + MARGIN_B, n_inset_rows * (INSET_H + MARGIN_T + MARGIN_B)) + 30
    out = []
    if data.get("title"):
        out.append(f'<text x="{_f(width / 2)}" y="20" font-size="15" text-anchor="middle">'
                   f'{escape(data["title"])}</text>')

    def edges(v):
        mid = (v[1:] + v[:-1]) / 2 if v.size > 1 else np.array([])
        first = v[0] - (mid[0] - v[0]) if mid.size else v[0] - 0.5
        last = v[-1] + (v[-1] - mid[-1]) if mid.size else v[-1] + 0.5
        return np.concatenate([[first], mid, [last]])

    xe, ye = edges(x), edges(y)
    fr = _Frame(MARGIN_L, 30 + MARGIN_T, PANEL_W, PANEL_H, (xe[0], xe[-1]), (ye[0], ye[-1]))
    levels = 64
    out.append('<g shape-rendering="crispEdges">')
    for j in range(y.size):
        row = z[j]
        code = np.where(np.isfinite(row), np.clip(row / vmax, 0, 1), 1.0)
        code = np.round(code * (levels - 1)).astype(int)
        code[row <= 0] = -1
        i = 0
        y_top, y_bot = fr.py(ye[j + 1]), fr.py(ye[j])
        while i < x.size:
            k = i
            while k + 1 < x.size and code[k + 1] == code[i]:
                k += 1
            if code[i] >= 0:
                x_l, x_r = fr.px(xe[i]), fr.px(xe[k + 1])
                color = colormap(code[i] / (levels - 1))
                out.append(f'<rect x="{_f(x_l)}" y="{_f(y_top)}" width="{_f(x_r - x_l)}" '
                           f'height="{_f(y_bot - y_top)}" fill="{color}"/>')
            i = k + 1
    out.append("</g>")
    overlay = {"curves": data.get("curves", []), "series": data.get("series", [])}
    if overlay["curves"] or overlay["series"]:
        _draw_panel(out, fr, {**overlay, "xlabel": data.get("xlabel", ""),
                              "ylabel": data.get("ylabel", "")}, "clipmap")
    else:
        _axes(out, fr, data.get("xlabel", ""), data.get("ylabel", ""), "")
    for i, inset in enumerate(insets):
        xlim, ylim = _panel_limits(inset)
        ifr = _Frame(MARGIN_L + PANEL_W + MARGIN_R + MARGIN_L,
                     30 + MARGIN_T + i * (INSET_H + MARGIN_T + MARGIN_B), INSET_W, INSET_H, xlim, ylim)
        _draw_panel(out, ifr, inset, f"clipinset{i}", font=11)
    return svg_document(width, height, out)


def render_svg(kind: str, data: dict, path) -> None:
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; expected one of {PLOT_KINDS}")
    text = _render_heatmap(data) if kind == "heatmap" else _render_panels(data, kind)
    with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
