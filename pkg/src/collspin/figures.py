"""Data assembly for the four standard figures.

Each ``figN_data`` returns the plain dict consumed by :func:`svg.render_svg`;
:func:`write_figures` renders all four into a directory.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .ed import build_sector_block, eigendecompose_sector, full_spectrum, steady_populations
from .model import ModelParams
from .semiclassics import density_grid, match_levels, quantized_levels, spectral_edges
from .steady import entropy, mean_sz
from .svg import render_svg

__all__ = [
    "EDGE_X",
    "edge_curves",
    "enclosure_overshoot",
    "fig1_data",
    "fig2_data",
    "fig3_data",
    "fig4_data",
    "write_figures",
]

EDGE_X = np.linspace(0.0, 1.0, 121)
HIGHLIGHT_Q = 6
QUANT_Q = 5
QUANT_TWO_S = (34, 100)
CUT_X = (0.15, 0.8)

_EDGE_COLORS = {
    ("outside", "II"): "#1f4e9c",
    ("II", "outside"): "#1f4e9c",
    ("I", "outside"): "#1f4e9c",
    ("outside", "I"): "#1f4e9c",
    ("II", "I"): "#2e8b57",
    ("I", "II"): "#2e8b57",
}


def edge_curves(params: ModelParams, x_values=EDGE_X) -> dict[tuple[str, str], np.ndarray]:
    """Edges lam_k(x) grouped by the pair of regions they separate.

    Each value is an ``(len(x), 2)`` array of ``(x, lam)`` with NaN where that
    kind of edge is absent.
    """
    xs = np.asarray(x_values, dtype=float)
    curves: dict[tuple[str, str], np.ndarray] = {}
    for i, x in enumerate(xs):
        for lam, below, above in spectral_edges(float(x), params):
            arr = curves.setdefault((below, above), np.column_stack([xs, np.full(xs.size, np.nan)]))
            arr[i, 1] = lam
    return curves


def _outer_bounds(x: float, params: ModelParams) -> tuple[float, float]:
    lams = [e[0] for e in spectral_edges(x, params)]
    return min(lams), max(lams)


def enclosure_overshoot(spec, params: ModelParams) -> float:
    """Largest distance (in Re Lambda / s) by which an eigenvalue leaves the band.

    Zero means every point sits between the lowest and highest edge of its
    own sector.
    """
    worst = 0.0
    for q in np.unique(spec.q):
        x = abs(int(q)) / params.two_s
        lo, hi = _outer_bounds(x, params)
        lam = spec.in_sector(q).real / params.s
        worst = max(worst, float(np.max(np.maximum(lo - lam, lam - hi), initial=0.0)))
    return worst


def fig1_data(params: ModelParams, spec=None) -> dict:
    if spec is None:
        spec = full_spectrum(params)
    s = params.s
    pts = np.column_stack([spec.eigenvalues.real / s, spec.eigenvalues.imag / s])
    hot = spec.q == HIGHLIGHT_Q
    curves = []
    for key, arr in sorted(edge_curves(params).items()):
        lam, x = arr[:, 1], arr[:, 0]
        color = _EDGE_COLORS.get(key, "#555")
        for sign in (1, -1):
            curves.append({"points": np.column_stack([lam, sign * 2 * params.h * x]),
                           "color": color, "width": 1.2})
    curves[0]["label"] = "band edge"
    return {
        "title": f"Liouvillian spectrum, 2s = {params.two_s}, p = {params.p:g}",
        "panels": [{
            "xlabel": "Re Λ / s",
            "ylabel": "Im Λ / s",
            "legend": "br",
            "series": [
                {"points": pts[~hot], "color": "#333", "r": 1.6, "label": "ED"},
                {"points": pts[hot], "color": "#d62728", "r": 2.4, "label": f"ED, q = {HIGHLIGHT_Q}"},
            ],
            "curves": curves,
        }],
    }


def fig2_data(params: ModelParams, q: int = QUANT_Q, two_s_values=QUANT_TWO_S) -> dict:
    colors = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd")
    compare, deviation = [], []
    lo, hi = np.inf, -np.inf
    for k, two_s in enumerate(two_s_values):
        p = params.with_(two_s=int(two_s))
        ed = eigendecompose_sector(build_sector_block(p, q)).eigenvalues.real / p.s
        pairs = match_levels(quantized_levels(q, p), ed)
        pred = np.array([lev.lam for lev, _ in pairs])
        exact = np.array([e for _, e in pairs])
        lo, hi = min(lo, exact.min(), pred.min()), max(hi, exact.max(), pred.max())
        label = f"2s = {two_s}"
        compare.append({"points": np.column_stack([pred, exact]), "color": colors[k % 4],
                        "r": 2.4, "label": label})
        deviation.append({"points": np.column_stack([pred, np.abs(pred - exact)]),
                          "color": colors[k % 4], "r": 2.4, "label": label})
    diag = np.array([[lo, lo], [hi, hi]])
    return {
        "title": f"Leading-order quantization vs exact spectrum, q = {q}",
        "panels": [
            {"xlabel": "predicted λ", "ylabel": "exact Re Λ / s", "series": compare,
             "curves": [{"points": diag, "color": "#888", "dash": "4 3"}]},
            {"xlabel": "predicted λ", "ylabel": "|predicted − exact|", "series": deviation},
        ],
    }


def fig3_data(params: ModelParams, nx: int = 100, nlam: int = 220) -> dict:
    curves = edge_curves(params)
    lam_min = np.nanmin([np.nanmin(c[:, 1]) for c in curves.values()])
    lam_max = np.nanmax([np.nanmax(c[:, 1]) for c in curves.values()])
    pad = 0.03 * (lam_max - lam_min)
    lam = np.linspace(lam_min - pad, lam_max + pad, nlam)
    xs = (np.arange(nx) + 0.5) / nx
    grid = density_grid(params, xs, lam)
    overlay = [{"points": np.column_stack([c[:, 1], 2 * params.h * c[:, 0]]), "color": "#fff",
                "width": 1.0} for _, c in sorted(curves.items())]
    fine = np.linspace(lam[0], lam[-1], 600)
    insets = []
    for xc in CUT_X:
        cut = density_grid(params, [xc], fine).values[0]
        insets.append({"title": f"x = {xc:g}", "xlabel": "λ", "ylabel": "D(λ)",
                       "ylim": (0.0, 1.15 * float(np.quantile(cut[cut > 0], 0.97))),
                       "curves": [{"points": np.column_stack([fine, cut]), "color": "#1f4e9c"}]})
    return {
        "title": f"Density of eigenvalues, p = {params.p:g}",
        "x": lam, "y": 2 * params.h * xs, "z": grid.values,
        "xlabel": "λ = Re Λ / s", "ylabel": "Im Λ / s = 2hx",
        "curves": overlay, "insets": insets,
    }


def fig4_data(params: ModelParams, n_curve: int = 201, n_dots: int = 21) -> dict:
    p_line = np.linspace(-0.99, 0.99, n_curve)
    p_dots = np.linspace(-0.99, 0.99, n_dots)
    s = params.s
    line_sz = [mean_sz(params.with_(p=float(p))) / s for p in p_line]
    line_se = [entropy(params.with_(p=float(p))) for p in p_line]
    dot_sz, dot_se = [], []
    k = np.arange(params.dim) - s
    for p in p_dots:
        w = steady_populations(params.with_(p=float(p)))
        dot_sz.append(float(w @ k) / s)
        wp = w[w > 0]
        dot_se.append(float(-(wp * np.log(wp)).sum()))
    return {
        "title": f"Steady state, 2s = {params.two_s}",
        "panels": [
            {"xlabel": "p", "ylabel": "⟨S_z⟩ / s",
             "curves": [{"points": np.column_stack([p_line, line_sz]), "color": "#1f4e9c",
                         "label": "closed form"}],
             "series": [{"points": np.column_stack([p_dots, dot_sz]), "color": "#d62728",
                         "r": 3, "label": "ED"}]},
            {"xlabel": "p", "ylabel": "entropy",
             "curves": [{"points": np.column_stack([p_line, line_se]), "color": "#1f4e9c",
                         "label": "closed form"}],
             "series": [{"points": np.column_stack([p_dots, dot_se]), "color": "#d62728",
                         "r": 3, "label": "ED"}]},
        ],
    }


def write_figures(params: ModelParams, outdir) -> dict[str, Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    jobs = {
        "fig1": ("scatter", fig1_data),
        "fig2": ("scatter", fig2_data),
        "fig3": ("heatmap", fig3_data),
        "fig4": ("curves", fig4_data),
    }
    paths = {}
    for name, (kind, build) in jobs.items():
        path = outdir / f"{name}.svg"
        render_svg(kind, build(params), path)
        paths[name] = path
    return paths
