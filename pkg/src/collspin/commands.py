"""Implementations behind each CLI command.

Every function takes a :class:`cli.RunConfig` and writes its result; nothing
else is read, so equal configs give equal files.
"""

from __future__ import annotations

import json
import sys
from contextlib import contextmanager

import numpy as np

from .bethe import classify_mode, eigenvalue_from_roots, roots_from_vector, solve_bethe
from .ed import build_sector_block, eigendecompose_sector, full_spectrum, spectral_gap
from .figures import edge_curves, fig1_data, write_figures
from .io import from_jsonable, write_json_report, write_spectrum_csv, write_table_csv
from .semiclassics import density_grid, match_levels, quantized_levels
from .steady import p0_eigenvalue, steady_state, t1_t2
from .svg import render_svg

__all__ = ["dispatch"]


@contextmanager
def _sink(out):
    if out in (None, "-"):
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _report(cfg, data):
    with _sink(cfg.out) as fh:
        write_json_report(cfg.command, cfg.params, data, fh)


def cmd_spectrum(cfg):
    spec = full_spectrum(cfg.params, cfg.q)
    with _sink(cfg.out) as fh:
        write_spectrum_csv(spec, fh)
    if cfg.svg is not None:
        render_svg("scatter", fig1_data(cfg.params, spec), cfg.svg)


def cmd_steady(cfg):
    if cfg.p_grid is None:
        _report(cfg, steady_state(cfg.params))
        return
    rows = []
    for p in cfg.p_grid:
        st = steady_state(cfg.params.with_(p=float(p)))
        rows.append({"p": float(p), "z_p": st.z_p, "mean_sz": st.mean_sz, "entropy": st.entropy})
    _report(cfg, rows)
    if cfg.svg is not None:
        ps = np.array([r["p"] for r in rows])
        panels = [{"xlabel": "p", "ylabel": label,
                   "curves": [{"points": np.column_stack([ps, [r[key] for r in rows]]),
                               "color": "#1f4e9c"}]}
                  for key, label in (("mean_sz", "⟨S_z⟩"), ("entropy", "entropy"))]
        render_svg("curves", {"panels": panels}, cfg.svg)


def cmd_gap(cfg):
    params = cfg.params
    spec = full_spectrum(params)
    data = {"gap": spectral_gap(spec), "large_s_limit": abs(params.p) * params.gamma / 2}
    if params.p == 0:
        # relaxation times read off the slowest q = 0 and q = 1 modes
        pop = spec.in_sector(0)
        pop = pop[np.abs(pop) > 1e-10]
        coh = spec.in_sector(1) if params.two_s >= 1 else np.array([])
        t1_ed = 1 / abs(pop.real.max()) if pop.size else float("inf")
        t2_ed = 1 / abs(coh.real.max()) if coh.size else float("inf")
        t1, t2 = t1_t2(params)
        data.update({"t1": t1, "t2": t2, "t1_ed": t1_ed, "t2_ed": t2_ed})
    _report(cfg, data)


def _read_seeds(path) -> np.ndarray:
    """Roots from a bethe report, ``{"roots": [...]}`` or a bare list.

    Entries may be ``{"re", "im"}`` objects, ``[re, im]`` pairs or numbers.
    """
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    for key in ("data", "config", "roots"):
        if isinstance(doc, dict) and key in doc:
            doc = doc[key]
    if not isinstance(doc, list):
        raise ValueError(f"{path}: no list of roots found")
    seeds = []
    for v in from_jsonable(doc):
        if isinstance(v, list) and len(v) == 2:
            v = complex(v[0], v[1])
        if not isinstance(v, (int, float, complex)):
            raise ValueError(f"{path}: cannot read root {v!r}")
        seeds.append(complex(v))
    return np.array(seeds, dtype=complex)


def cmd_bethe(cfg):
    params = cfg.params
    q = cfg.q[0]
    es = eigendecompose_sector(build_sector_block(params, q), want_vectors=True)
    ed_lam = complex(es.eigenvalues[cfg.mode])
    if cfg.seed_file is not None:
        seeds = _read_seeds(cfg.seed_file)
    else:
        seeds = roots_from_vector(es.right[:, cfg.mode], q, params)
    conf = classify_mode(solve_bethe(seeds, q, params), params)
    data = {"mode": cfg.mode, "ed_lambda": ed_lam, "config": conf,
            "check_lambda": eigenvalue_from_roots(conf.roots, q, params)}
    _report(cfg, data)


def cmd_edges(cfg):
    curves = edge_curves(cfg.params, cfg.x_grid)
    rows = []
    for i, x in enumerate(cfg.x_grid):
        for (below, above), arr in curves.items():
            if np.isfinite(arr[i, 1]):
                rows.append((float(x), float(arr[i, 1]), below, above))
    rows.sort(key=lambda r: (r[0], r[1]))
    with _sink(cfg.out) as fh:
        write_table_csv(fh, ("x", "lambda", "below", "above"), rows)
    if cfg.svg is not None:
        panel = {"xlabel": "λ = Re Λ / s", "ylabel": "x = |q| / 2s",
                 "curves": [{"points": arr[:, ::-1], "color": "#1f4e9c",
                             "label": f"{b} | {a}"} for (b, a), arr in sorted(curves.items())]}
        render_svg("curves", panel, cfg.svg)


def cmd_quantize(cfg):
    params = cfg.params
    q = cfg.q[0]
    ed = eigendecompose_sector(build_sector_block(params, q)).eigenvalues.real / params.s
    pairs = match_levels(quantized_levels(q, params), ed)
    rows = [{"region": lev.region, "n": lev.n, "multiplicity": lev.multiplicity,
             "lambda": lev.lam, "ed_lambda": e, "deviation": abs(lev.lam - e)} for lev, e in pairs]
    data = {"q": q, "levels": rows,
            "max_deviation": max((r["deviation"] for r in rows), default=float("nan"))}
    _report(cfg, data)


def cmd_density(cfg):
    grid = density_grid(cfg.params, cfg.x_grid, cfg.lambda_grid)
    rows = [(float(x), float(lam), float(grid.values[i, j]), grid.regions[i, j])
            for i, x in enumerate(grid.x) for j, lam in enumerate(grid.lam)]
    with _sink(cfg.out) as fh:
        write_table_csv(fh, ("x", "lambda", "density", "region"), rows)
    if cfg.svg is not None:
        render_svg("heatmap", {"x": grid.lam, "y": grid.x, "z": grid.values,
                               "xlabel": "λ = Re Λ / s", "ylabel": "x = |q| / 2s"}, cfg.svg)


def cmd_p0(cfg):
    params = cfg.params
    sectors = []
    for q in cfg.q:
        top = params.two_s - abs(q)
        a, b = cfg.n_range if cfg.n_range is not None else (0, top)
        ns = range(a, min(b, top) + 1)
        sectors.append({"q": q, "n": list(ns), "lambda": [p0_eigenvalue(n, q, params) for n in ns]})
    t1, t2 = t1_t2(params)
    _report(cfg, {"sectors": sectors, "t1": t1, "t2": t2})


def cmd_figures(cfg):
    paths = write_figures(cfg.params, cfg.outdir)
    for path in paths.values():
        print(path)


_HANDLERS = {
    "spectrum": cmd_spectrum,
    "steady": cmd_steady,
    "gap": cmd_gap,
    "bethe": cmd_bethe,
    "edges": cmd_edges,
    "quantize": cmd_quantize,
    "density": cmd_density,
    "p0": cmd_p0,
    "figures": cmd_figures,
}


def dispatch(cfg) -> None:
    _HANDLERS[cfg.command](cfg)
