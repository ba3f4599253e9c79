"""Large-s picture: spectral edges, quantized levels and eigenvalue density.

    python3 demos/semiclassical_density.py
"""

import numpy as np

from collspin import ModelParams
from collspin.ed import build_sector_block, eigendecompose_sector
from collspin.semiclassics import (
    cumulative_density, density, integrated_density, match_levels, quantized_levels,
    spectral_edges,
)

params = ModelParams(h=1.0, gamma=1.2, gamma0=0.2, p=0.9, two_s=34)

print("edges of the band, lam = Re(Lambda)/s")
for x in (0.0, 0.25, 0.5, 0.75, 1.0):
    edges = ", ".join(f"{lam:+.4f} ({lo}|{hi})" for lam, lo, hi in spectral_edges(x, params))
    print(f"  x = {x:4.2f}: {edges}")

q = 5
for two_s in (34, 100):
    p = params.with_(two_s=two_s)
    ed = eigendecompose_sector(build_sector_block(p, q)).eigenvalues.real / p.s
    pairs = match_levels(quantized_levels(q, p), ed)
    dev = max(abs(lev.lam - e) for lev, e in pairs)
    print(f"\nq = {q}, s = {p.s:g}: {len(pairs)} levels predicted, max deviation {dev:.4f}")
    for lev, e in pairs[:4]:
        print(f"  region {lev.region:>2} n = {lev.n}: {lev.lam:+.5f} vs {e:+.5f}")

x = 0.3
print(f"\ndensity at x = {x}: total weight {integrated_density(x, params):.6f} (expect {1 - x})")
edges = [e[0] for e in spectral_edges(x, params)]
for lam in np.linspace(edges[0], edges[-1], 7)[1:-1]:
    d = density(lam, x, params)
    print(f"  D({lam:+.4f}) = {d.value:.4f}  region {d.region}")

big = params.with_(two_s=100)
q = 30
lam = np.sort(eigendecompose_sector(build_sector_block(big, q)).eigenvalues.real / big.s)
model = cumulative_density(q / big.two_s, big, lam) / (1 - q / big.two_s)
emp = np.arange(1, len(lam) + 1) / len(lam)
print(f"\ns = 50, q = {q}: sup |empirical - predicted CDF| = {np.abs(emp - model).max():.3f}")
