"""Exact spectrum, relaxation gap and steady state of the open collective spin.

    python3 demos/spectrum_and_steady_state.py
"""

import numpy as np

from collspin import ModelParams
from collspin.ed import full_spectrum, spectral_gap, steady_populations
from collspin.steady import entropy, mean_sz, t1_t2

params = ModelParams(h=1.0, gamma=1.2, gamma0=0.2, p=0.9, two_s=34)
spec = full_spectrum(params)
print(f"2s = {params.two_s}: {len(spec)} eigenvalues in {len(np.unique(spec.q))} sectors")
print(f"slowest nonzero decay rate: {spectral_gap(spec):.5f}")

# the gap approaches |p| gamma / 2 as the spin grows
for two_s in (16, 34, 68):
    gap = spectral_gap(full_spectrum(params.with_(two_s=two_s)))
    print(f"  s = {two_s / 2:5.1f}  gap = {gap:.5f}")
print(f"  large-s limit     {abs(params.p) * params.gamma / 2:.5f}")

# steady state: closed forms against the null vector of the q = 0 block
k = np.arange(params.dim) - params.s
print("\n    p    <Sz>/s (closed)  <Sz>/s (ED)   entropy")
for p in (-0.9, -0.3, 0.0, 0.3, 0.9):
    pp = params.with_(p=p)
    w = steady_populations(pp)
    print(f"{p:5.1f}   {mean_sz(pp) / pp.s:+.10f}  {w @ k / pp.s:+.10f}  {entropy(pp):.6f}")

t1, t2 = t1_t2(params.with_(p=0.0))
print(f"\nat p = 0: T1 = {t1:.4f}, T2 = {t2:.4f}")
