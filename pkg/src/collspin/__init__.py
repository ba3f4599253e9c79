"""Liouvillian spectra of a collective spin with pumping, decay and dephasing.

Exact diagonalization per sector, the polynomial (coherent-operator)
representation with its Bethe-like root equations, large-s semiclassics
(band edges, quantization, density of eigenvalues) and the closed-form
steady state.
"""

__version__ = "0.1.0"

from .model import ModelParams, ParameterError, Sector, validate_params  # noqa: E402
from .ed import full_spectrum, spectral_gap, steady_populations  # noqa: E402
from .coherent import CoeffPolynomial, apply_diffop, build_diffop_matrix  # noqa: E402
from .steady import entropy, mean_sz, steady_state, t1_t2  # noqa: E402
from .semiclassics import (  # noqa: E402
    density,
    density_grid,
    quantize_lambda,
    quantized_levels,
    spectral_edges,
)
from .bethe import classify_mode, eigenvalue_from_roots, solve_bethe  # noqa: E402

__all__ = [
    "__version__",
    "ModelParams",
    "ParameterError",
    "Sector",
    "validate_params",
    "full_spectrum",
    "spectral_gap",
    "steady_populations",
    "CoeffPolynomial",
    "apply_diffop",
    "build_diffop_matrix",
    "steady_state",
    "mean_sz",
    "entropy",
    "t1_t2",
    "spectral_edges",
    "quantize_lambda",
    "quantized_levels",
    "density",
    "density_grid",
    "solve_bethe",
    "eigenvalue_from_roots",
    "classify_mode",
]
