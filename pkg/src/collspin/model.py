"""Model parameters, charge sectors and the coefficient functions of the
differential Liouvillian for a collective spin-s with polarized baths.

Conventions
-----------
Dicke states are indexed by ``i = m + s`` (``m = -s .. s``).  A sector ``q >= 0``
is spanned by ``|q + k - s><k - s|`` for ``k = 0 .. 2s - q``; sector ``-q`` is
spanned by the Hermitian conjugates of the same elements.

The dissipators carry a ``1/(2s)`` normalization,

    W_0 = sqrt(gamma0 / 2s) S_z,    W_+- = sqrt(gamma (1 -+ p) / 4s) S_+-,

which is what makes the coherent-operator polynomials below (and the exact
p = 0 eigenvalues ``-gamma n (n + 1) / 4s``) hold.  With ``H = -h S_z`` and
``L_H(rho) = -i[H, rho]`` every eigenvalue in sector ``q`` has imaginary part
``SECTOR_SIGN * q * h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

__all__ = [
    "SECTOR_SIGN",
    "ParameterError",
    "ModelParams",
    "Sector",
    "validate_params",
    "coeff_c",
    "coeff_c_vector",
    "poly_P",
    "p_coefficients",
    "P_NAMES",
]

#: Sign of ``Im(Lambda) / (q h)`` produced by the operator construction.
SECTOR_SIGN = 1

P_NAMES = ("P00", "P01", "P10", "P11", "P2")


class ParameterError(ValueError):
    """Raised for inadmissible model parameters; ``field`` names the culprit."""

    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the open collective spin.

    ``two_s`` stores 2s so that half-integer spins are exact.
    """

    h: float = 1.0
    gamma: float = 1.2
    gamma0: float = 0.2
    p: float = 0.9
    two_s: int = 34

    def __post_init__(self):
        _check(self)

    @property
    def s(self) -> float:
        return self.two_s / 2

    @property
    def dim(self) -> int:
        """Hilbert-space dimension 2s + 1."""
        return self.two_s + 1

    @property
    def z_p(self) -> float:
        """Geometric ratio (1 - p)/(1 + p) of the steady-state populations."""
        if self.p == -1:
            return math.inf
        return (1 - self.p) / (1 + self.p)

    @property
    def rate_up(self) -> float:
        """Coefficient of D[S_+] (spin injection)."""
        return self.gamma * (1 - self.p) / (2 * self.two_s)

    @property
    def rate_down(self) -> float:
        """Coefficient of D[S_-] (spin subtraction)."""
        return self.gamma * (1 + self.p) / (2 * self.two_s)

    @property
    def rate_z(self) -> float:
        """Coefficient of D[S_z] (dephasing)."""
        return self.gamma0 / self.two_s

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {"h": self.h, "gamma": self.gamma, "gamma0": self.gamma0,
                "p": self.p, "two_s": self.two_s}


def _check(params: ModelParams) -> None:
    for name in ("h", "gamma", "gamma0", "p"):
        value = getattr(params, name)
        if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
            raise ParameterError(name, f"{name} must be a finite real number")
    if params.gamma < 0:
        raise ParameterError("gamma", "gamma must be non-negative")
    if params.gamma0 < 0:
        raise ParameterError("gamma0", "gamma0 must be non-negative")
    if abs(params.p) > 1:
        raise ParameterError("p", "p out of range [-1, 1]")
    if isinstance(params.two_s, bool) or not isinstance(params.two_s, (int, np.integer)):
        raise ParameterError("two_s", "two_s must be an integer")
    if params.two_s < 1:
        raise ParameterError("two_s", "two_s must be >= 1")


def validate_params(raw: ModelParams | Mapping) -> ModelParams:
    """Return validated parameters, accepting a ``ModelParams`` or a mapping.

    Mappings may give the spin either as ``two_s`` or as ``s`` (which must be a
    multiple of 1/2).
    """
    if isinstance(raw, ModelParams):
        _check(raw)
        return raw
    data = dict(raw)
    if "s" in data:
        s = data.pop("s")
        two_s = 2 * float(s)
        if abs(two_s - round(two_s)) > 1e-12:
            raise ParameterError("s", "s must be a multiple of 1/2")
        data.setdefault("two_s", int(round(two_s)))
    unknown = set(data) - {"h", "gamma", "gamma0", "p", "two_s"}
    if unknown:
        field = sorted(unknown)[0]
        raise ParameterError(field, f"unknown parameter {field!r}")
    return ModelParams(**data)


@dataclass(frozen=True)
class Sector:
    """Eigenspace of Q_z(rho) = S_z rho - rho S_z with eigenvalue q."""

    q: int
    two_s: int

    def __post_init__(self):
        if abs(self.q) > self.two_s:
            raise IndexError(f"sector q={self.q} outside [-{self.two_s}, {self.two_s}]")

    @property
    def dim(self) -> int:
        return self.two_s - abs(self.q) + 1

    @property
    def x(self) -> float:
        """Semiclassical sector coordinate |q| / 2s."""
        return abs(self.q) / self.two_s

    def element(self, kappa: int) -> tuple[float, float]:
        """(m_row, m_col) of basis element ``kappa``."""
        if not 0 <= kappa < self.dim:
            raise IndexError(f"kappa={kappa} outside sector of dim {self.dim}")
        s = self.two_s / 2
        a, b = abs(self.q) + kappa - s, kappa - s
        return (a, b) if self.q >= 0 else (b, a)

    def flat_indices(self) -> np.ndarray:
        """Positions of the basis elements in the row-major vectorized rho."""
        d = self.two_s + 1
        k = np.arange(self.dim)
        rows, cols = abs(self.q) + k, k
        if self.q < 0:
            rows, cols = cols, rows
        return rows * d + cols


def coeff_c(q: int, kappa: int, two_s: int) -> float:
    """Coherent-operator weight c_{q,kappa}, evaluated with log-gamma."""
    q = abs(q)
    if not 0 <= kappa <= two_s - q:
        raise IndexError(f"kappa={kappa} outside [0, {two_s - q}] for q={q}")
    lg = math.lgamma
    log_c = 0.5 * (lg(q + kappa + 1) + lg(two_s - kappa + 1) - lg(kappa + 1)
                   - lg(two_s - q - kappa + 1) + lg(two_s - q + 1)
                   - lg(two_s + 1) - lg(q + 1))
    return math.exp(log_c)


def coeff_c_vector(q: int, two_s: int) -> np.ndarray:
    return np.array([coeff_c(q, k, two_s) for k in range(two_s - abs(q) + 1)])


def poly_P(which: str, zbar, x: float, params: ModelParams):
    """Evaluate one of the coefficient polynomials of the differential Liouvillian.

    ``x`` is q/2s.  The Hamiltonian part of P00 uses ``SECTOR_SIGN`` so that the
    differential operator is similar to the sector block built from the
    Lindblad generator.
    """
    z = np.asarray(zbar, dtype=complex)
    g, g0, p, h = params.gamma, params.gamma0, params.p, params.h
    if which == "P00":
        out = x * (2j * SECTOR_SIGN * h + g * (x - 1) * ((p - 1) * z + 1) - g0 * x)
    elif which == "P01":
        out = 0.5 * g * (p * (x - 1) * (z - 1) + (1 - x) * z - 1)
    elif which == "P10":
        out = 0.5 * g * ((p - 1) * (2 * x - 1) * z**2 + p + 2 * (x - 1) * z + 1)
    elif which == "P11":
        out = 0.5 * g * (p - 1) * (z - 1) * z
    elif which == "P2":
        out = 0.25 * g * z * (z - 1) * (1 + p - (1 - p) * z)
    else:
        raise ValueError(f"unknown polynomial {which!r}; expected one of {P_NAMES}")
    return out[()] if out.ndim == 0 else out


def p_coefficients(which: str, x: float, params: ModelParams) -> np.ndarray:
    """Ascending monomial coefficients of ``poly_P(which, ., x, params)``."""
    g, g0, p, h = params.gamma, params.gamma0, params.p, params.h
    if which == "P00":
        c = [x * (2j * SECTOR_SIGN * h + g * (x - 1) - g0 * x), x * g * (x - 1) * (p - 1)]
    elif which == "P01":
        c = [0.5 * g * (-p * (x - 1) - 1), 0.5 * g * (1 - x) * (1 - p)]
    elif which == "P10":
        c = [0.5 * g * (p + 1), g * (x - 1), 0.5 * g * (p - 1) * (2 * x - 1)]
    elif which == "P11":
        c = [0.0, -0.5 * g * (p - 1), 0.5 * g * (p - 1)]
    elif which == "P2":
        c = [0.0, -0.25 * g * (1 + p), 0.5 * g, -0.25 * g * (1 - p)]
    else:
        raise ValueError(f"unknown polynomial {which!r}; expected one of {P_NAMES}")
    return np.array(c, dtype=complex)
