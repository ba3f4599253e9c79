"""Polynomial (coherent-operator) representation of sector operators.

A sector-q operator with kappa-components ``v`` is represented by the
polynomial ``Psi(zbar) = sum_k c_{q,k} v_k zbar^k``.  The Liouvillian then acts
as a second-order differential operator whose matrix on monomials is
tridiagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .model import ModelParams, Sector, coeff_c_vector, p_coefficients

__all__ = [
    "DegreeClosureError",
    "CoeffPolynomial",
    "rho_to_poly",
    "poly_to_rho",
    "build_diffop_matrix",
    "apply_diffop",
    "trace_functional",
]


class DegreeClosureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class CoeffPolynomial:
    """Psi^(q)(zbar) stored as ascending coefficients."""

    q: int
    coeffs: np.ndarray
    two_s: int

    def __post_init__(self):
        expected = self.two_s - abs(self.q) + 1
        if len(self.coeffs) != expected:
            raise ValueError(f"expected {expected} coefficients for q={self.q}, got {len(self.coeffs)}")

    def __call__(self, zbar):
        return npoly.polyval(zbar, self.coeffs)

    def roots(self) -> np.ndarray:
        c = np.trim_zeros(np.asarray(self.coeffs), "b")
        if len(c) <= 1:
            return np.empty(0, dtype=complex)
        return npoly.polyroots(c)


def rho_to_poly(sector_vec, q: int, two_s: int) -> CoeffPolynomial:
    v = np.asarray(sector_vec, dtype=complex)
    dim = Sector(q, two_s).dim
    if v.shape != (dim,):
        raise ValueError(f"sector vector must have shape ({dim},), got {v.shape}")
    return CoeffPolynomial(q, coeff_c_vector(q, two_s) * v, two_s)


def poly_to_rho(poly: CoeffPolynomial) -> np.ndarray:
    return np.asarray(poly.coeffs, dtype=complex) / coeff_c_vector(poly.q, poly.two_s)


def _falling(k: np.ndarray, b: int) -> np.ndarray:
    out = np.ones_like(k, dtype=float)
    for j in range(b):
        out = out * (k - j)
    return out


def build_diffop_matrix(params: ModelParams, q: int) -> np.ndarray:
    """Matrix of the differential Liouvillian on monomial coefficients.

    Assembled from ``zbar^a d^b zbar^k = k!/(k-b)! zbar^(k-b+a)``.  The
    degree-raising row is checked to vanish, so the result is square of size
    2s - |q| + 1.  Negative sectors are the complex conjugate of ``|q|``.
    """
    two_s = params.two_s
    n = Sector(q, two_s).dim
    s = params.s
    x = abs(q) / two_s
    terms = [
        (s * p_coefficients("P00", x, params) + p_coefficients("P01", x, params), 0),
        (p_coefficients("P10", x, params) + p_coefficients("P11", x, params) / s, 1),
        (p_coefficients("P2", x, params) / s, 2),
    ]
    M = np.zeros((n + 3, n), dtype=complex)
    k = np.arange(n)
    for coeffs, b in terms:
        ff = _falling(k, b)
        for a, c in enumerate(coeffs):
            if c == 0:
                continue
            rows = k - b + a
            ok = (ff != 0) & (rows >= 0)
            M[rows[ok], k[ok]] += c * ff[ok]
    overflow = np.abs(M[n:]).max()
    scale = max(np.abs(M[:n]).max(), 1.0)
    if overflow > 1e-12 * scale:
        raise DegreeClosureError(f"differential operator raises degree (residual {overflow:.2e})")
    M = M[:n]
    return M.conj() if q < 0 else M


def apply_diffop(params: ModelParams, q: int, poly: CoeffPolynomial) -> CoeffPolynomial:
    """Apply the differential Liouvillian by polynomial arithmetic (no matrix)."""
    if poly.q != q or poly.two_s != params.two_s:
        raise ValueError("polynomial does not belong to the requested sector")
    s = params.s
    x = abs(q) / params.two_s
    f = np.asarray(poly.coeffs, dtype=complex)
    P = {name: p_coefficients(name, x, params) for name in ("P00", "P01", "P10", "P11", "P2")}
    if q < 0:
        # conjugate representation: act with the conjugated operator
        P = {k: v.conj() for k, v in P.items()}
    d1 = npoly.polyder(f) if len(f) > 1 else np.zeros(1, dtype=complex)
    d2 = npoly.polyder(f, 2) if len(f) > 2 else np.zeros(1, dtype=complex)
    out = npoly.polyadd(npoly.polymul(s * P["P00"] + P["P01"], f),
                        npoly.polymul(npoly.polyadd(P["P10"], P["P11"] / s), d1))
    out = npoly.polyadd(out, npoly.polymul(P["P2"] / s, d2))
    n = len(f)
    out = np.pad(out, (0, max(0, n - len(out))))
    tail = np.abs(out[n:]).max() if len(out) > n else 0.0
    if tail > 1e-12 * max(np.abs(out[:n]).max(), np.abs(f).max(), 1e-300):
        raise DegreeClosureError(f"differential operator raises degree (residual {tail:.2e})")
    return CoeffPolynomial(q, out[:n], poly.two_s)


def trace_functional(poly: CoeffPolynomial) -> complex:
    """tr(rho) = Psi^(0)(1); defined only on the q = 0 sector."""
    if poly.q != 0:
        raise ValueError("trace functional is defined only for q = 0")
    return complex(np.sum(poly.coeffs))
