"""Closed-form steady state and the exact p = 0 spectrum."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coherent import CoeffPolynomial
from .model import ModelParams

__all__ = [
    "SMALL_P",
    "SteadyState",
    "steady_state",
    "steady_weights",
    "mean_sz",
    "entropy",
    "p0_eigenvalue",
    "p0_eigenpoly",
    "t1_t2",
]

#: Below this |p| the closed forms are replaced by their expansions around z_p = 1.
SMALL_P = 1e-6


@dataclass(frozen=True)
class SteadyState:
    z_p: float
    weights: np.ndarray
    mean_sz: float
    entropy: float

    def polynomial(self, two_s: int) -> CoeffPolynomial:
        return CoeffPolynomial(0, self.weights.astype(complex), two_s)


def steady_weights(params: ModelParams) -> np.ndarray:
    """Normalized populations w_k proportional to z_p^k, k = m + s."""
    n = params.dim
    p = params.p
    if p == 1:
        w = np.zeros(n)
        w[0] = 1.0
        return w
    if p == -1:
        w = np.zeros(n)
        w[-1] = 1.0
        return w
    z = params.z_p
    k = np.arange(n)
    # factor out the largest term so nothing overflows
    w = z**k if z <= 1 else (1 / z) ** (n - 1 - k)
    return w / w.sum()


def _cumulants(n: int) -> tuple[float, float]:
    """Variance and fourth cumulant of the uniform law on {0, .., n-1}."""
    var = (n * n - 1) / 12
    k4 = -(n * n - 1) * (n * n + 1) / 120
    return var, k4


def _log_z(p: float) -> float:
    return math.log1p(-p) - math.log1p(p)


def _mean_k(t: float, n: int) -> float:
    """Mean of k under w_k ~ e^(t k), k = 0 .. n-1, for t != 0.

    Written with expm1 so the two 1/t terms cancel without loss.
    """
    with np.errstate(over="ignore"):
        return float(-n / np.expm1(-n * t) + 1 / np.expm1(-t))


def mean_sz(params: ModelParams) -> float:
    s = params.s
    n = params.dim
    p = params.p
    if p == 1:
        return -s
    if p == -1:
        return s
    t = _log_z(p)
    if abs(p) < SMALL_P:
        var, k4 = _cumulants(n)
        return t * var + t**3 * k4 / 6
    return _mean_k(t, n) - s


def entropy(params: ModelParams) -> float:
    """Von Neumann entropy of the steady state."""
    n = params.dim
    p = params.p
    if abs(p) == 1:
        return 0.0
    t = _log_z(p)
    if abs(p) < SMALL_P:
        var, k4 = _cumulants(n)
        return math.log(n) - t * t * var / 2 - t**4 * k4 / 8
    t = -abs(t)  # the entropy is invariant under k -> 2s - k
    log_norm = math.log(-math.expm1(n * t)) - math.log(-math.expm1(t))
    return log_norm - t * _mean_k(t, n)


def steady_state(params: ModelParams) -> SteadyState:
    return SteadyState(params.z_p, steady_weights(params), mean_sz(params), entropy(params))


def _require_p0(params: ModelParams) -> None:
    if params.p != 0:
        raise ValueError("exact hypergeometric solution requires p = 0")


def p0_eigenvalue(n: int, q: int, params: ModelParams) -> complex:
    """Exact eigenvalue of sector q in {-1, 0, 1} at p = 0."""
    _require_p0(params)
    if q not in (-1, 0, 1):
        raise ValueError("closed form known only for q in {-1, 0, 1}")
    if not 0 <= n <= params.two_s - abs(q):
        raise ValueError(f"n={n} outside [0, {params.two_s - abs(q)}]")
    s = params.s
    if q == 0:
        return complex(-params.gamma * n * (n + 1) / (4 * s))
    re = -(params.gamma + params.gamma0 + params.gamma * n * (n + 3)) / (4 * s)
    # Im = SECTOR_SIGN * q * h in this package's orientation
    return complex(re, q * params.h)


def p0_eigenpoly(n: int, params: ModelParams) -> CoeffPolynomial:
    """(zbar - 1)^n 2F1(n+1, n-2s; 2n+2; 1-zbar) expanded in powers of zbar.

    The series terminates after 2s - n terms; it is summed in exact rational
    arithmetic so no cancellation occurs in the change of variable.
    """
    _require_p0(params)
    two_s = params.two_s
    if not 0 <= n <= two_s:
        raise ValueError(f"n={n} outside [0, {two_s}]")
    # F(u) = sum_j a_j u^j with u = 1 - zbar
    a = [Fraction(1)]
    for j in range(two_s - n):
        a.append(a[-1] * (n + 1 + j) * (n - two_s + j) / ((2 * n + 2 + j) * (j + 1)))
    # Psi(zbar) = (-1)^n u^n F(u); expand u^m = (1 - zbar)^m
    coeffs = [Fraction(0)] * (two_s + 1)
    sign = -1 if n % 2 else 1
    for j, aj in enumerate(a):
        m = n + j
        binom = 1
        for k in range(m + 1):
            coeffs[k] += sign * aj * binom * (-1) ** k
            binom = binom * (m - k) // (k + 1)
    return CoeffPolynomial(0, np.array([float(c) for c in coeffs], dtype=complex), two_s)


def t1_t2(params: ModelParams) -> tuple[float, float]:
    """Population (T1) and coherence (T2) decay times at p = 0.

    Returns ``inf`` when the corresponding rate vanishes.
    """
    _require_p0(params)
    s = params.s
    t1 = math.inf if params.gamma == 0 else 2 * s / params.gamma
    rate2 = params.gamma + params.gamma0
    t2 = math.inf if rate2 == 0 else 4 * s / rate2
    return t1, t2
