"""Leading-order large-s description of the spectrum.

In sector q = 2s x the eigenpolynomial is written as exp(2s(1-x) int G) and
the resolvent G0 solves a quadratic whose discriminant is, up to a constant
factor, the quartic

    W(zbar; lam) = W_a(zbar) + lam W_b(zbar)

in zbar.  Its four roots (the branch points) decide which region of the
(x, lam) plane a scaled eigenvalue lam = Re(Lambda)/s belongs to:

* region I: four real branch points, all strictly between 1 and z_p^-1;
* region II: two real branch points in that interval plus a complex pair.

Everywhere else no eigenvalues accumulate.  Counting functions are contour
integrals of G0 around the cuts; the density of states is the period of
dz/sqrt(W), available in closed form through K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import quad
from scipy.optimize import brentq

from .elliptic import ellipk, ellipk_tilde
from .model import ModelParams, p_coefficients

__all__ = [
    "PoleError",
    "DegenerateCurveError",
    "QuantizationError",
    "ContourError",
    "DomainError",
    "BranchPoints",
    "Contour",
    "DensityValue",
    "DensityGrid",
    "discriminant_parts",
    "discriminant_quartic",
    "g0_branches",
    "quartic_branch_points",
    "classify_region",
    "spectral_edges",
    "region_interval",
    "contour_integral",
    "contour_integral_g0",
    "cut_fraction",
    "root_fraction",
    "quantize_lambda",
    "QuantizedLevel",
    "quantized_levels",
    "match_levels",
    "density",
    "density_grid",
    "integrated_density",
    "cumulative_density",
]

REGIONS = ("I", "II", "outside")

#: Complex branch points closer than this (relative) to the real axis are a
#: numerically split real double root.
DOUBLE_ROOT_TOL = 1e-6


class PoleError(ZeroDivisionError):
    pass


class DegenerateCurveError(ValueError):
    pass


class QuantizationError(ValueError):
    pass


class ContourError(RuntimeError):
    pass


class DomainError(ValueError):
    pass


# ---------------------------------------------------------------------------
# discriminant


def _check_x(x: float) -> None:
    if not 0 <= x <= 1:
        raise ValueError(f"x={x} outside [0, 1]")


def _real_parts(x: float, params: ModelParams):
    """P10, P2 and the lam-free real part of P00 as real coefficient arrays."""
    P10 = p_coefficients("P10", x, params).real
    P2 = p_coefficients("P2", x, params).real
    # the i h x term of P00 cancels against Im(Lambda)/s = q h/s
    P00r = p_coefficients("P00", x, params).real
    return P10, P2, P00r


def _leading(params: ModelParams) -> float:
    return (params.gamma * (1 - params.p) / 2) ** 2


def discriminant_parts(x: float, params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Ascending coefficients (W_a, W_b) of the monic quartic W = W_a + lam W_b."""
    Wa, Wb = _discriminant_parts(float(x), params)
    return Wa.copy(), Wb.copy()


@lru_cache(maxsize=1024)
def _discriminant_parts(x: float, params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    _check_x(x)
    lead = _leading(params)
    if lead <= 1e-300:
        raise DegenerateCurveError("discriminant degenerates (p = 1 or gamma = 0)")
    P10, P2, P00r = _real_parts(x, params)
    Wa = npoly.polysub(npoly.polymul(P10, P10), 4 * npoly.polymul(P2, P00r))
    Wb = 4 * P2
    Wa = np.pad(Wa, (0, 5 - len(Wa)))[:5] / lead
    Wb = np.pad(Wb, (0, 5 - len(Wb)))[:5] / lead
    return Wa, Wb


def discriminant_quartic(lam: float, x: float, params: ModelParams) -> np.ndarray:
    Wa, Wb = _discriminant_parts(float(x), params)
    return Wa + lam * Wb


def g0_branches(zbar, lam: float, x: float, params: ModelParams):
    """Both roots (G+, G-) of the leading-order Riccati relation at ``zbar``.

    G+ uses the principal square root of the discriminant.  The quadratic is
    solved in the cancellation-free form, so as x -> 1 one branch tends to
    the linear solution -C/B and the other diverges.
    """
    _check_x(x)
    if x == 1:
        raise DegenerateCurveError("x = 1: sector has a single state, no curve")
    z = np.asarray(zbar, dtype=complex)
    P10, P2, P00r = _real_parts(x, params)
    A = 4 * (1 - x) ** 2 * npoly.polyval(z, P2)
    B = 2 * (1 - x) * npoly.polyval(z, P10)
    C = npoly.polyval(z, P00r) - lam
    if np.any(np.abs(A) <= 1e-14 * (np.abs(B) + np.abs(C) + 1e-300)):
        raise PoleError("zbar at a zero of P2: G0 has a pole there")
    r = np.sqrt(B * B - 4 * A * C)
    flip = (np.conj(B) * r).real >= 0
    qq = np.where(flip, -(B + r) / 2, -(B - r) / 2)
    a_branch = qq / A
    b_branch = C / qq
    g_plus = np.where(flip, b_branch, a_branch)
    g_minus = np.where(flip, a_branch, b_branch)
    if g_plus.ndim == 0:
        return g_plus[()], g_minus[()]
    return g_plus, g_minus


# ---------------------------------------------------------------------------
# branch points and regions


@dataclass(frozen=True)
class BranchPoints:
    """Roots of W in zbar, real ones first (ascending), then the complex ones."""

    lam: float
    x: float
    roots: np.ndarray
    n_real: int

    @property
    def real(self) -> np.ndarray:
        return self.roots[: self.n_real].real

    @property
    def complex(self) -> np.ndarray:
        return self.roots[self.n_real:]


def _horner(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    val = np.full_like(z, c[-1])
    for ck in c[-2::-1]:
        val = val * z + ck
    return val


def _polish(coeffs: np.ndarray, roots: np.ndarray, steps: int = 3) -> np.ndarray:
    if roots.size == 0:
        return roots
    d = coeffs[1:] * np.arange(1, len(coeffs))
    out = roots.copy()
    for _ in range(steps):
        f = _horner(coeffs, out)
        fp = _horner(d, out)
        ok = np.abs(fp) > 1e-300
        step = np.where(ok, f / np.where(ok, fp, 1), 0)
        # keep a step only if it shrinks the residual
        trial = out - step
        better = np.abs(_horner(coeffs, trial)) < np.abs(f)
        out = np.where(better, trial, out)
    return out


def _pinned_roots(x: float, params: ModelParams) -> list[float]:
    """Branch points that do not move with lam.

    At p = 0 both P10 and P2 vanish at zbar = 1 (P2 doubly), so (zbar - 1)^2
    divides W; at x = 0 the factor is (zbar - 1)(zbar - 1/z_p).
    """
    if params.p == 0:
        return [1.0, 1.0]
    if x == 0:
        return [1.0, (1 + params.p) / (1 - params.p)]
    return []


def quartic_branch_points(lam: float, x: float, params: ModelParams) -> BranchPoints:
    W = discriminant_quartic(lam, x, params)
    pinned = _pinned_roots(x, params)
    rest = W
    if pinned:
        # deflate exactly so near-coincident roots are not smeared by ~eps^(1/k)
        rest, rem = npoly.polydiv(W, npoly.polyfromroots(pinned))
        if np.abs(rem).max() > 1e-9 * np.abs(W).max():
            raise ArithmeticError("pinned branch point is not a root of W")
    # eigenvalues of the real companion matrix: exact real roots or exact pairs
    roots = npoly.polyroots(rest) if len(rest) > 1 else np.empty(0, dtype=complex)
    # a real double root comes back as a pair split by ~sqrt(eps); snap it
    is_real = np.abs(roots.imag) <= DOUBLE_ROOT_TOL * np.maximum(1.0, np.abs(roots))
    real = np.sort(np.concatenate([_polish(rest, roots[is_real].real.astype(complex)).real, pinned]))
    cplx = roots[~is_real]
    if len(cplx) % 2:
        raise ArithmeticError("unpaired complex branch point")
    upper = _polish(rest, cplx[cplx.imag > 0])
    upper = upper[np.argsort(upper.real)]
    cplx = np.concatenate([upper, upper.conj()])
    return BranchPoints(lam, x, np.concatenate([real.astype(complex), cplx]), len(real))


def _window(params: ModelParams) -> tuple[float, float]:
    zs = params.z_p
    inv = math.inf if zs == 0 else 1 / zs
    return min(1.0, inv), max(1.0, inv)


def _collapsed(params: ModelParams) -> bool:
    """p = 0: the window (1, 1/z_p) shrinks to a point and region I is absent."""
    lo, hi = _window(params)
    return hi - lo < DOUBLE_ROOT_TOL


def _region_of(bp: BranchPoints, params: ModelParams) -> str:
    lo, hi = _window(params)
    if _collapsed(params):
        # the two real branch points form a double root pinned at zbar = 1
        tol = DOUBLE_ROOT_TOL
    else:
        # at x = 0 two branch points sit exactly on the window ends, and a
        # moving one approaching them is resolved only to ~sqrt(eps)
        tol = 1e-7 * hi
    inside = np.all((bp.real > lo - tol) & (bp.real < hi + tol))
    if bp.n_real == 4 and inside:
        return "I"
    if bp.n_real == 2 and inside:
        return "II"
    return "outside"


def _raw_region(lam: float, x: float, params: ModelParams) -> str:
    return _region_of(quartic_branch_points(lam, x, params), params)


def classify_region(lam: float, x: float, params: ModelParams) -> str:
    """'I', 'II' or 'outside' for the scaled eigenvalue ``lam`` in sector x."""
    region = _raw_region(lam, x, params)
    if region == "II" and _collapsed(params):
        if lam > _full_arc_edge(x, params):
            return "outside"
    return region


def _critical_value(Wa, Wb, z):
    """-W_a/W_b at z, by l'Hopital where both vanish (a branch point pinned for all lam)."""
    scale = np.abs(Wb).max()
    for k in range(4):
        wb = npoly.polyval(z, npoly.polyder(Wb, k) if k else Wb)
        if abs(wb) > 1e-6 * scale:
            return -npoly.polyval(z, npoly.polyder(Wa, k) if k else Wa) / wb
    return None


def _bisect_label(f, a: float, b: float, la: str, iters: int = 60) -> float:
    """Locate where the label f(lam) stops being ``la`` between a and b."""
    for _ in range(iters):
        m = 0.5 * (a + b)
        if m in (a, b):
            break
        if f(m) == la:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


@lru_cache(maxsize=512)
def _raw_edges(x: float, params: ModelParams) -> tuple[tuple[float, str, str], ...]:
    Wa, Wb = _discriminant_parts(float(x), params)
    crit = npoly.polysub(npoly.polymul(npoly.polyder(Wa), Wb), npoly.polymul(Wa, npoly.polyder(Wb)))
    crit = np.trim_zeros(crit, "b")
    zs = npoly.polyroots(crit) if len(crit) > 1 else np.empty(0)
    cands = []
    for z in zs:
        lam = _critical_value(Wa, Wb, z)
        if lam is not None and abs(lam.imag) <= 1e-6 * (1 + abs(lam)):
            cands.append(float(lam.real))
    # multiple roots of the critical polynomial come back as clusters
    clusters: list[list[float]] = []
    for lam in sorted(cands):
        if clusters and lam - clusters[-1][-1] <= 1e-5 * (1 + abs(lam)):
            clusters[-1].append(lam)
        else:
            clusters.append([lam])
    f = lambda lam: _raw_region(lam, x, params)
    out = []
    for cl in clusters:
        d = 1e-5 * (1 + abs(cl[0]))
        a, b = cl[0] - d, cl[-1] + d
        below, above = f(a), f(b)
        if below == above:
            continue
        lam = _bisect_label(f, a, b, below)
        if x == 0 and a <= 0 <= b:
            # W = P10^2 at lam = 0: exact double roots on both window ends
            lam = 0.0
        out.append((lam, below, above))
    return tuple(out)


def _full_arc_edge(x: float, params: ModelParams) -> float:
    """Upper edge at p = 0: the lam at which the arc carries all 2s - q roots.

    This happens at lam = -gamma0 x^2 (checked against the root count in the
    tests); the root count itself is ill-conditioned there for small x because
    the arc ends run into the double pole of G0 at zbar = 1.
    """
    return -params.gamma0 * x * x


def spectral_edges(x: float, params: ModelParams) -> list[tuple[float, str, str]]:
    """Real lam where the region changes, ascending, as ``(lam, below, above)``.

    Candidates are the critical values of lam(z) = -W_a(z)/W_b(z), i.e. the
    lam at which W has a double root; each is confirmed, and located to
    machine precision, by bisection on the region label.  At p = 0 the upper
    edge is instead where the arc cut has absorbed all 2s - q roots.
    """
    if x == 1:
        # one state: lam = Re P00 = -gamma0 for every zbar, a zero-width band
        lam = -params.gamma0
        return [(lam, "outside", "II"), (lam, "II", "outside")]
    edges = list(_raw_edges(float(x), params))
    if _collapsed(params):
        edges = [e for e in edges if e[1] != "II"]
        edges.append((_full_arc_edge(float(x), params), "II", "outside"))
    return edges


def region_interval(x: float, params: ModelParams, region: str) -> tuple[float, float] | None:
    """The lam interval occupied by ``region`` in sector x, or None if empty."""
    if region not in ("I", "II"):
        raise ValueError(f"unknown region {region!r}")
    lo = hi = None
    for lam, below, above in spectral_edges(x, params):
        if above == region and lo is None:
            lo = lam
        if below == region:
            hi = lam
    if lo is None or hi is None or hi <= lo:
        return None
    return lo, hi


# ---------------------------------------------------------------------------
# contour integrals


@dataclass(frozen=True)
class Contour:
    """Closed curve z(t), t in [0, 1), with derivative dz/dt."""

    z: Callable[[np.ndarray], np.ndarray]
    dz: Callable[[np.ndarray], np.ndarray]

    @classmethod
    def circle(cls, center: complex, radius: float) -> "Contour":
        w = 2 * np.pi
        return cls(lambda t: center + radius * np.exp(1j * w * t),
                   lambda t: 1j * w * radius * np.exp(1j * w * t))

    @classmethod
    def ellipse(cls, a: float, b: float, width: float) -> "Contour":
        """Ellipse with foci-ish ends slightly beyond [a, b] and half-height ``width``."""
        c = (a + b) / 2
        half = (b - a) / 2 + width
        w = 2 * np.pi
        return cls(lambda t: c + half * np.cos(w * t) + 1j * width * np.sin(w * t),
                   lambda t: w * (-half * np.sin(w * t) + 1j * width * np.cos(w * t)))


def contour_integral(f, contour: Contour, tol: float = 1e-10, n0: int = 512,
                     n_max: int = 1 << 18) -> complex:
    """Trapezoid rule (spectral for periodic integrands) with doubling."""
    prev = None
    n = n0
    while n <= n_max:
        t = np.arange(n) / n
        val = np.sum(f(contour.z(t)) * contour.dz(t)) / n
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return complex(val)
        prev = val
        n *= 2
    raise ContourError("contour integral did not converge")


def _track(values: np.ndarray) -> np.ndarray:
    """Choose signs of square-root samples so the sequence is continuous."""
    out = values.copy()
    flips = np.abs(out[1:] - out[:-1]) > np.abs(out[1:] + out[:-1])
    sign = np.cumprod(np.where(flips, -1.0, 1.0))
    out[1:] *= sign
    return out


def _sqrt_disc(z, lam, x, params):
    Wa, Wb = _discriminant_parts(float(x), params)
    W = npoly.polyval(z, Wa) + lam * npoly.polyval(z, Wb)
    # disc = 4 (1-x)^2 lead W
    return 2 * (1 - x) * math.sqrt(_leading(params)) * np.sqrt(W.astype(complex))


def _A(z, x, params):
    return 4 * (1 - x) ** 2 * npoly.polyval(z, p_coefficients("P2", x, params).real)


def contour_integral_g0(lam: float, x: float, params: ModelParams, contour: Contour,
                        branch: int = 1, tol: float = 1e-10, n0: int = 512,
                        n_max: int = 1 << 18) -> complex:
    """Closed-contour integral of the G0 branch continued along the contour.

    ``branch`` (+1 or -1) selects the sign of the square root at t = 0.  A
    contour that encircles an odd number of branch points does not close on
    the same sheet; that raises ``ContourError``.
    """
    if x == 1:
        raise DegenerateCurveError("x = 1: sector has a single state, no curve")
    P10 = p_coefficients("P10", x, params).real
    prev = None
    n = n0
    while n <= n_max:
        t = np.arange(n + 1) / n
        z = contour.z(t)
        A = _A(z, x, params)
        if np.any(np.abs(A) < 1e-13):
            raise PoleError("contour passes through a pole of G0")
        sq = _track(branch * _sqrt_disc(z, lam, x, params))
        if abs(sq[-1] - sq[0]) > 1e-6 * max(1.0, abs(sq[0])):
            raise ContourError("G0 does not return to its starting sheet on this contour")
        g = (-2 * (1 - x) * npoly.polyval(z, P10) + sq) / (2 * A)
        val = np.sum((g * contour.dz(t))[:-1]) / n
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return complex(val)
        prev = val
        n *= 2
    raise ContourError("contour integral did not converge")


def _open_path_integral(lam, x, params, path, tol=1e-10, n0=512, n_max=1 << 18):
    """Integral of sqrt(disc)/(2A) along an open path with endpoint clustering.

    ``path(t)`` returns (z, dz/dt) on t in [0, 1]; the substitution
    t = (1 - cos u)/2 removes the square-root endpoint singularities.
    """
    prev = None
    n = n0
    while n <= n_max:
        u = (np.arange(n) + 0.5) * np.pi / n
        t = (1 - np.cos(u)) / 2
        z, dzdt = path(t)
        dz = dzdt * np.sin(u) / 2 * (np.pi / n)
        sq = _track(_sqrt_disc(z, lam, x, params))
        val = np.sum(sq / (2 * _A(z, x, params)) * dz)
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return complex(val)
        prev = val
        n *= 2
    raise ContourError("path integral did not converge")


def cut_fraction(lam: float, x: float, params: ModelParams, a: complex, b: complex,
                 arc: bool = False) -> float:
    """Fraction of eigenpolynomial roots on the cut joining branch points a and b.

    This is (1/2 pi i) times the loop integral of G0 around the cut, i.e.
    twice the path integral of the square-root part.  With ``arc`` the cut
    runs from ``a`` counter-clockwise along the circle |z| = |a| through the
    negative real axis to ``b = conj(a)``; otherwise it is the segment.
    """
    if arc:
        R = abs(a)
        th0 = float(np.angle(a))
        span = 2 * np.pi - 2 * th0

        def path(t):
            z = R * np.exp(1j * (th0 + span * t))
            return z, 1j * span * z
    else:
        a, b = complex(a), complex(b)

        def path(t):
            return a + (b - a) * t, np.full_like(t, b - a, dtype=complex)

    val = 2 * _open_path_integral(lam, x, params, path) / (2j * np.pi)
    return abs(val)


def root_fraction(lam: float, x: float, params: ModelParams, region: str | None = None) -> float:
    """Fraction of the 2s - q roots on the cut that moves with ``lam``.

    Region I: one of the two real cuts (the lower one).  Region II: the arc
    joining the complex pair.  This is the semiclassical counting function.
    """
    bp = quartic_branch_points(lam, x, params)
    found = _region_of(bp, params)
    if region is None:
        region = found
    if found != region:
        raise ValueError(f"lam={lam} lies in region {found}, not {region}")
    if region == "I":
        r = bp.real
        return cut_fraction(lam, x, params, r[0], r[1])
    if region == "II":
        return cut_fraction(lam, x, params, bp.complex[0], bp.complex[1], arc=True)
    raise ValueError(f"no cut for lam={lam} outside the spectrum")


def quantize_lambda(n: int, x: float, params: ModelParams, region: str) -> float:
    """lam with exactly ``n`` roots on the moving cut (leading order in 1/s).

    In region I the count is per real cut and every level n >= 1 is two-fold
    degenerate.  In region II n counts roots on the arc, starting from the
    bottom edge at n = 0.
    """
    if n < 0:
        raise QuantizationError("n must be non-negative")
    span = region_interval(x, params, region)
    if span is None:
        raise QuantizationError(f"region {region} is empty at x={x}")
    lo, hi = span
    total = params.two_s * (1 - x)
    eps = 1e-9 * (1 + abs(hi - lo))
    f = lambda lam: total * root_fraction(lam, x, params, region) - n
    # region I counts grow from the top edge downwards; region II from the bottom up
    end_zero, end_max = (hi - eps, lo + eps) if region == "I" else (lo + eps, hi - eps)
    if n == 0:
        return hi if region == "I" else lo
    fmax = f(end_max)
    if fmax < 0:
        raise QuantizationError(
            f"no solution: at most {total * root_fraction(end_max, x, params, region):.3f} "
            f"roots fit in region {region} at x={x}")
    return brentq(f, min(end_zero, end_max), max(end_zero, end_max), xtol=1e-13)


@dataclass(frozen=True)
class QuantizedLevel:
    region: str
    n: int
    lam: float
    multiplicity: int


def quantized_levels(q: int, params: ModelParams) -> list[QuantizedLevel]:
    """Every level of sector q that the leading-order quantization reaches.

    Region II levels are listed from the bottom edge up, region I levels
    from the top edge down; levels n >= 1 of region I come in pairs.
    """
    x = abs(q) / params.two_s
    out = []
    for region in ("II", "I"):
        if region_interval(x, params, region) is None:
            continue
        n = 0
        while True:
            try:
                lam = quantize_lambda(n, x, params, region)
            except QuantizationError:
                break
            mult = 2 if region == "I" and n > 0 else 1
            out.append(QuantizedLevel(region, n, lam, mult))
            n += 1
    return out


def match_levels(levels, ed_lam) -> list[tuple[QuantizedLevel, float]]:
    """Pair each quantized level with the exact eigenvalue(s) it predicts.

    ``ed_lam`` holds Re(Lambda)/s of one sector.  Region II level n is the
    n-th value counted from the bottom; region I level n >= 1 takes the pair
    at descending positions 2n - 1 and 2n, level 0 the topmost value.
    """
    desc = np.sort(np.asarray(ed_lam, dtype=float))[::-1]
    asc = desc[::-1]
    out = []
    for lev in levels:
        if lev.region == "II":
            picks = [lev.n]
        elif lev.n == 0:
            picks = [0]
        else:
            picks = [2 * lev.n - 1, 2 * lev.n]
        src = asc if lev.region == "II" else desc
        out.extend((lev, float(src[i])) for i in picks if i < len(src))
    return out


# ---------------------------------------------------------------------------
# density of states


@dataclass(frozen=True)
class DensityValue:
    value: float
    region: str


def _density_from_bp(bp: BranchPoints, region: str, params: ModelParams) -> float:
    g, p = params.gamma, params.p
    with np.errstate(divide="ignore", invalid="ignore"):
        r = 1 / bp.roots
    if region == "I":
        r1, r2, r3, r4 = np.sort(r.real)
        m = (r1 - r2) * (r3 - r4) / ((r3 - r2) * (r1 - r4))
        val = 4 / (np.pi * g * (1 + p)) * ellipk(m) / np.sqrt(complex((r2 - r3) * (r1 - r4)))
    else:
        real = np.sort(r[: bp.n_real].real)
        upper = r[bp.n_real:][np.argmax(r[bp.n_real:].imag)]
        r1, r4 = real
        r2, r3 = np.conj(upper), upper
        m = (r2 - r3) * (r1 - r4) / ((r1 - r3) * (r2 - r4))
        K = ellipk(m) if m.imag <= 0 else ellipk_tilde(m)
        val = 2 / (np.pi * g * (1 + p)) * K / np.sqrt((r1 - r3) * (r4 - r2))
    if abs(val.imag) > 1e-8 * abs(val) or val.real <= 0:
        raise ArithmeticError(f"closed-form density inconsistent: {val}")
    return float(val.real)


def density(lam: float, x: float, params: ModelParams) -> DensityValue:
    """Density of scaled eigenvalues per unit lam in the sector at x.

    Normalized so that the integral over lam equals 1 - x.  On an edge the
    log or square-root singularity is reported as ``inf``.  Raises
    ``DomainError`` outside both regions.
    """
    if params.gamma == 0 or params.p == 1 or params.p == -1:
        raise DegenerateCurveError("density requires gamma > 0 and |p| < 1")
    bp = quartic_branch_points(lam, x, params)
    region = _region_of(bp, params)
    if region == "II" and _collapsed(params):
        region = classify_region(lam, x, params)
    if region == "outside":
        raise DomainError(f"lam={lam} at x={x} lies outside the spectrum")
    with np.errstate(all="ignore"):
        try:
            value = _density_from_bp(bp, region, params)
        except ZeroDivisionError:
            value = math.inf
    return DensityValue(value if math.isfinite(value) else math.inf, region)


def integrated_density(x: float, params: ModelParams, upto: float | None = None) -> float:
    """Integral of ``density`` over lam (below ``upto`` if given).

    Over the whole support this equals 1 - x at leading order.
    """
    edges = [lam for lam, _, _ in spectral_edges(x, params)]
    if upto is not None:
        edges = [e for e in edges if e < upto] + [upto]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (a + b)
        if classify_region(mid, x, params) == "outside":
            continue
        # substitution lam = a + (b - a) sin^2(v) tames the edge singularities
        def f(v, a=a, b=b):
            try:
                d = density(a + (b - a) * math.sin(v) ** 2, x, params).value
            except DomainError:  # rounding right at an edge
                return 0.0
            if not math.isfinite(d):
                # only within rounding distance of a log-divergent edge
                return 0.0
            return d * (b - a) * math.sin(2 * v)

        val, _ = quad(f, 0, math.pi / 2, limit=200, epsabs=1e-11, epsrel=1e-10)
        total += val
    return total


def cumulative_density(x: float, params: ModelParams, lam_values, n: int = 1024) -> np.ndarray:
    """Integral of ``density`` from the bottom edge up to each lam.

    Each region panel is mapped by lam = a + (b - a) sin^2(v) and integrated
    with the midpoint rule in v, then interpolated.
    """
    lam_values = np.asarray(lam_values, dtype=float)
    edges = [lam for lam, _, _ in spectral_edges(x, params)]
    knots, cum = [], []
    total = 0.0
    v = (np.arange(n) + 0.5) * (np.pi / 2) / n
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a or classify_region(0.5 * (a + b), x, params) == "outside":
            continue
        lam = a + (b - a) * np.sin(v) ** 2
        d = np.empty(n)
        for i, l in enumerate(lam):
            try:
                d[i] = density(l, x, params).value
            except DomainError:
                d[i] = 0.0
        d[~np.isfinite(d)] = 0.0
        w = d * (b - a) * np.sin(2 * v) * (np.pi / 2) / n
        knots.extend([a, *lam, b])
        part = np.cumsum(w)
        cum.extend([total, *(total + part - w / 2), total + part[-1]])
        total += part[-1]
    if not knots:
        return np.zeros_like(lam_values)
    return np.interp(lam_values, knots, cum, left=0.0, right=total)


@dataclass(frozen=True)
class DensityGrid:
    x: np.ndarray
    lam: np.ndarray
    values: np.ndarray      # shape (len(x), len(lam))
    regions: np.ndarray     # same shape, one of REGIONS

    def __post_init__(self):
        if self.values.shape != (len(self.x), len(self.lam)):
            raise ValueError("grid shape mismatch")
        if np.any(self.values < 0):
            raise ValueError("negative density")


def density_grid(params: ModelParams, x_values, lam_values) -> DensityGrid:
    xs = np.asarray(x_values, dtype=float)
    ls = np.asarray(lam_values, dtype=float)
    vals = np.zeros((len(xs), len(ls)))
    regs = np.empty((len(xs), len(ls)), dtype=object)
    for i, x in enumerate(xs):
        for j, lam in enumerate(ls):
            try:
                d = density(lam, x, params)
            except DomainError:
                d = DensityValue(0.0, "outside")
            vals[i, j] = d.value
            regs[i, j] = d.region
    return DensityGrid(xs, ls, vals, regs)
