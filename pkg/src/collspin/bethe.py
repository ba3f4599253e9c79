"""Root configurations of factorized eigen-polynomials.

An eigen-polynomial of sector q factorizes as Psi = C prod(zbar - z_i) over
2s - |q| roots.  Evaluating the eigenvalue equation at each root removes the
unknown eigenvalue and leaves the coupled algebraic (Bethe-like) equations

    sum_{j != i} 1/(z_i - z_j) = (1-p)(q/2+1)/(1+p-(1-p) z_i) + (q/2)/(1-z_i) + s/z_i.

The eigenvalue itself is recovered by applying the differential Liouvillian
to the product and reading off the ratio at a few probe points.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import polynomial as npoly

from .coherent import CoeffPolynomial, apply_diffop, rho_to_poly
from .model import ModelParams, Sector
from .semiclassics import classify_region, quartic_branch_points, spectral_edges

__all__ = [
    "BetheError",
    "BetheConfig",
    "bethe_rhs",
    "bethe_residual",
    "bethe_jacobian",
    "solve_bethe",
    "eigenvalue_from_roots",
    "roots_from_vector",
    "continuation_seeds",
    "classify_mode",
    "ANNULUS_DELTA",
]

#: Relative half-width of the modulus band that defines the region-II circle.
ANNULUS_DELTA = 0.15
#: Scaled-eigenvalue distance to the I/II separating line reported as "boundary".
BOUNDARY_BAND = 1e-3
#: Imaginary part below which a root counts as real when counting segment roots.
REAL_ROOT_TOL = 1e-6
#: Distance from zbar = 1 within which a q = 0 root is taken to be the trace zero.
PIN_TOL = 1e-6


class BetheError(ArithmeticError):
    """Pole, collision, non-convergence or failed eigen-certification."""


@dataclass(frozen=True)
class BetheConfig:
    q: int
    roots: np.ndarray
    lam: complex
    residual: float
    region: str | None = None
    excitation: int | None = None
    iterations: int = 0
    history: tuple[float, ...] = ()


def _n_roots(q: int, params: ModelParams) -> int:
    return Sector(q, params.two_s).dim - 1


def _check_roots(roots: np.ndarray, q: int, params: ModelParams) -> np.ndarray:
    z = np.asarray(roots, dtype=complex).ravel()
    n = _n_roots(q, params)
    if len(z) != n:
        raise ValueError(f"sector q={q} needs {n} roots, got {len(z)}")
    return z


def _singular_points(q: int, params: ModelParams) -> list[complex]:
    # zbar = 1 is regular for q = 0, where every traceless mode has a root
    pts = [0.0, 1.0] if q else [0.0]
    if params.p != 1:
        pts.append((1 + params.p) / (1 - params.p))
    return pts


def bethe_rhs(z, q: int, params: ModelParams):
    """Right-hand side of the Bethe equations (depends on |q| only)."""
    z = np.asarray(z, dtype=complex)
    q2 = abs(q) / 2
    p = params.p
    return (1 - p) * (q2 + 1) / (1 + p - (1 - p) * z) + q2 / (1 - z) + params.s / z


def _rhs_derivative(z, q: int, params: ModelParams):
    q2 = abs(q) / 2
    p = params.p
    return (1 - p) ** 2 * (q2 + 1) / (1 + p - (1 - p) * z) ** 2 + q2 / (1 - z) ** 2 - params.s / z**2


def _pair_inverse(z: np.ndarray) -> np.ndarray:
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    inv = 1.0 / diff
    np.fill_diagonal(inv, 0.0)
    return inv


def _assert_regular(z: np.ndarray, q: int, params: ModelParams, tol: float = 1e-12) -> None:
    for pt in _singular_points(q, params):
        hit = np.flatnonzero(np.abs(z - pt) < tol * max(1.0, abs(pt)))
        if hit.size:
            raise BetheError(f"root {hit[0]} sits on the singular point {pt}")
    if len(z) > 1:
        diff = np.abs(z[:, None] - z[None, :])
        np.fill_diagonal(diff, np.inf)
        i, j = np.unravel_index(np.argmin(diff), diff.shape)
        if diff[i, j] < tol * max(1.0, abs(z[i])):
            raise BetheError(f"roots {min(i, j)} and {max(i, j)} coincide")


def _pinned(z: np.ndarray, q: int) -> np.ndarray:
    """Mask of a q = 0 root at zbar = 1 (the trace zero of a decaying mode).

    Both sides of the eigenvalue equation vanish identically there, so that
    root carries no equation; the others still feel it through the pair sum.
    """
    if q:
        return np.zeros(len(z), dtype=bool)
    return np.abs(z - 1) < PIN_TOL


def bethe_residual(roots, q: int, params: ModelParams) -> np.ndarray:
    """Componentwise LHS - RHS of the Bethe equations."""
    z = _check_roots(roots, q, params)
    if len(z) == 0:
        return np.empty(0, dtype=complex)
    _assert_regular(z, q, params)
    with np.errstate(invalid="ignore", divide="ignore"):  # 0/0 at a pinned root
        res = _pair_inverse(z).sum(axis=1) - bethe_rhs(z, q, params)
    res[_pinned(z, q)] = 0
    return res


def bethe_jacobian(roots, q: int, params: ModelParams) -> np.ndarray:
    z = _check_roots(roots, q, params)
    inv2 = _pair_inverse(z) ** 2
    J = inv2.copy()
    with np.errstate(invalid="ignore", divide="ignore"):
        J[np.diag_indices_from(J)] = -inv2.sum(axis=1) - _rhs_derivative(z, q, params)
    pin = np.flatnonzero(_pinned(z, q))
    J[pin, :] = 0
    J[pin, pin] = 1
    return J


def _min_separation(z: np.ndarray) -> float:
    if len(z) < 2:
        return np.inf
    diff = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(diff, np.inf)
    return float(diff.min())


def solve_bethe(initial_roots, q: int, params: ModelParams, tol: float = 1e-10,
                max_iter: int = 50) -> BetheConfig:
    """Damped Newton on the full Jacobian of ``bethe_residual``.

    Steps are halved (at most 30 times) until the residual norm decreases
    without bringing two roots closer than 1e-10 of each other.
    """
    z = _check_roots(initial_roots, q, params).copy()
    z[_pinned(z, q)] = 1.0
    if len(z) == 0:
        return BetheConfig(q, z, eigenvalue_from_roots(z, q, params), 0.0)
    if not np.all(np.isfinite(z)):
        raise BetheError("initial roots must be finite")
    r = bethe_residual(z, q, params)
    norm = np.abs(r).max()
    history = [float(norm)]
    for it in range(max_iter + 1):
        if norm < tol:
            lam = eigenvalue_from_roots(z, q, params)
            return BetheConfig(q, z, lam, float(norm), iterations=it, history=tuple(history))
        if it == max_iter:
            break
        with np.errstate(all="ignore"):
            J = bethe_jacobian(z, q, params)
        if not np.all(np.isfinite(J)):
            raise BetheError(f"non-finite Bethe Jacobian at iteration {it}")
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise BetheError(f"singular Bethe Jacobian at iteration {it}") from exc
        t = 1.0
        for _ in range(31):
            trial = z + t * step
            if _min_separation(trial) > 1e-10 * max(1.0, np.abs(trial).max()):
                try:
                    with np.errstate(all="ignore"):
                        r_trial = bethe_residual(trial, q, params)
                except BetheError:
                    r_trial = None
                if r_trial is not None and np.abs(r_trial).max() < norm:
                    break
            t /= 2
        else:
            raise BetheError(f"step damping exhausted at iteration {it} (root collision or stall)")
        z, r = trial, r_trial
        norm = np.abs(r).max()
        history.append(float(norm))
    raise BetheError(f"no convergence after {max_iter} iterations (residual {norm:.2e})")


def _probes(z: np.ndarray, count: int = 3) -> np.ndarray:
    """Points well separated from every root and from each other."""
    scale = np.exp(np.mean(np.log(np.abs(z)))) if len(z) else 1.0
    rho = scale * np.array([0.6, 0.85, 1.15, 1.5])
    theta = (np.arange(24) + 0.37) * (2 * np.pi / 24)
    cand = (rho[:, None] * np.exp(1j * theta[None, :])).ravel()
    if len(z) == 0:
        return cand[:count]
    dist = np.abs(cand[:, None] - z[None, :]).min(axis=1) / scale
    order = np.argsort(-dist, kind="stable")
    chosen = []
    for idx in order:
        c = cand[idx]
        if all(abs(c - o) > 0.2 * scale for o in chosen):
            chosen.append(c)
        if len(chosen) == count:
            break
    return np.array(chosen)


def eigenvalue_from_roots(roots, q: int, params: ModelParams, rtol: float = 1e-8) -> complex:
    """Eigenvalue of the mode whose polynomial is prod(zbar - z_i).

    The differential Liouvillian is applied to the product and the ratio
    (L Psi)/Psi taken at three probes; a spread above ``rtol`` means the
    roots do not describe an eigenmode.
    """
    z = _check_roots(roots, q, params)
    coeffs = npoly.polyfromroots(z) if len(z) else np.ones(1, dtype=complex)
    poly = CoeffPolynomial(q, np.asarray(coeffs, dtype=complex), params.two_s)
    image = apply_diffop(params, q, poly)
    probes = _probes(z)
    with np.errstate(all="ignore"):
        ratios = image(probes) / poly(probes)
    if not np.all(np.isfinite(ratios)):
        raise BetheError("polynomial overflows at the probes")
    lam = complex(np.mean(ratios))
    spread = np.abs(ratios - lam).max()
    if spread > rtol * max(1.0, abs(lam)):
        raise BetheError(f"not an eigenmode: ratio spread {spread:.2e} across probes")
    return lam


def roots_from_vector(vec, q: int, params: ModelParams) -> np.ndarray:
    """Roots of the coherent-operator polynomial of a sector vector."""
    c = np.asarray(rho_to_poly(vec, q, params.two_s).coeffs, dtype=complex)
    n = len(c) - 1
    if n == 0:
        return np.empty(0, dtype=complex)
    if c[-1] == 0 or c[0] == 0:
        raise BetheError("eigen-polynomial has a root at 0 or lower degree than 2s - |q|")
    # coefficients can span dozens of decades (z_p^k); rescale zbar = rho w
    # so the end coefficients match before rooting
    log_rho = (np.log(abs(c[0])) - np.log(abs(c[-1]))) / n
    scaled = c * np.exp(log_rho * np.arange(n + 1))
    scaled = scaled / np.abs(scaled).max()
    if abs(scaled[-1]) < 1e-13:
        raise BetheError("eigen-polynomial has lower degree than 2s - |q|")
    return npoly.polyroots(scaled) * np.exp(log_rho)


def continuation_seeds(vec, q: int, params: ModelParams, two_s: int) -> np.ndarray:
    """Seed roots for spin ``two_s / 2`` from a sector vector at ``params.two_s``.

    The vector is read as a function of kappa / (2s - |q|), linearly
    resampled onto the larger sector and rooted.  Steps of one in 2s keep
    Newton in the basin of a nearby mode; larger jumps often do not.
    """
    vec = np.asarray(vec, dtype=complex)
    if len(vec) != params.two_s - abs(q) + 1:
        raise BetheError(f"vector length {len(vec)} does not match sector q={q}, 2s={params.two_s}")
    n = two_s - abs(q) + 1
    if n < 1:
        raise BetheError(f"sector q={q} does not exist for 2s={two_s}")
    if len(vec) == 1:
        out = np.full(n, vec[0])
    else:
        t, tn = np.linspace(0, 1, len(vec)), np.linspace(0, 1, n)
        out = np.interp(tn, t, vec.real) + 1j * np.interp(tn, t, vec.imag)
    return roots_from_vector(out, q, params.with_(two_s=two_s))


def _separating_line(x: float, params: ModelParams) -> float | None:
    for lam, below, above in spectral_edges(x, params):
        if {below, above} == {"I", "II"}:
            return lam
    return None


def _region_for(lam: float, x: float, params: ModelParams) -> str:
    """Region of a finite-s eigenvalue.

    Finite-s eigenvalues overshoot the outer edges by O(1/s), so only the
    line separating I from II is used; outside both regions the adjacent one
    is taken.
    """
    line = _separating_line(x, params)
    if line is not None:
        if abs(lam - line) < BOUNDARY_BAND:
            return "boundary"
        return "II" if lam < line else "I"
    edges = spectral_edges(x, params)
    regs = [r for _, b, a in edges for r in (b, a) if r != "outside"]
    if not regs:
        return classify_region(lam, x, params)
    return regs[0]


def _clamp_into(lam: float, x: float, params: ModelParams, region: str) -> float:
    edges = [e for e, b, a in spectral_edges(x, params) if region in (b, a)]
    lo, hi = min(edges), max(edges)
    pad = 1e-6 * (1 + abs(hi - lo))
    return min(max(lam, lo + pad), hi - pad)


def classify_mode(config: BetheConfig, params: ModelParams) -> BetheConfig:
    """Attach region and excitation number to a converged configuration.

    Region I counts real roots on the segments between consecutive real
    branch points (1,2) and (3,4).  Region II counts roots in the band
    |z| in [(1-d)R, (1+d)R] around the circle through the complex branch
    points, R = |r|, leaving out positive real roots between the two real
    branch points; the excitation is 2s - q - n_II.
    """
    q = config.q
    x = abs(q) / params.two_s
    if x == 1:
        return replace(config, region="II", excitation=0)
    lam = float(config.lam.real) / params.s
    region = _region_for(lam, x, params)
    if region == "boundary":
        return replace(config, region="boundary", excitation=None)
    bp = quartic_branch_points(_clamp_into(lam, x, params, region), x, params)
    z = np.asarray(config.roots)
    is_real = np.abs(z.imag) <= REAL_ROOT_TOL * np.maximum(1.0, np.abs(z))
    zr = z.real
    if region == "I":
        b = bp.real
        on_seg = is_real & (((zr >= b[0]) & (zr <= b[1])) | ((zr >= b[2]) & (zr <= b[3])))
        return replace(config, region="I", excitation=int(on_seg.sum()))
    R = float(np.abs(bp.complex[0]))
    mod = np.abs(z)
    band = (mod >= (1 - ANNULUS_DELTA) * R) & (mod <= (1 + ANNULUS_DELTA) * R)
    b = bp.real
    on_seg = is_real & (zr >= b[0]) & (zr <= b[-1])
    n_ii = int((band & ~on_seg).sum())
    return replace(config, region="II", excitation=len(z) - n_ii)
