"""Exact construction and diagonalization of the Liouvillian.

Two independent routes are provided: the dense superoperator built from spin
matrices (small s only, used as an oracle) and the tridiagonal per-sector
blocks used for production runs.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .model import ModelParams, Sector

__all__ = [
    "DENSE_MAX_TWO_S",
    "ZERO_MODE_TOL",
    "EigensolverError",
    "SteadyStateNotFound",
    "SectorBlock",
    "SectorEigensystem",
    "SpectrumResult",
    "spin_matrices",
    "build_dense_superoperator",
    "build_sector_block",
    "eigendecompose_sector",
    "full_spectrum",
    "spectral_gap",
    "steady_populations",
    "max_workers",
]

DENSE_MAX_TWO_S = 20
ZERO_MODE_TOL = 1e-10


class EigensolverError(RuntimeError):
    def __init__(self, q: int, dim: int, cause: Exception | str):
        super().__init__(f"eigensolver failed for sector q={q} (dim {dim}): {cause}")
        self.q = q
        self.dim = dim


class SteadyStateNotFound(RuntimeError):
    pass


def max_workers() -> int:
    """Worker cap from ``LIOUV_THREADS`` (default: CPU count)."""
    raw = os.environ.get("LIOUV_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def spin_matrices(two_s: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(S_z, S_+, S_-) in the Dicke basis ordered m = -s .. s."""
    s = two_s / 2
    m = np.arange(two_s + 1) - s
    sp = np.zeros((two_s + 1, two_s + 1))
    up = np.sqrt((s - m[:-1]) * (s + m[:-1] + 1))
    sp[np.arange(1, two_s + 1), np.arange(two_s)] = up
    return np.diag(m), sp, sp.T.copy()


def _dissipator(W: np.ndarray) -> np.ndarray:
    # row-major vec: vec(A rho B) = kron(A, B^T) vec(rho)
    eye = np.eye(W.shape[0])
    WdW = W.conj().T @ W
    return np.kron(W, W.conj()) - 0.5 * np.kron(WdW, eye) - 0.5 * np.kron(eye, WdW.T)


def build_dense_superoperator(params: ModelParams) -> np.ndarray:
    """Full Lindblad generator acting on row-major ``vec(rho)``.

    Only meant as a reference for small spins; refuses ``two_s > 20``.
    """
    if params.two_s > DENSE_MAX_TWO_S:
        raise ValueError(f"dense superoperator limited to two_s <= {DENSE_MAX_TWO_S}")
    sz, sp, sm = spin_matrices(params.two_s)
    eye = np.eye(params.dim)
    H = -params.h * sz
    L = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    L = L + params.rate_z * _dissipator(sz)
    L = L + params.rate_up * _dissipator(sp)
    L = L + params.rate_down * _dissipator(sm)
    return L


@dataclass(frozen=True)
class SectorBlock:
    """Tridiagonal Liouvillian restricted to sector ``q``.

    ``hop_up[k]`` is the amplitude transferred from coordinate k to k + 1
    (the S_+ rho S_- term), ``hop_down[k]`` from k + 1 to k (S_- rho S_+).
    As a matrix acting on column vectors they sit on the sub- and
    super-diagonal respectively.
    """

    q: int
    two_s: int
    diag: np.ndarray
    hop_up: np.ndarray
    hop_down: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.diag)

    def to_dense(self) -> np.ndarray:
        return (np.diag(self.diag) + np.diag(self.hop_up, -1)
                + np.diag(self.hop_down, 1)).astype(complex)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[1:] += self.hop_up * v[:-1]
        out[:-1] += self.hop_down * v[1:]
        return out


def build_sector_block(params: ModelParams, q: int) -> SectorBlock:
    sector = Sector(q, params.two_s)
    s = params.s
    k = np.arange(sector.dim)
    aq = abs(q)
    m1 = aq + k - s
    m2 = k - s
    a_plus = lambda m: np.sqrt(np.clip((s - m) * (s + m + 1), 0, None))
    a_minus = lambda m: np.sqrt(np.clip((s + m) * (s - m + 1), 0, None))
    n_up = lambda m: (s - m) * (s + m + 1)     # <m|S_- S_+|m>
    n_down = lambda m: (s + m) * (s - m + 1)   # <m|S_+ S_-|m>

    diag = (1j * params.h * aq
            - 0.5 * params.rate_z * aq**2
            - 0.5 * params.rate_up * (n_up(m1) + n_up(m2))
            - 0.5 * params.rate_down * (n_down(m1) + n_down(m2)))
    hop_up = params.rate_up * a_plus(m1[:-1]) * a_plus(m2[:-1])
    hop_down = params.rate_down * a_minus(m1[1:]) * a_minus(m2[1:])
    diag = diag.astype(complex)
    if q < 0:
        diag = diag.conj()
    return SectorBlock(q, params.two_s, diag, hop_up.astype(float), hop_down.astype(float))


@dataclass
class SectorEigensystem:
    q: int
    eigenvalues: np.ndarray
    right: np.ndarray | None = None
    left: np.ndarray | None = None


def _normalize_columns(V: np.ndarray) -> np.ndarray:
    V = V / np.linalg.norm(V, axis=0)
    for j in range(V.shape[1]):
        col = V[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-14 * np.abs(col).max())
        phase = col[nz[0]] / abs(col[nz[0]])
        V[:, j] = col / phase
    return V


def eigendecompose_sector(block: SectorBlock, want_vectors: bool = False) -> SectorEigensystem:
    """Dense diagonalization of a sector block.

    Eigenvalues are ordered by decreasing real part (ties by imaginary part).
    Right eigenvectors have unit norm with the first nonzero entry real positive.
    """
    A = block.to_dense()
    try:
        if want_vectors:
            w, vl, vr = scipy.linalg.eig(A, left=True, right=True)
        else:
            w = scipy.linalg.eigvals(A)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverError(block.q, block.dim, exc) from exc
    if not np.all(np.isfinite(w)):
        raise EigensolverError(block.q, block.dim, "non-finite eigenvalues")
    order = np.lexsort((w.imag, -w.real))
    w = w[order]
    if not want_vectors:
        return SectorEigensystem(block.q, w)
    vr = _normalize_columns(vr[:, order])
    vl = vl[:, order]
    # biorthogonal scaling: left_j^H right_j = 1
    overlaps = np.einsum("ij,ij->j", vl.conj(), vr)
    vl = vl / overlaps.conj()
    return SectorEigensystem(block.q, w, vr, vl)


@dataclass
class SpectrumResult:
    """Eigenvalues of the Liouvillian tagged by sector.

    ``q`` and ``eigenvalues`` are parallel arrays sorted by (q ascending,
    real part descending).  Eigenvectors, when requested, live in
    ``sectors[q].right`` / ``.left`` in the sector's kappa basis.
    """

    params: ModelParams
    q: np.ndarray
    eigenvalues: np.ndarray
    sectors: dict[int, SectorEigensystem] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def in_sector(self, q: int) -> np.ndarray:
        return self.eigenvalues[self.q == q]

    def steady_index(self) -> int:
        idx = int(np.argmin(np.abs(self.eigenvalues)))
        if abs(self.eigenvalues[idx]) >= ZERO_MODE_TOL:
            raise SteadyStateNotFound(
                f"steady state not found: smallest |lambda| = {abs(self.eigenvalues[idx]):.3e}")
        return idx


def full_spectrum(params: ModelParams, q_list=None, want_vectors: bool = False) -> SpectrumResult:
    """Diagonalize every requested sector (default: all q = -2s .. 2s)."""
    if q_list is None:
        q_list = range(-params.two_s, params.two_s + 1)
    q_list = sorted(set(int(q) for q in q_list))
    for q in q_list:
        Sector(q, params.two_s)

    def work(q):
        return eigendecompose_sector(build_sector_block(params, q), want_vectors)

    workers = min(max_workers(), len(q_list))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            systems = list(pool.map(work, q_list))
    else:
        systems = [work(q) for q in q_list]

    qs = np.concatenate([np.full(len(es.eigenvalues), es.q) for es in systems])
    lam = np.concatenate([es.eigenvalues for es in systems])
    sectors = {es.q: es for es in systems} if want_vectors else {}
    return SpectrumResult(params, qs, lam, sectors)


def steady_populations(params: ModelParams) -> np.ndarray:
    """Dicke populations of the zero mode of the q = 0 block, summing to one."""
    es = eigendecompose_sector(build_sector_block(params, 0), want_vectors=True)
    idx = int(np.argmin(np.abs(es.eigenvalues)))
    if abs(es.eigenvalues[idx]) >= ZERO_MODE_TOL:
        raise SteadyStateNotFound(
            f"steady state not found: smallest |lambda| = {abs(es.eigenvalues[idx]):.3e}")
    v = es.right[:, idx].real
    return v / v.sum()


def spectral_gap(spec: SpectrumResult) -> float:
    """Smallest decay rate -Re(lambda) among all modes except the steady state."""
    idx = spec.steady_index()
    rest = np.delete(spec.eigenvalues, idx)
    if rest.size == 0:
        return float("inf")
    return float(np.min(np.abs(rest.real)))
