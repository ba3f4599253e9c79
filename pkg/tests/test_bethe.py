import numpy as np
import pytest
from hypothesis import given, strategies as st

from collspin.bethe import (
    BetheConfig, BetheError, bethe_jacobian, bethe_residual, bethe_rhs, classify_mode,
    continuation_seeds, eigenvalue_from_roots, roots_from_vector, solve_bethe,
)
from collspin.ed import build_sector_block, eigendecompose_sector
from collspin.model import ModelParams


def _modes(params, q):
    es = eigendecompose_sector(build_sector_block(params, q), want_vectors=True)
    return es.eigenvalues, es.right


def _steady_roots(params):
    n = params.two_s + 1
    w = np.exp(2j * np.pi * np.arange(1, n) / n)
    return w / params.z_p


@given(st.sampled_from([0.9, 0.5, 0.3, -0.4]), st.integers(1, 6), st.data())
def test_exact_eigenvectors_solve_the_equations(p, two_s, data):
    params = ModelParams(p=p, two_s=two_s)
    q = data.draw(st.integers(-two_s, two_s))
    lam, V = _modes(params, q)
    for j in range(len(lam)):
        z = roots_from_vector(V[:, j], q, params)
        assert np.max(np.abs(bethe_residual(z, q, params)), initial=0.0) < 1e-6
        conf = solve_bethe(z, q, params)
        assert conf.residual < 1e-10
        assert abs(conf.lam - lam[j]) < 1e-9 * max(1, abs(lam[j]))


def test_steady_roots_in_closed_form():
    params = ModelParams(two_s=8, p=0.5)
    z = _steady_roots(params)
    assert np.abs(bethe_residual(z, 0, params)).max() < 1e-10
    assert abs(eigenvalue_from_roots(z, 0, params)) < 1e-10
    conf = classify_mode(solve_bethe(z, 0, params), params)
    assert conf.region == "I" and conf.excitation == 0


def test_rhs_depends_on_modulus_of_q():
    params = ModelParams(two_s=6)
    z = np.array([0.3 + 0.2j, -2.0])
    assert np.array_equal(bethe_rhs(z, 3, params), bethe_rhs(z, -3, params))


@given(st.integers(0, 3), st.integers(0, 2**31))
def test_jacobian_matches_finite_differences(q, seed):
    params = ModelParams(two_s=6, p=0.4)
    rng = np.random.default_rng(seed)
    n = params.two_s - q
    z = 3 * (rng.normal(size=n) + 1j * rng.normal(size=n)) + 0.5j
    J = bethe_jacobian(z, q, params)
    h = 1e-7
    for k in range(n):
        dz = np.zeros(n, dtype=complex)
        dz[k] = h
        fd = (bethe_residual(z + dz, q, params) - bethe_residual(z - dz, q, params)) / (2 * h)
        assert np.allclose(J[:, k], fd, rtol=1e-5, atol=1e-5)


def test_pinned_root_for_decaying_zero_sector_modes():
    params = ModelParams(two_s=4, p=0.3)
    lam, V = _modes(params, 0)
    z = roots_from_vector(V[:, 1], 0, params)
    assert np.min(np.abs(z - 1)) < 1e-8  # traceless mode
    conf = solve_bethe(z, 0, params)
    assert 1.0 in conf.roots
    assert abs(conf.lam - lam[1]) < 1e-9


def test_errors():
    params = ModelParams(two_s=4, p=0.3)
    with pytest.raises(ValueError):
        bethe_residual(np.ones(3), 0, params)
    with pytest.raises(BetheError):
        bethe_residual(np.array([0.0, 2.0, 3.0, 4.0]), 0, params)   # root at a pole
    with pytest.raises(BetheError):
        bethe_residual(np.array([2.0, 2.0, 3.0, 5.0]), 0, params)   # collision
    with pytest.raises(BetheError):
        bethe_residual(np.array([1.0, 2.0, 3.0]), 1, params)        # zbar = 1 is singular for q != 0
    with pytest.raises(BetheError):
        solve_bethe(np.array([np.nan, 2.0, 3.0, 4.0]), 0, params)
    with pytest.raises(BetheError):
        eigenvalue_from_roots(np.array([2.0, 3.0, 4.0, 5.0]), 0, params)


def test_newton_converges_from_a_perturbed_start():
    params = ModelParams(two_s=6, p=0.9)
    lam, V = _modes(params, 2)
    z = roots_from_vector(V[:, 3], 2, params)
    rng = np.random.default_rng(1)
    start = z * (1 + 1e-3 * rng.normal(size=z.size))
    conf = solve_bethe(start, 2, params)
    assert conf.iterations > 0
    assert conf.history[-1] < conf.history[0]
    assert abs(conf.lam - lam[3]) < 1e-8


def test_single_state_sector():
    params = ModelParams(two_s=4)
    conf = solve_bethe(np.empty(0), 4, params)
    assert conf.lam == pytest.approx(build_sector_block(params, 4).diag[0])
    assert classify_mode(conf, params).excitation == 0


def test_classification_follows_spectral_order():
    params = ModelParams(two_s=20, p=0.9)
    q = 4
    lam, V = _modes(params, q)
    seen = []
    for j in range(8):
        z = roots_from_vector(V[:, j], q, params)
        conf = classify_mode(BetheConfig(q, z, lam[j], 0.0), params)
        seen.append((conf.region, conf.excitation))
    # slowest modes: region I, counted down from the top edge in degenerate pairs
    assert seen[:3] == [("I", 0), ("I", 1), ("I", 1)]
    # faster modes: region II with excitation growing as Re(lambda) decreases
    rest = [e for r, e in seen[3:]]
    assert all(r == "II" for r, _ in seen[3:])
    assert rest == sorted(rest) and len(set(rest)) == len(rest)


def test_continuation_from_the_adjacent_spin():
    small, big = ModelParams(p=0.9, two_s=7), ModelParams(p=0.9, two_s=8)
    for q in (0, 2, 5):
        lam_small, V = _modes(small, q)
        lam_big, _ = _modes(big, q)
        hits = set()
        for j in range(len(lam_small)):
            z = continuation_seeds(V[:, j], q, small, big.two_s)
            assert len(z) == big.two_s - q
            conf = solve_bethe(z, q, big, max_iter=100)
            dist = np.abs(lam_big - conf.lam)
            assert dist.min() < 1e-8
            hits.add(int(dist.argmin()))
        assert len(hits) == len(lam_small)


def test_continuation_rejects_mismatched_vectors():
    params = ModelParams(two_s=4)
    with pytest.raises(BetheError):
        continuation_seeds(np.ones(3), 0, params, 5)
    with pytest.raises(BetheError):
        continuation_seeds(np.ones(1), 4, params, 3)
