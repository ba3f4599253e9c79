import numpy as np
import pytest
from hypothesis import given, strategies as st

from collspin.ed import (
    DENSE_MAX_TWO_S, SteadyStateNotFound, build_dense_superoperator, build_sector_block,
    eigendecompose_sector, full_spectrum, max_workers, spectral_gap, steady_populations,
)
from collspin.model import ModelParams, Sector

from oracles import hausdorff, lindblad_spectrum, steady_populations_nullspace

params_st = st.builds(
    ModelParams,
    h=st.floats(-2, 2), gamma=st.floats(0.05, 2), gamma0=st.floats(0, 1),
    p=st.floats(-0.95, 0.95), two_s=st.integers(1, 6),
)


@given(params_st)
def test_sector_blocks_reproduce_the_full_generator(params):
    spec = full_spectrum(params)
    ref = lindblad_spectrum(params)
    assert len(spec) == params.dim**2
    assert hausdorff(spec.eigenvalues, ref) < 1e-8


def test_dense_superoperator_agrees_with_oracle():
    params = ModelParams(two_s=5, p=0.3)
    w = np.linalg.eigvals(build_dense_superoperator(params))
    assert hausdorff(w, lindblad_spectrum(params)) < 1e-10


def test_dense_superoperator_refuses_large_spin():
    with pytest.raises(ValueError):
        build_dense_superoperator(ModelParams(two_s=DENSE_MAX_TWO_S + 1))


@given(params_st, st.data())
def test_block_is_the_restriction_of_the_dense_generator(params, data):
    q = data.draw(st.integers(-params.two_s, params.two_s))
    idx = Sector(q, params.two_s).flat_indices()
    L = build_dense_superoperator(params)
    block = build_sector_block(params, q).to_dense()
    assert np.allclose(L[np.ix_(idx, idx)], block, atol=1e-12)


def test_matvec_matches_dense():
    block = build_sector_block(ModelParams(two_s=9), 2)
    v = np.random.default_rng(0).normal(size=block.dim) + 0j
    assert np.allclose(block.matvec(v), block.to_dense() @ v)


@given(params_st, st.data())
def test_opposite_sectors_are_conjugate(params, data):
    q = data.draw(st.integers(1, params.two_s))
    a = eigendecompose_sector(build_sector_block(params, q)).eigenvalues
    b = eigendecompose_sector(build_sector_block(params, -q)).eigenvalues
    assert hausdorff(a, b.conj()) < 1e-9


@given(params_st)
def test_spectrum_is_stable_and_imaginary_parts_track_q(params):
    spec = full_spectrum(params)
    assert np.all(spec.eigenvalues.real <= 1e-9)
    assert np.allclose(spec.eigenvalues.imag, spec.q * params.h, atol=1e-8)


def test_ordering_and_counts():
    params = ModelParams()
    spec = full_spectrum(params)
    assert len(spec) == 1225
    assert np.all(np.diff(spec.q) >= 0)
    for q in (-5, 0, 7):
        re = spec.in_sector(q).real
        assert np.all(np.diff(re) <= 0)


def test_subset_of_sectors():
    spec = full_spectrum(ModelParams(two_s=6), q_list=[3, -1, 3])
    assert set(spec.q) == {-1, 3}
    assert len(spec) == 6 + 4


def test_trace_is_preserved_in_the_zero_sector():
    params = ModelParams(two_s=8, p=0.4)
    A = build_sector_block(params, 0).to_dense()
    # the trace functional is a left null vector: column sums vanish
    assert np.allclose(A.sum(axis=0), 0, atol=1e-12)


def test_eigenvectors_are_biorthogonal():
    es = eigendecompose_sector(build_sector_block(ModelParams(two_s=6), 1), want_vectors=True)
    G = es.left.conj().T @ es.right
    assert np.allclose(np.diag(G), 1)
    A = build_sector_block(ModelParams(two_s=6), 1).to_dense()
    assert np.allclose(A @ es.right, es.right * es.eigenvalues, atol=1e-10)


def test_steady_index_and_gap():
    params = ModelParams(two_s=10)
    spec = full_spectrum(params)
    i = spec.steady_index()
    assert abs(spec.eigenvalues[i]) < 1e-10 and spec.q[i] == 0
    gap = spectral_gap(spec)
    rest = np.delete(spec.eigenvalues, i)
    assert gap == pytest.approx(np.min(-rest.real))
    assert gap > 0


def test_missing_steady_state_is_reported():
    spec = full_spectrum(ModelParams(two_s=4), q_list=[1, 2])
    with pytest.raises(SteadyStateNotFound):
        spec.steady_index()


@pytest.mark.parametrize("p", [-0.7, 0.0, 0.35, 0.9])
def test_steady_populations_match_nullspace(p):
    params = ModelParams(two_s=7, p=p)
    assert np.allclose(steady_populations(params), steady_populations_nullspace(params), atol=1e-10)


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("LIOUV_THREADS", "2")
    assert max_workers() == 2
    a = full_spectrum(ModelParams(two_s=8)).eigenvalues
    monkeypatch.setenv("LIOUV_THREADS", "1")
    b = full_spectrum(ModelParams(two_s=8)).eigenvalues
    assert np.array_equal(a, b)
