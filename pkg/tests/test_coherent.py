import numpy as np
import pytest
from hypothesis import given, strategies as st

from collspin import coherent
from collspin.coherent import (
    CoeffPolynomial, DegreeClosureError, apply_diffop, build_diffop_matrix, poly_to_rho,
    rho_to_poly, trace_functional,
)
from collspin.ed import build_sector_block
from collspin.model import ModelParams, coeff_c_vector

params_st = st.builds(
    ModelParams,
    h=st.floats(-2, 2), gamma=st.floats(0.05, 2), gamma0=st.floats(0, 1),
    p=st.floats(-1, 1), two_s=st.integers(1, 12),
)


def _similar_block(params, q):
    c = coeff_c_vector(q, params.two_s)
    return np.diag(c) @ build_sector_block(params, q).to_dense() @ np.diag(1 / c)


@given(params_st, st.data())
def test_diffop_is_similar_to_the_sector_block(params, data):
    q = data.draw(st.integers(-params.two_s, params.two_s))
    M = build_diffop_matrix(params, q)
    ref = _similar_block(params, q)
    assert np.abs(M - ref).max() < 1e-10 * max(1.0, np.abs(ref).max())


@given(params_st, st.data())
def test_polynomial_action_equals_matrix_action(params, data):
    q = data.draw(st.integers(-params.two_s, params.two_s))
    n = params.two_s - abs(q) + 1
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    f = rng.normal(size=n) + 1j * rng.normal(size=n)
    out = apply_diffop(params, q, CoeffPolynomial(q, f, params.two_s))
    assert np.allclose(out.coeffs, build_diffop_matrix(params, q) @ f, atol=1e-10)


@given(st.integers(1, 15), st.data())
def test_representation_round_trip(two_s, data):
    q = data.draw(st.integers(-two_s, two_s))
    v = np.arange(1, two_s - abs(q) + 2) * (1 + 0.5j)
    back = poly_to_rho(rho_to_poly(v, q, two_s))
    assert np.allclose(back, v, rtol=1e-13)


def test_eigenvector_becomes_eigenpolynomial():
    params = ModelParams(two_s=8, p=0.6)
    q = 2
    A = build_sector_block(params, q).to_dense()
    w, V = np.linalg.eig(A)
    poly = rho_to_poly(V[:, 0], q, params.two_s)
    image = apply_diffop(params, q, poly)
    assert np.allclose(image.coeffs, w[0] * poly.coeffs, atol=1e-10)


def test_trace_functional():
    two_s = 4
    rho = np.diag([0.1, 0.2, 0.3, 0.25, 0.15])
    v = np.diag(rho).astype(complex)
    assert trace_functional(rho_to_poly(v, 0, two_s)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        trace_functional(rho_to_poly(np.ones(4), 1, two_s))


def test_trace_is_conserved_by_the_diffop():
    params = ModelParams(two_s=6, p=-0.2)
    rng = np.random.default_rng(3)
    poly = CoeffPolynomial(0, rng.normal(size=7) + 0j, 6)
    assert abs(trace_functional(apply_diffop(params, 0, poly))) < 1e-12


def test_shape_checks():
    with pytest.raises(ValueError):
        CoeffPolynomial(1, np.ones(5), 4)
    with pytest.raises(ValueError):
        rho_to_poly(np.ones(3), 0, 4)
    with pytest.raises(ValueError):
        apply_diffop(ModelParams(two_s=4), 1, CoeffPolynomial(0, np.ones(5), 4))


def test_roots_of_coefficient_polynomial():
    poly = CoeffPolynomial(0, np.array([2, -3, 1], dtype=complex), 2)
    assert np.allclose(np.sort(poly.roots().real), [1, 2])
    assert poly(2.0) == 0


def test_degree_raising_operator_is_rejected(monkeypatch):
    real = coherent.p_coefficients

    def broken(name, x, params):
        c = real(name, x, params)
        return np.append(c, 1.0) if name == "P2" else c

    monkeypatch.setattr(coherent, "p_coefficients", broken)
    params = ModelParams(two_s=4)
    with pytest.raises(DegreeClosureError):
        build_diffop_matrix(params, 0)
    with pytest.raises(DegreeClosureError):
        apply_diffop(params, 0, CoeffPolynomial(0, np.ones(5, dtype=complex), 4))
