import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from collspin.model import (
    P_NAMES, SECTOR_SIGN, ModelParams, ParameterError, Sector, coeff_c, coeff_c_vector,
    p_coefficients, poly_P, validate_params,
)


def test_defaults():
    p = ModelParams()
    assert (p.h, p.gamma, p.gamma0, p.p, p.two_s) == (1.0, 1.2, 0.2, 0.9, 34)
    assert p.s == 17 and p.dim == 35
    assert p.z_p == pytest.approx(0.1 / 1.9)


@pytest.mark.parametrize("field,kw", [
    ("p", {"p": 1.5}),
    ("p", {"p": -1.0001}),
    ("gamma", {"gamma": -0.1}),
    ("gamma0", {"gamma0": -1}),
    ("h", {"h": math.nan}),
    ("two_s", {"two_s": 0}),
    ("two_s", {"two_s": 2.5}),
])
def test_invalid_parameters_name_the_field(field, kw):
    with pytest.raises(ParameterError) as info:
        ModelParams(**kw)
    assert info.value.field == field


def test_validate_params_accepts_half_integer_s():
    assert validate_params({"s": 2.5}).two_s == 5
    with pytest.raises(ParameterError) as info:
        validate_params({"s": 2.3})
    assert info.value.field == "s"
    with pytest.raises(ParameterError) as info:
        validate_params({"temperature": 1})
    assert info.value.field == "temperature"


def test_rates_follow_the_normalization():
    p = ModelParams(gamma=1.2, gamma0=0.2, p=0.5, two_s=10)
    assert p.rate_z == pytest.approx(0.02)
    assert p.rate_up == pytest.approx(1.2 * 0.5 / 20)
    assert p.rate_down == pytest.approx(1.2 * 1.5 / 20)


def test_z_p_at_the_ends():
    assert ModelParams(p=1.0).z_p == 0
    assert ModelParams(p=-1.0).z_p == math.inf


def test_sector_geometry():
    sec = Sector(-3, 8)
    assert sec.dim == 6 and sec.x == 3 / 8
    a, b = sec.element(0)
    assert a - b == -3
    with pytest.raises(IndexError):
        Sector(9, 8)
    with pytest.raises(IndexError):
        sec.element(6)


@given(st.integers(1, 12), st.data())
def test_flat_indices_select_the_sector(two_s, data):
    q = data.draw(st.integers(-two_s, two_s))
    sec = Sector(q, two_s)
    d = two_s + 1
    rows, cols = np.divmod(sec.flat_indices(), d)
    assert np.all(rows - cols == q)
    assert len(set(sec.flat_indices())) == sec.dim


def test_coeff_c_small_case():
    # two_s = 2, q = 0: sqrt(C(2, k) / C(2, k)) ... reduces to 1 for every kappa
    assert np.allclose(coeff_c_vector(0, 2), 1.0)
    # q = two_s has a single weight equal to one
    assert coeff_c(4, 0, 4) == pytest.approx(1.0)


@given(st.integers(1, 40), st.data())
def test_coeff_c_positive_and_symmetric_in_sign(two_s, data):
    q = data.draw(st.integers(-two_s, two_s))
    c = coeff_c_vector(q, two_s)
    assert np.all(c > 0) and np.all(np.isfinite(c))
    assert np.array_equal(c, coeff_c_vector(-q, two_s))


@given(st.floats(0, 1), st.floats(-0.99, 0.99), st.floats(-3, 3), st.floats(-3, 3))
def test_coefficient_arrays_match_pointwise_polynomials(x, p, zr, zi):
    params = ModelParams(p=p, h=0.7, gamma=1.3, gamma0=0.4)
    z = complex(zr, zi)
    for name in P_NAMES:
        c = p_coefficients(name, x, params)
        direct = poly_P(name, z, x, params)
        assert abs(np.polynomial.polynomial.polyval(z, c) - direct) <= 1e-12 * (1 + abs(direct))


def test_sector_sign_convention():
    assert SECTOR_SIGN in (1, -1)
    params = ModelParams()
    assert p_coefficients("P00", 0.5, params)[0].imag == pytest.approx(SECTOR_SIGN * params.h)


def test_unknown_polynomial_name():
    with pytest.raises(ValueError):
        poly_P("P3", 0.0, 0.1, ModelParams())
