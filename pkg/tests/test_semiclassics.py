import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from collspin.ed import build_sector_block, eigendecompose_sector
from collspin.model import SECTOR_SIGN, ModelParams, poly_P
from collspin.semiclassics import (
    REGIONS, Contour, ContourError, DegenerateCurveError, DensityGrid, DomainError, PoleError,
    QuantizationError, classify_region, contour_integral, contour_integral_g0, cumulative_density,
    cut_fraction, density, density_grid, discriminant_parts, discriminant_quartic, g0_branches,
    integrated_density, match_levels, quantize_lambda, quantized_levels, quartic_branch_points,
    region_interval, root_fraction, spectral_edges,
)

from oracles import density_from_counting

FIG = ModelParams()
P0 = ModelParams(p=0.0)

x_st = st.floats(0.02, 0.95)
p_st = st.sampled_from([-0.6, -0.2, 0.3, 0.9])


def _abc(z, lam, x, params):
    """Riccati coefficients straight from the coefficient polynomials."""
    A = 4 * (1 - x) ** 2 * poly_P("P2", z, x, params)
    B = 2 * (1 - x) * poly_P("P10", z, x, params)
    # Im(Lambda)/s = 2 h x removes the constant imaginary term of P00
    C = poly_P("P00", z, x, params) - 2j * SECTOR_SIGN * params.h * x - lam
    return A, B, C


@given(x_st, p_st, st.floats(-1, 0), st.floats(-4, 4), st.floats(-4, 4))
def test_quartic_is_the_scaled_discriminant(x, p, lam, zr, zi):
    params = ModelParams(p=p)
    z = complex(zr, zi)
    A, B, C = _abc(z, lam, x, params)
    lead = (params.gamma * (1 - p) / 2) ** 2
    W = np.polynomial.polynomial.polyval(z, discriminant_quartic(lam, x, params))
    disc = B * B - 4 * A * C
    assert abs(disc - 4 * (1 - x) ** 2 * lead * W) <= 1e-10 * (1 + abs(disc))
    Wa, Wb = discriminant_parts(x, params)
    assert Wa[-1] == pytest.approx(1.0) and Wb[-1] == 0


@given(x_st, p_st, st.floats(-1, 0), st.floats(-3, 3), st.floats(0.1, 3))
def test_g0_solves_the_riccati_quadratic(x, p, lam, zr, zi):
    params = ModelParams(p=p)
    z = complex(zr, zi)
    A, B, C = _abc(z, lam, x, params)
    for g in g0_branches(z, lam, x, params):
        assert abs(A * g * g + B * g + C) <= 1e-9 * (abs(A * g * g) + abs(B * g) + abs(C))


def test_g0_poles_and_degenerate_sector():
    with pytest.raises(PoleError):
        g0_branches(0.0, -0.3, 0.2, FIG)
    with pytest.raises(DegenerateCurveError):
        g0_branches(0.5, -0.3, 1.0, FIG)


@given(x_st, p_st, st.floats(-1.2, 0.2))
def test_branch_points_are_roots(x, p, lam):
    params = ModelParams(p=p)
    bp = quartic_branch_points(lam, x, params)
    W = discriminant_quartic(lam, x, params)
    ref = np.roots(W[::-1])
    assert len(bp.roots) == 4
    for r in bp.roots:
        assert np.min(np.abs(ref - r)) < 1e-5 * max(1, abs(r))
    assert np.all(np.diff(bp.real) >= 0)
    assert np.allclose(bp.complex[: len(bp.complex) // 2], np.conj(bp.complex[len(bp.complex) // 2:]))


def test_pinned_branch_points():
    bp = quartic_branch_points(-0.3, 0.0, FIG)
    assert 1.0 in bp.real and (1 + 0.9) / (1 - 0.9) in bp.real
    bp = quartic_branch_points(-0.3, 0.4, P0)
    assert np.count_nonzero(bp.real == 1.0) == 2


@given(st.floats(0, 0.98), p_st)
def test_edges_ascend_and_labels_match_the_classifier(x, p):
    params = ModelParams(p=p)
    edges = spectral_edges(x, params)
    lams = [e[0] for e in edges]
    assert lams == sorted(lams)
    assert edges[0][1] == "outside" and edges[-1][2] == "outside"
    for (a, _, above), (b, below, _) in zip(edges[:-1], edges[1:]):
        assert above == below
        if b - a > 1e-6:
            assert classify_region(0.5 * (a + b), x, params) == above
    pad = 1e-3
    assert classify_region(lams[0] - pad, x, params) == "outside"
    assert classify_region(lams[-1] + pad, x, params) == "outside"


def test_known_edges():
    # x = 0 at p = 0.9: spectrum reaches the steady state at lam = 0
    top = spectral_edges(0.0, FIG)[-1]
    assert top == (0.0, "I", "outside")
    # p = 0: the top edge is -gamma0 x^2 and region I is absent
    for x in (0.2, 0.5):
        edges = spectral_edges(x, P0)
        assert edges[-1][0] == pytest.approx(-0.2 * x * x)
        assert all("I" not in (b, a) for _, b, a in edges)
        assert region_interval(x, P0, "I") is None
    # x = 1: one state at -gamma0
    assert spectral_edges(1.0, FIG) == [(-0.2, "outside", "II"), (-0.2, "II", "outside")]


def test_p0_top_edge_is_where_the_arc_is_full():
    for x in (0.2, 0.5):
        lam = -0.2 * x * x
        assert root_fraction(lam - 1e-7, x, P0, "II") == pytest.approx(1.0, abs=1e-3)


def test_region_names():
    assert set(REGIONS) == {"I", "II", "outside"}
    with pytest.raises(ValueError):
        region_interval(0.3, FIG, "III")
    with pytest.raises(ValueError):
        classify_region(-0.3, 1.5, FIG)


def test_contour_integral_of_simple_pole():
    val = contour_integral(lambda z: 1 / (z - 0.3), Contour.circle(0.0, 1.0))
    assert val == pytest.approx(2j * math.pi)


def test_loop_around_a_cut_counts_its_roots():
    x, lam = 0.2, -0.25
    r = quartic_branch_points(lam, x, FIG).real
    loop = contour_integral_g0(lam, x, FIG, Contour.ellipse(r[0], r[1], 0.02)) / (2j * math.pi)
    assert abs(loop) == pytest.approx(cut_fraction(lam, x, FIG, r[0], r[1]), rel=1e-8)
    with pytest.raises(ContourError):
        contour_integral_g0(lam, x, FIG, Contour.circle(r[0], 0.01))


@given(st.floats(0.05, 0.6), p_st)
def test_region_one_cuts_carry_equal_fractions(x, p):
    params = ModelParams(p=p)
    iv = region_interval(x, params, "I")
    if iv is None:
        return
    lam = 0.5 * (iv[0] + iv[1])
    r = quartic_branch_points(lam, x, params).real
    assert cut_fraction(lam, x, params, r[0], r[1]) == pytest.approx(
        cut_fraction(lam, x, params, r[2], r[3]), rel=1e-8)


@given(st.floats(0.05, 0.9), p_st)
def test_region_two_arc_and_real_cut_share_all_roots(x, p):
    params = ModelParams(p=p)
    lo, hi = region_interval(x, params, "II")
    lam = 0.5 * (lo + hi)
    bp = quartic_branch_points(lam, x, params)
    arc = cut_fraction(lam, x, params, bp.complex[0], bp.complex[1], arc=True)
    seg = cut_fraction(lam, x, params, *bp.real)
    assert arc + seg == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("x", [0.1, 0.4])
def test_counting_is_continuous_across_the_region_boundary(x):
    lo, hi = region_interval(x, FIG, "II")
    top_ii = root_fraction(hi - 1e-9, x, FIG, "II")
    bottom_i = root_fraction(hi + 1e-9, x, FIG, "I")
    assert 2 * bottom_i == pytest.approx(1 - top_ii, abs=1e-4)


@pytest.mark.parametrize("p", [0.9, 0.3, 0.05, 0.0, -0.5])
@pytest.mark.parametrize("x", [0.0, 0.15, 0.5, 0.85])
def test_density_integrates_to_one_minus_x(p, x):
    params = ModelParams(p=p)
    assert integrated_density(x, params) == pytest.approx(1 - x, rel=5e-3)


@pytest.mark.parametrize("x,lam", [(0.2, -0.25), (0.2, -0.6), (0.5, -0.5), (0.1, -0.2), (0.7, -0.4)])
def test_density_matches_derivative_of_root_count(x, lam):
    region = classify_region(lam, x, FIG)
    assert density(lam, x, FIG).region == region
    assert density(lam, x, FIG).value == pytest.approx(density_from_counting(lam, x, FIG, region), rel=1e-5)


def test_density_square_root_law_at_p0():
    for lam in (-1e-3, -1e-6, -1e-9):
        d = density(lam, 0.0, P0).value
        assert d == pytest.approx(1 / (2 * math.sqrt(1.2 * abs(lam))), rel=1e-6)


def test_density_outside_raises():
    with pytest.raises(DomainError):
        density(0.5, 0.3, FIG)
    with pytest.raises(DomainError):
        density(-5.0, 0.3, FIG)
    with pytest.raises(DegenerateCurveError):
        density(-0.3, 0.3, ModelParams(p=1.0))


def test_cumulative_density_is_monotone_and_complete():
    x = 0.3
    edges = spectral_edges(x, FIG)
    lam = np.linspace(edges[0][0] - 0.1, edges[-1][0] + 0.1, 200)
    cdf = cumulative_density(x, FIG, lam)
    assert np.all(np.diff(cdf) >= -1e-12)
    assert cdf[0] == 0.0
    assert cdf[-1] == pytest.approx(1 - x, rel=5e-3)


def test_density_grid():
    g = density_grid(FIG, [0.1, 0.5], np.linspace(-1, 0.1, 12))
    assert g.values.shape == (2, 12)
    assert g.values[0, -1] == 0 and g.regions[0, -1] == "outside"
    assert set(np.unique(g.regions)) <= set(REGIONS)
    with pytest.raises(ValueError):
        DensityGrid(np.zeros(2), np.zeros(3), -np.ones((2, 3)), np.empty((2, 3), dtype=object))


def test_quantization_endpoints_and_limits():
    x = 5 / 34
    lo, hi = region_interval(x, FIG, "II")
    assert quantize_lambda(0, x, FIG, "II") == lo
    assert quantize_lambda(0, x, FIG, "I") == region_interval(x, FIG, "I")[1]
    with pytest.raises(QuantizationError):
        quantize_lambda(10_000, x, FIG, "II")
    with pytest.raises(QuantizationError):
        quantize_lambda(-1, x, FIG, "II")
    with pytest.raises(QuantizationError):
        quantize_lambda(1, 0.9, FIG, "I")


def test_quantized_levels_account_for_almost_every_state():
    params = ModelParams(two_s=100)
    q = 5
    levels = quantized_levels(q, params)
    total = sum(lev.multiplicity for lev in levels)
    assert params.two_s - q + 1 - total in (0, 1)
    ed = eigendecompose_sector(build_sector_block(params, q)).eigenvalues.real / params.s
    pairs = match_levels(levels, ed)
    assert max(abs(lev.lam - e) for lev, e in pairs) < 0.02
    # each exact eigenvalue is used at most once
    used = [e for _, e in pairs]
    assert len(used) == len(set(used))
