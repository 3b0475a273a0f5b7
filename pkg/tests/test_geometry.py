"""Geometry-layer unit tests: distance, translations, convolution."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hankelheat import (
    DomainError,
    GPoint,
    KernelField,
    Order,
    ball_indicator,
    build_plane_grid,
    distance,
    g_convolve,
    g_heat_kernel,
    group_norm,
    involution,
    left_translate,
    load_field,
    modular,
    radial_integrate,
    radial_integrate_plane,
    right_translate,
    save_field,
    weighted_ball_bound,
)

pts = st.tuples(st.floats(min_value=0.0, max_value=5.0),
                st.floats(min_value=-3.0, max_value=3.0))


def test_gpoint_validation():
    with pytest.raises(DomainError):
        GPoint(-0.1, 0.0)


@given(pts)
@settings(max_examples=100, deadline=None)
def test_involution_is_involutive_and_isometric(p):
    p = GPoint(*p)
    q = involution(involution(p))
    assert q.x == pytest.approx(p.x, rel=1e-12, abs=1e-12)
    assert q.u == pytest.approx(p.u)
    assert group_norm(involution(p)) == pytest.approx(group_norm(p),
                                                      rel=1e-9, abs=1e-9)


@given(pts)
@settings(max_examples=100, deadline=None)
def test_modular_is_multiplicative_under_involution(p):
    p = GPoint(*p)
    order = Order(1.8)
    assert modular(order, p) * modular(order, involution(p)) == \
        pytest.approx(1.0, rel=1e-12)


@given(pts, pts, pts)
@settings(max_examples=100, deadline=None)
def test_distance_metric_properties(a, b, c):
    a, b, c = GPoint(*a), GPoint(*b), GPoint(*c)
    assert distance(a, a) == pytest.approx(0.0, abs=1e-7)
    assert distance(a, b) == pytest.approx(distance(b, a), rel=1e-12)
    assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9


def test_ball_volume_order_one_closed_form():
    order = Order(1.0)
    for r in (0.5, 1.0, 2.0):
        vol = radial_integrate(order,
                               lambda s: np.where(s <= r, 1.0, 0.0),
                               r_max=r)
        assert vol == pytest.approx(math.pi * (math.cosh(r) - 1.0),
                                    abs=1e-8)


def test_plane_radial_integral_agrees_with_both_haar_measures():
    order = Order(2.0)
    plane = build_plane_grid(2.0, 25.0, 340, 9.0, 140)
    exact = radial_integrate(order, lambda r: np.exp(-r * r))
    for haar in ("left", "right"):
        val = radial_integrate_plane(order, lambda r: np.exp(-r * r),
                                     plane, haar=haar)
        assert val == pytest.approx(exact, rel=1e-4)
    with pytest.raises(DomainError):
        radial_integrate_plane(order, lambda r: r, plane, haar="middle")


def test_ball_indicator_counts_mass_like_the_radial_formula():
    order = Order(1.5)
    plane = build_plane_grid(1.5, 12.0, 260, 4.0, 100)
    ind = ball_indicator(order, 1.5, plane)
    direct = plane.integrate(ind.values)
    exact = radial_integrate(order,
                             lambda s: np.where(s <= 1.5, 1.0, 0.0),
                             r_max=1.5)
    # right Haar integral of the indicator is the radial ball volume
    assert direct == pytest.approx(exact, rel=2e-2)
    with pytest.raises(DomainError):
        ball_indicator(order, -1.0, plane)


def test_kernel_field_validation():
    plane = build_plane_grid(2.0, 5.0, 60, 2.0, 24)
    with pytest.raises(DomainError):
        KernelField(plane, np.zeros((3, 3)), Order(2.0))
    bad = np.zeros(plane.shape())
    bad[0, 0] = np.nan
    with pytest.raises(DomainError):
        KernelField(plane, bad, Order(2.0))


def _test_field(nu=2.0):
    plane = build_plane_grid(nu, 10.0, 200, 6.0, 90)
    x, u = plane.mesh()
    vals = np.exp(-x * x - 2.0 * u * u) * np.broadcast_to(
        np.ones_like(x), plane.shape())
    return KernelField(plane, np.exp(-x * x - 2.0 * u * u)
                       * np.ones(plane.shape()), Order(nu))


def test_identity_translations_do_nothing():
    f = _test_field()
    order = f.order
    e = GPoint(0.0, 0.0)
    for op in (left_translate, right_translate):
        out = op(order, e, f)
        assert np.max(np.abs(out.values - f.values)) < 1e-10


def test_translation_norm_bounds():
    f = _test_field()
    order = f.order
    plane = f.plane
    base = plane.norm_l1(f.values)
    for p in (GPoint(0.7, 0.4), GPoint(1.2, -0.6)):
        r = right_translate(order, p, f)
        assert plane.norm_l1(r.values) <= base * (1.0 + 5e-3)
        l = left_translate(order, p, f)
        assert plane.norm_l1(l.values) <= \
            modular(order, p) * base * (1.0 + 5e-3)


def test_convolution_mass_is_product_of_masses():
    order = Order(2.0)
    plane = build_plane_grid(2.0, 40.0, 160, 8.0, 70, x_layout="geometric")
    k = g_heat_kernel(order, 0.5, plane)
    conv = g_convolve(order, k, k, n_omega=24, n_v=120)
    m = plane.integrate(k.values)
    assert plane.integrate(conv.values) == pytest.approx(m * m, abs=2e-2)
    # Young: the L1 norm of a convolution is at most the product
    assert plane.norm_l1(conv.values) <= m * m * (1.0 + 1e-6)


def test_convolve_requires_matching_grids():
    order = Order(2.0)
    p1 = build_plane_grid(2.0, 5.0, 60, 2.0, 24)
    p2 = build_plane_grid(2.0, 5.0, 72, 2.0, 24)
    f1 = KernelField(p1, np.zeros(p1.shape()), order)
    f2 = KernelField(p2, np.zeros(p2.shape()), order)
    with pytest.raises(DomainError):
        g_convolve(order, f1, f2)


def test_weighted_ball_bound_rejects_signed_profiles():
    order = Order(2.0)
    plane = build_plane_grid(2.0, 8.0, 100, 3.0, 40)
    with pytest.raises(DomainError):
        weighted_ball_bound(order, lambda r: r - 1.0, plane)


def test_field_save_load_roundtrip(tmp_path):
    f = _test_field()
    path = tmp_path / "field.csv"
    save_field(f, path)
    back = load_field(path)
    assert back.plane.shape() == f.plane.shape()
    assert np.array_equal(back.values, f.values)
    assert np.allclose(back.plane.x_grid.nodes, f.plane.x_grid.nodes)
