"""Half-line transform, translation, and convolution unit tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hankelheat import (
    DeltaPair,
    DomainError,
    Order,
    RadialProfile,
    bessel_heat_kernel,
    build_grid,
    delta_convolve,
    hankel_convolve,
    hankel_inverse,
    hankel_transform,
    hankel_translate,
    j_kernel,
    load_profile,
    resample,
    save_profile,
)


def _gaussian(nu, x_max=12.0, n=300):
    grid = build_grid(nu, x_max, n)
    return RadialProfile.from_function(grid, lambda x: np.exp(-x * x),
                                       decay_class="gaussian")


def test_transform_of_gaussian_is_self_dual():
    # H(e^{-x^2/2})(y) = kappa e^{-y^2/2}
    for nu in (1.0, 1.5, 2.0, 3.0):
        order = Order(nu)
        grid = build_grid(nu, 16.0, 400)
        prof = RadialProfile.from_function(
            grid, lambda x: np.exp(-0.5 * x * x), decay_class="gaussian")
        tr = hankel_transform(order, prof)
        exact = order.kappa * np.exp(-0.5 * grid.nodes ** 2)
        assert np.max(np.abs(tr.values - exact)) < 1e-10


def test_translate_order_one_is_symmetric_average():
    order = Order(1.0)
    prof = _gaussian(1.0, n=600)
    x = 0.8
    out = hankel_translate(order, x, prof)
    y = prof.grid.nodes
    exact = 0.5 * (np.exp(-(x + y) ** 2) + np.exp(-(x - y) ** 2))
    # accuracy is limited by the monotone-cubic interpolation of f
    assert np.max(np.abs(out.values - exact)) < 3e-5


@pytest.mark.parametrize("nu", [1.5, 2.0, 3.0])
def test_translate_product_formula(nu):
    # tau_x applied to j(lam .) gives j(lam x) j(lam y)
    order = Order(nu)
    lam = 1.2
    grid = build_grid(nu, 12.0, 500)
    prof = RadialProfile(grid, j_kernel(order, lam * grid.nodes),
                         decay_class="polynomial")
    x = 1.3
    out = hankel_translate(order, x, prof, n_omega=96, tol=1e-3)
    exact = j_kernel(order, lam * x) * j_kernel(order, lam * grid.nodes)
    interior = grid.nodes <= grid.x_max - x
    assert np.max(np.abs(out.values[interior] - exact[interior])) < 1e-4


@pytest.mark.parametrize("nu", [1.0, 2.0, 2.7])
def test_translate_preserves_mass(nu):
    order = Order(nu)
    prof = _gaussian(nu, x_max=16.0, n=500)
    base = prof.grid.integrate(prof.values)
    out = hankel_translate(order, 1.1, prof, tol=1e-4)
    assert prof.grid.integrate(out.values) == pytest.approx(base, rel=1e-5)


def test_translate_validation():
    with pytest.raises(DomainError):
        hankel_translate(Order(2.0), -0.5, _gaussian(2.0))


def test_convolution_is_commutative():
    order = Order(2.0)
    f = _gaussian(2.0)
    g = RadialProfile.from_function(f.grid, lambda x: np.exp(-0.3 * x * x),
                                    decay_class="gaussian")
    fg = hankel_convolve(order, f, g)
    gf = hankel_convolve(order, g, f)
    assert np.max(np.abs(fg.values - gf.values)) < 2e-5


def test_delta_convolve_structure():
    order = Order(2.5)
    pair = DeltaPair(1.2, 0.7)
    meas = delta_convolve(order, pair)
    assert meas.mass() == pytest.approx(1.0, rel=1e-12)
    assert meas.support == (0.5, 1.9)
    # second moment: E[z^2] = x^2 + y^2 (the angular measure is even)
    assert meas.mean_of(lambda z: z * z) == pytest.approx(
        1.2 ** 2 + 0.7 ** 2, rel=1e-10)


def test_delta_convolve_degenerate_cases():
    order = Order(2.0)
    atom = delta_convolve(order, DeltaPair(0.0, 0.9))
    assert atom.atoms == [(0.9, 1.0)]
    two = delta_convolve(Order(1.0), DeltaPair(1.0, 0.4))
    assert sorted(z for z, _ in two.atoms) == [0.6, 1.4]
    with pytest.raises(DomainError):
        DeltaPair(-1.0, 0.5)


@given(st.floats(min_value=0.05, max_value=4.0),
       st.floats(min_value=0.05, max_value=4.0),
       st.floats(min_value=1.0, max_value=4.0))
@settings(max_examples=40, deadline=None)
def test_delta_convolve_mass_and_moment_properties(x, y, nu):
    meas = delta_convolve(Order(nu), DeltaPair(x, y))
    assert meas.mass() == pytest.approx(1.0, rel=1e-9)
    assert meas.mean_of(lambda z: z * z) == pytest.approx(x * x + y * y,
                                                          rel=1e-7)


def test_heat_kernel_positive_with_unit_mass():
    order = Order(2.7)
    grid = build_grid(2.7, 20.0, 500)
    k = bessel_heat_kernel(order, 0.8, grid)
    assert np.all(k.values > 0.0)
    assert grid.integrate(k.values) == pytest.approx(1.0, abs=1e-10)


def test_profile_save_load_roundtrip(tmp_path):
    prof = _gaussian(2.0)
    path = tmp_path / "prof.csv"
    save_profile(prof, path)
    back = load_profile(path)
    assert back.grid.nu == prof.grid.nu
    assert np.array_equal(back.grid.nodes, prof.grid.nodes)
    assert np.array_equal(back.values, prof.values)


def test_resample_preserves_smooth_profiles():
    prof = _gaussian(2.0, x_max=12.0, n=400)
    coarse = build_grid(2.0, 12.0, 150)
    down = resample(prof, coarse)
    exact = np.exp(-coarse.nodes ** 2)
    # monotone-cubic interpolation error on the source grid
    assert np.max(np.abs(down.values - exact)) < 1e-4
