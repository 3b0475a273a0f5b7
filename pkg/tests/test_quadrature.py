"""Quadrature-layer unit tests against closed-form integrals."""

import math

import numpy as np
import pytest

from hankelheat import (
    DomainError,
    QuadratureSpec,
    build_grid,
    build_plane_grid,
    integrate_halfline,
    integrate_oscillatory,
)
from hankelheat.quadrature import log_panel_rule, panel_rule


@pytest.mark.parametrize("layout", ["uniform", "geometric", "composite"])
@pytest.mark.parametrize("nu", [1.0, 1.5, 2.7])
def test_grid_integrates_gaussian(nu, layout):
    grid = build_grid(nu, 14.0, 400, layout=layout)
    exact = 0.5 * math.gamma(nu / 2.0)  # int_0^inf e^{-x^2} x^{nu-1} dx
    assert grid.integrate(np.exp(-grid.nodes ** 2)) == pytest.approx(
        exact, rel=1e-10)


def test_grid_integrates_monomials_exactly():
    nu = 2.5
    grid = build_grid(nu, 3.0, 240)
    for k in (0, 1, 2, 5):
        exact = 3.0 ** (k + nu) / (k + nu)
        val = grid.integrate(grid.nodes ** k)
        assert val == pytest.approx(exact, rel=1e-12)


def test_grid_validation():
    with pytest.raises(DomainError):
        build_grid(0.5, 10.0, 100)
    with pytest.raises(DomainError):
        build_grid(2.0, 10.0, 100, layout="spiral")


def test_plane_grid_shapes_and_separable_integral():
    plane = build_plane_grid(2.0, 10.0, 150, 3.0, 48)
    assert plane.shape() == (len(plane.x_grid.nodes), len(plane.u_nodes))
    x, u = plane.mesh()
    vals = np.exp(-x * x) * np.exp(-u * u)
    exact_x = 0.5 * math.gamma(1.0)
    exact_u = math.sqrt(math.pi) * math.erf(3.0)
    assert plane.integrate(vals) == pytest.approx(exact_x * exact_u,
                                                  rel=1e-9)


def test_plane_grid_validation():
    with pytest.raises(DomainError):
        build_plane_grid(2.0, 10.0, 100, -1.0, 48)
    with pytest.raises(DomainError):
        build_plane_grid(2.0, 10.0, 100, 3.0, 4)


def test_panel_rules():
    n, w = panel_rule(1.0, 3.0, 12)
    assert np.sum(w * np.exp(n)) == pytest.approx(math.e ** 3 - math.e,
                                                  rel=1e-14)
    n, w = log_panel_rule(1e-3, 1e3, 40)
    assert np.sum(w / n) == pytest.approx(math.log(1e6), rel=1e-12)


def test_integrate_halfline_gaussian_and_validation():
    res = integrate_halfline(lambda x: math.exp(-x * x), 3.0)
    assert res.value == pytest.approx(0.5 * math.gamma(1.5), rel=1e-9)
    with pytest.raises(DomainError):
        integrate_halfline(lambda x: 1.0, 0.5)


def test_integrate_oscillatory_dirichlet():
    # int_0^inf sin(omega x)/x dx = pi/2 for every omega > 0
    for omega in (1.0, 3.5):
        res = integrate_oscillatory(lambda x: 1.0 / np.maximum(x, 1e-300),
                                    omega)
        assert res.value == pytest.approx(math.pi / 2.0, abs=1e-6)
    with pytest.raises(DomainError):
        integrate_oscillatory(lambda x: x, 0.0)


def test_integrate_oscillatory_finite_domain():
    # int_0^pi sin(x) dx = 2
    res = integrate_oscillatory(lambda x: np.ones_like(x), 1.0,
                                domain=(0.0, math.pi))
    assert res.value == pytest.approx(2.0, rel=1e-12)


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(abs_tol=-1.0)
