"""Subordination weight, lifted heat kernel, and multiplier unit tests."""

import math

import numpy as np
import pytest

from hankelheat import (
    DomainError,
    ExpMixMultiplier,
    NonConvergent,
    Order,
    T_MIN,
    build_plane_grid,
    estimate_plancherel,
    g_heat_kernel,
    m_function,
    multiplier_kernel,
    project_to_expmix,
    psi_eval,
)
from hankelheat.calculus import get_psi_weight


def test_small_time_floor_is_enforced():
    with pytest.raises(NonConvergent):
        get_psi_weight(0.5 * T_MIN)
    # the documented override lifts the floor
    assert get_psi_weight(0.5 * T_MIN, allow_small_t=True) is not None


def test_psi_weight_reproduces_subordination_mass():
    # int M_t(0, u) du = 1: the u-marginal of the lifted heat kernel
    for t in (0.5, 1.0, 4.0):
        u = np.linspace(-30.0 - 3.0 * t, 30.0 + 3.0 * t, 1200)
        vals = m_function(t, u, np.zeros_like(u))
        mass = np.trapezoid(vals, u)
        assert mass == pytest.approx(1.0, abs=1e-7), t


def test_psi_eval_positive_where_it_matters():
    vals = [psi_eval(1.0, xi) for xi in np.geomspace(1e-2, 1e3, 25)]
    assert np.all(np.isfinite(vals))
    assert np.max(vals) > 0.0
    with pytest.raises(DomainError):
        psi_eval(1.0, -1.0)


def test_m_function_monotone_in_spectral_variable():
    lam = np.array([0.0, 0.5, 1.0, 2.0, 8.0])
    vals = m_function(1.0, 0.3, lam)
    assert np.all(np.diff(vals) < 0.0)


def test_exact_heat_kernel_order_two():
    # closed form at nu = 2:
    #   K_t(x, u) = 2 pi e^{-u} (4 pi t)^{-3/2} (rho/sinh rho) e^{-rho^2/4t}
    # with cosh rho = cosh u + x^2 / (2 e^u)
    order = Order(2.0)
    t = 1.0
    plane = build_plane_grid(2.0, 10.0, 160, 4.0, 60)
    k = g_heat_kernel(order, t, plane)
    x, u = plane.mesh()
    arg = np.cosh(u) + x * x / (2.0 * np.exp(u))
    rho = np.arccosh(np.maximum(arg, 1.0))
    ratio = np.where(rho == 0.0, 1.0, rho / np.sinh(np.maximum(rho, 1e-300)))
    exact = (2.0 * math.pi * np.exp(-u) * (4.0 * math.pi * t) ** -1.5
             * ratio * np.exp(-rho * rho / (4.0 * t)))
    exact = exact * np.ones(plane.shape())
    rel = np.max(np.abs(k.values - exact)) / np.max(exact)
    assert rel < 1e-8


def test_expmix_validation_and_evaluation():
    with pytest.raises(DomainError):
        ExpMixMultiplier(terms=((1.0, -0.5),))
    with pytest.raises(DomainError):
        ExpMixMultiplier(terms=((1.0, 0.5), (2.0, 0.5)))
    F = ExpMixMultiplier(terms=((2.0, 1.0), (-1.0, 2.0)))
    lam = np.array([0.0, 1.0])
    assert F(lam)[0] == pytest.approx(1.0)
    assert F(lam)[1] == pytest.approx(2.0 * math.e ** -1 - math.e ** -2)


def test_project_to_expmix_recovers_exponential():
    lam = np.geomspace(1e-3, 20.0, 300)
    target = np.exp(-0.9 * lam)
    mix = project_to_expmix(lam, target, n_terms=6, t_range=(0.1, 4.0))
    assert mix.residual < 1e-3
    assert np.max(np.abs(mix(lam) - target)) < 5e-3


def test_multiplier_kernel_via_validation():
    order = Order(2.0)
    plane = build_plane_grid(2.0, 5.0, 60, 2.0, 24)
    F = ExpMixMultiplier(terms=((1.0, 1.0),))
    with pytest.raises(DomainError):
        multiplier_kernel(order, F, plane, via="magic")


def test_plancherel_density_order_two_is_flat():
    # at nu = 2 the exact spectral density is proportional to lam^{1/2}
    # for every lam, so the dyadic ratio curve is constant
    est = estimate_plancherel(Order(2.0),
                              band_centers=2.0 ** np.arange(1, 5),
                              n_y=220)
    assert np.max(est.ratio) / np.min(est.ratio) < 1.01
    assert np.allclose(est.ratio, 1.0 / (2.0 * math.pi), rtol=1e-2)
