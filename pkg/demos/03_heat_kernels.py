#!/usr/bin/env python3
"""Heat kernels on the half line and on the solvable extension.

On the half line the heat kernel is gaussian with an explicit formula.
On the extension it is built by subordination: the kernel at time t is
an integral of half-line heat kernels weighted in the height variable.
At nu = 2 the extension kernel also has a closed form, which gives an
independent end-to-end check of the whole construction:

    K_t(x, u) = 2 pi e^{-u} (4 pi t)^{-3/2} (rho / sinh rho)
                * exp(-rho^2 / 4t),
    cosh rho  = cosh u + x^2 / (2 e^u).

The script prints half-line masses, compares the nu = 2 extension
kernel to the closed form, and shows the mass of the extension kernel
against right Haar measure for a range of orders.
"""

import math

import numpy as np

from hankelheat import (
    Order,
    bessel_heat_kernel,
    build_grid,
    build_plane_grid,
    g_heat_kernel,
)


def main():
    print("half-line heat kernel mass (should be 1)")
    for nu in (1.0, 1.5, 2.0, 3.0):
        order = Order(nu)
        grid = build_grid(nu, 20.0, 400)
        k = bessel_heat_kernel(order, 0.8, grid)
        print("  nu = %-4g  mass = %.12f" % (nu, grid.integrate(k.values)))

    # nu = 2 closed form
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
    print("\nnu = 2 extension kernel vs closed form: rel error %.3e" % rel)

    print("\nextension kernel mass against right Haar (should be 1)")
    for nu in (1.0, 2.0, 3.0):
        order = Order(nu)
        plane = build_plane_grid(nu, 3000.0, 500, 12.0, 120,
                                 x_layout="geometric")
        k = g_heat_kernel(order, 0.5, plane)
        print("  nu = %-4g  mass = %.8f" % (nu, plane.integrate(k.values)))


if __name__ == "__main__":
    main()
