"""Grids and quadrature engines shared by the transform and kernel modules.

Half-line integration is always against the measure x**(nu-1) dx.  Panels
touching x = 0 use Gauss-Jacobi nodes so the weight is handled exactly;
interior panels fold the (there smooth) weight into Gauss-Legendre weights.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy import integrate as sint
from scipy import special as sp

from .errors import DomainError, NonConvergent

__all__ = [
    "QuadratureSpec",
    "HalfLineGrid",
    "PlaneGrid",
    "QuadResult",
    "build_grid",
    "build_plane_grid",
    "integrate_halfline",
    "integrate_oscillatory",
    "log_panel_rule",
    "panel_rule",
]

QuadResult = namedtuple("QuadResult", ["value", "error"])


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 400
    split_oscillations: bool = True

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


class HalfLineGrid:
    """Quadrature grid on [0, x_max] for the measure x**(nu-1) dx.

    nodes are strictly increasing and positive; applying the weights to
    sampled values approximates the weighted integral over [0, x_max].
    """

    __slots__ = ("nodes", "weights", "x_max", "nu")

    def __init__(self, nodes, weights, x_max, nu):
        nodes = np.asarray(nodes, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise DomainError("nodes and weights must be matching 1-d arrays")
        if np.any(np.diff(nodes) <= 0) or nodes[0] < 0 or nodes[-1] > x_max:
            raise DomainError("nodes must be strictly increasing within [0, x_max]")
        if np.any(weights < 0):
            raise DomainError("quadrature weights must be nonnegative")
        self.nodes = nodes
        self.weights = weights
        self.x_max = float(x_max)
        self.nu = float(nu)

    def __len__(self):
        return len(self.nodes)

    def integrate(self, values):
        """Weighted integral of values sampled on the nodes."""
        values = np.asarray(values)
        return np.tensordot(self.weights, values, axes=(0, -1 if values.ndim == 1 else 0)) \
            if values.ndim <= 1 else self.weights @ values

    def integrate_fn(self, f):
        return self.integrate(f(self.nodes))

    def norm_l1(self, values):
        return self.integrate(np.abs(values))

    def norm_l2(self, values):
        return float(np.sqrt(self.integrate(np.abs(values) ** 2).real))


class PlaneGrid:
    """Tensor grid on [0, x_max] x [-u_max, u_max] with right-Haar weights
    (x**(nu-1) dx du)."""

    __slots__ = ("x_grid", "u_nodes", "u_weights", "u_max")

    def __init__(self, x_grid: HalfLineGrid, u_nodes, u_weights, u_max):
        u_nodes = np.asarray(u_nodes, dtype=float)
        u_weights = np.asarray(u_weights, dtype=float)
        if np.any(np.diff(u_nodes) <= 0):
            raise DomainError("u_nodes must be strictly increasing")
        self.x_grid = x_grid
        self.u_nodes = u_nodes
        self.u_weights = u_weights
        self.u_max = float(u_max)

    @property
    def nu(self):
        return self.x_grid.nu

    def shape(self):
        return (len(self.x_grid), len(self.u_nodes))

    def integrate(self, values):
        """values[i, j] sampled at (x_i, u_j); returns the double integral."""
        values = np.asarray(values)
        return float(np.real_if_close(
            self.x_grid.weights @ values @ self.u_weights))

    def norm_l1(self, values):
        return self.integrate(np.abs(values))

    def norm_l2(self, values):
        return float(np.sqrt(self.integrate(np.abs(np.asarray(values)) ** 2)))

    def mesh(self):
        x = self.x_grid.nodes[:, None]
        u = self.u_nodes[None, :]
        return x, u


def _gauss_legendre(p):
    return np.polynomial.legendre.leggauss(p)


def panel_rule(a, b, p):
    """Gauss-Legendre nodes/weights on [a, b] (plain Lebesgue measure)."""
    c, w = _gauss_legendre(p)
    half = 0.5 * (b - a)
    return a + half * (1.0 + c), half * w


def log_panel_rule(lo, hi, n_panels, p=8):
    """Geometric composite Gauss-Legendre rule on [lo, hi], lo > 0."""
    if not (0 < lo < hi):
        raise DomainError("log_panel_rule requires 0 < lo < hi")
    edges = np.geomspace(lo, hi, n_panels + 1)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        n, w = panel_rule(a, b, p)
        nodes.append(n)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def _panel_edges(x_max, n_panels, layout):
    if layout == "uniform":
        return np.linspace(0.0, x_max, n_panels + 1)
    if layout == "geometric":
        # geometric refinement toward 0, spanning ~6 decades
        edges = x_max * np.geomspace(1e-6, 1.0, n_panels)
        return np.concatenate([[0.0], edges])
    if layout == "composite":
        # geometric below min(1, x_max/4), uniform beyond
        knee = min(1.0, x_max / 4.0)
        n_geo = max(4, n_panels // 3)
        n_uni = max(1, n_panels - n_geo)
        geo = knee * np.geomspace(1e-5, 1.0, n_geo)
        uni = np.linspace(knee, x_max, n_uni + 1)[1:]
        return np.concatenate([[0.0], geo, uni])
    raise DomainError(f"unknown layout {layout!r}")


def build_grid(nu, x_max, n_nodes, layout="composite", nodes_per_panel=12):
    """Composite quadrature grid on [0, x_max] for the weight x**(nu-1).

    The panel containing 0 uses Gauss-Jacobi nodes (exact for the weight);
    later panels use Gauss-Legendre with the weight folded in.
    """
    if x_max <= 0 or n_nodes < 8:
        raise DomainError("build_grid requires x_max > 0 and n_nodes >= 8")
    if nu < 1:
        raise DomainError("build_grid requires nu >= 1")
    p = nodes_per_panel
    n_panels = max(1, int(round(n_nodes / p)))
    edges = _panel_edges(float(x_max), n_panels, layout)

    nodes, weights = [], []
    # first panel [0, b]: x = b*(1+c)/2 turns the weight into (1+c)^(nu-1)
    b = edges[1]
    cj, wj = sp.roots_jacobi(p, 0.0, nu - 1.0)
    nodes.append(b * (1.0 + cj) / 2.0)
    weights.append((b / 2.0) ** nu * wj)
    for a, b in zip(edges[1:-1], edges[2:]):
        n, w = panel_rule(a, b, p)
        nodes.append(n)
        weights.append(w * n ** (nu - 1.0))
    return HalfLineGrid(np.concatenate(nodes), np.concatenate(weights), x_max, nu)


def build_plane_grid(nu, x_max, n_x, u_max, n_u, x_layout="composite",
                     nodes_per_panel=12):
    """Tensor grid over [0, x_max] x [-u_max, u_max] with right-Haar weights."""
    if u_max <= 0 or n_u < 8:
        raise DomainError("build_plane_grid requires u_max > 0 and n_u >= 8")
    x_grid = build_grid(nu, x_max, n_x, layout=x_layout,
                        nodes_per_panel=nodes_per_panel)
    p = min(nodes_per_panel, n_u)
    n_panels = max(1, int(round(n_u / p)))
    edges = np.linspace(-u_max, u_max, n_panels + 1)
    un, uw = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        n, w = panel_rule(a, b, p)
        un.append(n)
        uw.append(w)
    return PlaneGrid(x_grid, np.concatenate(un), np.concatenate(uw), u_max)


def _truncation_point(f, nu, abs_tol, decay_class):
    """Pick x_max so the weighted tail of |f| is negligible."""
    x = 1.0
    cap = {"gaussian": 1e3, "exponential": 1e5, "polynomial": 1e8}.get(
        decay_class, 1e8)
    while x < cap:
        probe = np.array([x, 1.5 * x, 2.0 * x])
        vals = np.abs(np.asarray([f(t) for t in probe], dtype=complex))
        env = np.max(vals * probe ** (nu - 1.0) * np.maximum(probe, 1.0))
        if env < abs_tol * 1e-2:
            return 2.0 * x
        x *= 2.0
    return cap


def integrate_halfline(f, nu, spec: QuadratureSpec | None = None,
                       decay_class="gaussian", x_max=None):
    """Integral of f(x) x**(nu-1) over (0, infinity).

    Returns a QuadResult(value, error).  Raises DomainError for nu < 1 and
    NonConvergent when the subdivision budget is exhausted or the error
    estimate exceeds the requested tolerance.
    """
    if nu < 1:
        raise DomainError(f"integrate_halfline requires nu >= 1, got {nu}")
    spec = spec or QuadratureSpec()
    if x_max is None:
        x_max = _truncation_point(f, nu, spec.abs_tol, decay_class)

    probe = f(0.5 * x_max)
    complex_valued = np.iscomplexobj(np.asarray(probe))

    def run(g):
        out = sint.quad(g, 0.0, x_max, epsabs=spec.abs_tol,
                        epsrel=spec.rel_tol, limit=spec.max_subdivisions,
                        full_output=True)
        val, err = out[0], out[1]
        if len(out) > 3:  # explanation string present => trouble reported
            raise NonConvergent(f"half-line quadrature failed: {out[3]}",
                                estimate=val, error=err)
        return val, err

    if complex_valued:
        vr, er = run(lambda x: np.real(f(x)) * x ** (nu - 1.0))
        vi, ei = run(lambda x: np.imag(f(x)) * x ** (nu - 1.0))
        value, err = vr + 1j * vi, np.hypot(er, ei)
    else:
        value, err = run(lambda x: f(x) * x ** (nu - 1.0))
    if err > 10.0 * max(spec.abs_tol, spec.rel_tol * abs(value)):
        raise NonConvergent("half-line quadrature error estimate too large",
                            estimate=value, error=err)
    return QuadResult(value, err)


def _euler_accelerate(partials):
    """Repeated averaging of the tail of a sequence of partial sums."""
    t = np.asarray(partials, dtype=float)
    best = t[-1]
    err = np.inf
    while len(t) >= 2:
        t = 0.5 * (t[:-1] + t[1:])
        new_err = abs(t[-1] - best)
        if new_err >= err:
            break
        best, err = t[-1], new_err
    return best, err


def integrate_oscillatory(f, omega, domain=(0.0, np.inf),
                          spec: QuadratureSpec | None = None,
                          nodes_per_half_period=16):
    """Integral of f(theta) * sin(omega * theta) over the domain.

    Splits at the zeros of the sine factor and sums the alternating panel
    series, with repeated-averaging acceleration for slowly decaying
    amplitudes.  Returns QuadResult(value, error).
    """
    if omega <= 0:
        raise DomainError("integrate_oscillatory requires omega > 0")
    spec = spec or QuadratureSpec()
    a, b = domain
    half = np.pi / omega
    c, w = _gauss_legendre(nodes_per_half_period)

    if np.isfinite(b):
        n_panels = max(1, int(np.ceil((b - a) / half)))
        edges = np.linspace(a, b, n_panels + 1)
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            x = lo + 0.5 * (hi - lo) * (1.0 + c)
            total += 0.5 * (hi - lo) * np.sum(w * f(x) * np.sin(omega * x))
        return QuadResult(total, spec.abs_tol)

    terms = []
    partials = []
    total = 0.0
    tol = spec.abs_tol
    for k in range(spec.max_subdivisions):
        lo = a + k * half
        hi = lo + half
        x = lo + 0.5 * half * (1.0 + c)
        term = 0.5 * half * np.sum(w * f(x) * np.sin(omega * x))
        total += term
        terms.append(term)
        partials.append(total)
        if k >= 3:
            # fast-decaying amplitude: direct summation has converged
            if max(abs(t) for t in terms[-3:]) < tol:
                return QuadResult(total, max(abs(terms[-1]), 1e-300))
            if len(partials) >= 8:
                est, err = _euler_accelerate(partials[-12:])
                if err < max(tol, spec.rel_tol * abs(est)):
                    return QuadResult(est, err)
    est, err = _euler_accelerate(partials[-12:])
    if err < 10.0 * max(tol, spec.rel_tol * abs(est)):
        return QuadResult(est, err)
    raise NonConvergent("oscillatory tail did not converge",
                        estimate=est, error=err)
