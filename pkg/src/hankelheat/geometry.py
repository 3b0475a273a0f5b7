"""The solvable extension of the half-line hypergroup: points (x, u) with
x >= 0, right Haar measure x**(nu-1) dx du, modular function e^(-nu*u),
its translations, convolution, and hyperbolic-type distance geometry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, NonConvergent, ResampleError
from .quadrature import PlaneGrid, QuadratureSpec, panel_rule
from .specfun import Order, arccosh_stable
from .halfline import RadialProfile, _gegenbauer_rule, _chord

__all__ = [
    "GPoint",
    "KernelField",
    "modular",
    "involution",
    "group_norm",
    "distance",
    "left_translate",
    "right_translate",
    "g_convolve",
    "radial_integrate",
    "radial_integrate_plane",
    "ball_indicator",
    "weighted_ball_bound",
    "save_field",
    "load_field",
]


@dataclass(frozen=True)
class GPoint:
    """A point (x, u) of the extension, x >= 0."""

    x: float
    u: float

    def __post_init__(self):
        if self.x < 0:
            raise DomainError("first coordinate must be >= 0")


class KernelField:
    """A function sampled on a PlaneGrid; values[i, j] lives at
    (x_i, u_j).  Norms use the right Haar weights of the grid."""

    __slots__ = ("plane", "values", "order")

    def __init__(self, plane: PlaneGrid, values, order: Order):
        values = np.asarray(values)
        if values.shape != plane.shape():
            raise DomainError("values must match the plane grid shape")
        if not np.all(np.isfinite(values)):
            raise DomainError("field values must be finite")
        self.plane = plane
        self.values = values
        self.order = order

    @classmethod
    def from_function(cls, plane, f, order):
        x, u = plane.mesh()
        return cls(plane, f(x, u), order)

    def norm_l1(self):
        return self.plane.norm_l1(self.values)

    def norm_l2(self):
        return self.plane.norm_l2(self.values)

    def norm_sup(self):
        return float(np.max(np.abs(self.values)))

    def with_values(self, values):
        return KernelField(self.plane, values, self.order)

    def column_profile(self, j, decay_class="gaussian"):
        """The x-section at u_j as a RadialProfile."""
        return RadialProfile(self.plane.x_grid, self.values[:, j], decay_class)

    def interpolator(self):
        """Interpolant over the plane: monotone cubic in x (even across 0),
        linear in u, zero outside the grid."""
        xg = self.plane.x_grid
        un = self.plane.u_nodes
        columns = [self.column_profile(j).interpolator()
                   for j in range(len(un))]
        u_max = self.plane.u_max

        def evaluate(x, u):
            """x array-like, u scalar."""
            if abs(u) > u_max:
                return np.zeros_like(np.asarray(x, dtype=float))
            j = np.searchsorted(un, u)
            if j == 0:
                return columns[0](x)
            if j >= len(un):
                return columns[-1](x)
            w = (u - un[j - 1]) / (un[j] - un[j - 1])
            return (1.0 - w) * columns[j - 1](x) + w * columns[j](x)

        return evaluate


def modular(order: Order, p: GPoint) -> float:
    """The modular function e^(-nu*u)."""
    return float(np.exp(-order.nu * p.u))


def involution(p: GPoint) -> GPoint:
    """The hypergroup involution (x, u) -> (e^(-u) x, -u)."""
    return GPoint(np.exp(-p.u) * p.x, -p.u)


def distance(p: GPoint, q: GPoint) -> float:
    """Hyperbolic-type distance
    arccosh(cosh(u - u') + |x - x'|^2 / (2 e^(u + u')))."""
    arg = np.cosh(p.u - q.u) + (p.x - q.x) ** 2 / (2.0 * np.exp(p.u + q.u))
    return arccosh_stable(arg)


def group_norm(p: GPoint) -> float:
    """Distance from p to the identity (0, 0)."""
    return distance(p, GPoint(0.0, 0.0))


def _dilation_tail(f: KernelField, scale: float, tol: float) -> float:
    """Fraction of |f|'s x-mass that a dilation by `scale` would push
    beyond the grid edge."""
    if scale <= 1.0:
        return 0.0
    xg = f.plane.x_grid
    absf = np.abs(f.values)
    total = f.plane.integrate(absf)
    if total == 0.0:
        return 0.0
    cut = xg.x_max / scale
    outside = xg.nodes > cut
    tail = float(f.plane.u_weights @ (absf[outside].T @ xg.weights[outside]))
    return tail / total


def _u_shift_tail(f: KernelField, shift: float) -> float:
    """Fraction of |f|'s u-mass pushed beyond [-u_max, u_max] by the shift."""
    un = f.plane.u_nodes
    absf = np.abs(f.values)
    total = f.plane.integrate(absf)
    if total == 0.0:
        return 0.0
    outside = np.abs(un + shift) > f.plane.u_max
    tail = float(f.plane.x_grid.weights @ absf[:, outside] @
                 f.plane.u_weights[outside])
    return tail / total


def _translate_columns(order, x, field_vals, plane, interp, n_omega=32):
    """Apply the generalized x-translation by x to every u-column, sampled
    back on the grid nodes.  interp(x_arr, u) evaluates the field."""
    nu = order.nu
    y = plane.x_grid.nodes
    out = np.empty_like(field_vals, dtype=float)
    if nu <= 1.0 + 1e-9 or x == 0.0:
        for j, u in enumerate(plane.u_nodes):
            if x == 0.0:
                out[:, j] = interp(y, u)
            else:
                out[:, j] = 0.5 * (interp(x + y, u) + interp(np.abs(x - y), u))
        return out
    c, w = _gegenbauer_rule(nu, n_omega)
    chords = _chord(x, y[:, None], c[None, :])
    for j, u in enumerate(plane.u_nodes):
        out[:, j] = interp(chords.ravel(), u).reshape(chords.shape) @ w
    return out


def left_translate(order: Order, p: GPoint, f: KernelField,
                   tol=1e-6) -> KernelField:
    """(x, u) acting on the left: translate by x in the first variable of
    (y, v) -> f(e^u y, u + v)."""
    scale = float(np.exp(p.u))
    if _dilation_tail(f, scale, tol) > tol:
        raise ResampleError("dilation pushes mass past the grid edge")
    if _u_shift_tail(f, p.u) > tol:
        raise ResampleError("height shift pushes mass past the grid edge")
    interp = f.interpolator()
    plane = f.plane

    def shifted(x_arr, v):
        return interp(scale * np.asarray(x_arr), p.u + v)

    vals = _translate_columns(order, p.x, f.values, plane, shifted)
    return f.with_values(vals)


def right_translate(order: Order, p: GPoint, f: KernelField,
                    tol=1e-6) -> KernelField:
    """(x, u) acting on the right: at height v, translate the first
    variable by e^v x, then shift the height by u."""
    if _u_shift_tail(f, p.u) > tol:
        raise ResampleError("height shift pushes mass past the grid edge")
    interp = f.interpolator()
    plane = f.plane
    nu = order.nu
    y = plane.x_grid.nodes
    out = np.empty(plane.shape(), dtype=float)
    if nu <= 1.0 + 1e-9:
        for j, v in enumerate(plane.u_nodes):
            s = float(np.exp(v)) * p.x
            out[:, j] = 0.5 * (interp(s + y, p.u + v) +
                               interp(np.abs(s - y), p.u + v))
        return f.with_values(out)
    c, w = _gegenbauer_rule(nu, 32)
    for j, v in enumerate(plane.u_nodes):
        s = float(np.exp(v)) * p.x
        if s == 0.0:
            out[:, j] = interp(y, p.u + v)
            continue
        chords = _chord(s, y[:, None], c[None, :])
        out[:, j] = interp(chords.ravel(), p.u + v).reshape(chords.shape) @ w
    return f.with_values(out)


def g_convolve(order: Order, f: KernelField, g: KernelField,
               n_omega=32, n_v=None) -> KernelField:
    """Convolution on the extension:
    (f <> g)(x, u) = iint f(e^(-v) y, -v) * [tau by e^v x of g(., u+v)](y)
                     dmu(y) dv.

    Moving the generalized translation onto f by self-adjointness and
    rescaling the chord, the inner integral becomes

        int g(y, u+v) * avg_omega f(chord(x, e^(-v) y, omega), -v) dmu(y),

    so the f-side table for each v-node serves every output height u.
    """
    if f.plane is not g.plane and f.plane.shape() != g.plane.shape():
        raise DomainError("operands must share a plane grid")
    nu = order.nu
    plane = f.plane
    y = plane.x_grid.nodes
    wx = plane.x_grid.weights
    un = plane.u_nodes
    n_x, n_u = plane.shape()
    f_interp = f.interpolator()
    g_interp = g.interpolator()
    u_max = plane.u_max
    out = np.zeros((n_x, n_u))

    if nu > 1.0:
        c, w = _gegenbauer_rule(nu, n_omega)
    # v-quadrature: f(., -v) vanishes off [-u_max, u_max]
    if n_v is None:
        n_v = 2 * n_u
    p = 12
    edges = np.linspace(-u_max, u_max, max(1, int(round(n_v / p))) + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        vn, vw = panel_rule(a, b, p)
        for v, dv in zip(vn, vw):
            ys = float(np.exp(-v)) * y
            if nu <= 1.0 + 1e-9:
                B = 0.5 * (f_interp(y[:, None] + ys[None, :], -v) +
                           f_interp(np.abs(y[:, None] - ys[None, :]), -v))
            else:
                chords = _chord(y[:, None, None], ys[None, :, None],
                                c[None, None, :])
                B = f_interp(chords.reshape(-1), -v).reshape(
                    n_x, n_x, -1) @ w
            if not B.any():
                continue
            for k in range(n_u):
                wcol = un[k] + v
                if abs(wcol) > u_max:
                    continue
                out[:, k] += dv * (B @ (wx * g_interp(y, wcol)))
    return KernelField(plane, out, order)


def radial_integrate(order: Order, f, r_max=30.0,
                     spec: QuadratureSpec | None = None) -> float:
    """c_nu * integral of f(r) sinh(r)^nu dr over (0, r_max)."""
    from scipy import integrate as sint
    spec = spec or QuadratureSpec()
    out = sint.quad(lambda r: f(r) * np.sinh(r) ** order.nu, 0.0, r_max,
                    epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                    limit=spec.max_subdivisions, full_output=True)
    if len(out) > 3:
        raise NonConvergent(f"radial quadrature failed: {out[3]}",
                            estimate=out[0], error=out[1])
    return order.c * out[0]


def radial_integrate_plane(order: Order, f, plane: PlaneGrid,
                           haar="left") -> float:
    """Plane-grid evaluation of the radial integral: integral of
    f(|(x,u)|) against the left (e^(-nu*u) dmu du) or right (dmu du)
    Haar measure.  Both agree with the 1-D formula."""
    x, u = plane.mesh()
    arg = np.cosh(u) + x * x / (2.0 * np.exp(u))
    r = arccosh_stable(arg)
    vals = f(r)
    if haar == "left":
        vals = vals * np.exp(-order.nu * u)
    elif haar != "right":
        raise DomainError("haar must be 'left' or 'right'")
    return plane.integrate(vals)


def ball_indicator(order: Order, r: float, plane: PlaneGrid) -> KernelField:
    """Indicator of the distance ball of radius r about the identity."""
    if r < 0:
        raise DomainError("ball radius must be >= 0")
    x, u = plane.mesh()
    arg = np.cosh(u) + x * x / (2.0 * np.exp(u))
    rho = arccosh_stable(arg)
    return KernelField(plane, (rho <= r).astype(float), order)


def weighted_ball_bound(order: Order, f, plane: PlaneGrid):
    """Empirical ratio of
    integral f(|p|) e^(-nu*u) x^nu dmu du  to  integral f(|p|) |p| dmu du
    for a nonnegative radial profile f; the ratio stays bounded."""
    nu = order.nu
    x, u = plane.mesh()
    arg = np.cosh(u) + x * x / (2.0 * np.exp(u))
    rho = arccosh_stable(arg)
    fr = np.asarray(f(rho))
    if np.any(fr < 0):
        raise DomainError("profile must be nonnegative")
    lhs = plane.integrate(fr * np.exp(-nu * u) * x ** nu)
    rhs = plane.integrate(fr * rho)
    if rhs == 0.0:
        return 0.0 if lhs == 0.0 else np.inf
    return lhs / rhs


def save_field(f: KernelField, path):
    """Header (nu, grid sizes, extents) then CSV rows x,u,value."""
    n_x, n_u = f.plane.shape()
    lines = [f"# nu={f.order.nu!r} x_max={f.plane.x_grid.x_max!r} "
             f"u_max={f.plane.u_max!r} n_x={n_x} n_u={n_u}"]
    x = f.plane.x_grid.nodes
    u = f.plane.u_nodes
    for i in range(n_x):
        for j in range(n_u):
            lines.append(f"{x[i]:.17g},{u[j]:.17g},{f.values[i, j]:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_field(path, order: Order | None = None) -> KernelField:
    from .quadrature import build_plane_grid
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise DomainError("field file lacks a header line")
        meta = dict(tok.split("=", 1) for tok in header[1:].split())
        rows = [line.strip().split(",") for line in fh if line.strip()]
    nu = float(meta["nu"])
    n_x, n_u = int(meta["n_x"]), int(meta["n_u"])
    if len(rows) != n_x * n_u:
        raise DomainError("field file row count does not match header")
    vals = np.array([float(r[2]) for r in rows]).reshape(n_x, n_u)
    x_max, u_max = float(meta["x_max"]), float(meta["u_max"])
    x_nodes = np.array([float(r[0]) for r in rows[::n_u]])
    u_nodes = np.array([float(r[1]) for r in rows[:n_u]])
    plane = build_plane_grid(nu, x_max, n_x, u_max, n_u)
    if (plane.shape() == (n_x, n_u)
            and np.allclose(plane.x_grid.nodes, x_nodes, rtol=1e-12, atol=1e-12)
            and np.allclose(plane.u_nodes, u_nodes, rtol=1e-12, atol=1e-12)):
        return KernelField(plane, vals, order or Order(nu))
    # unknown layout: midpoint-rule weights on the stored nodes
    from .quadrature import HalfLineGrid
    xe = np.concatenate([[0.0], 0.5 * (x_nodes[:-1] + x_nodes[1:]), [x_max]])
    xw = (xe[1:] - xe[:-1]) * x_nodes ** (nu - 1.0)
    ue = np.concatenate([[-u_max], 0.5 * (u_nodes[:-1] + u_nodes[1:]), [u_max]])
    uw = ue[1:] - ue[:-1]
    plane = PlaneGrid(HalfLineGrid(x_nodes, xw, x_max, nu), u_nodes, uw, u_max)
    return KernelField(plane, vals, order or Order(nu))
