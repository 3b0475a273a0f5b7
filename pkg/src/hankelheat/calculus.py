"""Functional calculus of the lifted operator on the extension: the
subordination weight Psi_t, the transference functions M_t(lambda, u),
heat and multiplier kernels, exponential-mixture projection, and the
empirical Plancherel density.

Evaluating Psi_t is delicate: the defining integral carries a prefactor
exp(pi^2/4t) against an oscillatory integral of the same tiny size, so a
float64 evaluation loses pi^2/(4t ln 10) digits.  Rotating the contour of

    int_0^inf sinh(h) sin(pi h/2t) exp(-h^2/4t - cosh(h)/xi) dh

to the line Im h = pi/2 (the vertical leg contributes only to the real
part) gives the equivalent form

    Psi_t(xi) = exp(pi^2/16t) / (xi^2 sqrt(4 pi^3 t))
                * int_0^inf cosh(s) exp(-s^2/4t)
                            cos(pi s/4t - sinh(s)/xi) ds,

which cancels only exp(pi^2/16t): four times fewer digits lost.  float64
then suffices for t >~ 0.04; below that the same integral is summed in
extended precision with the node count driven by the accumulated phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np
from scipy import special as sp

from .errors import DomainError, IllConditioned, NonConvergent
from .geometry import KernelField
from .halfline import RadialProfile, hankel_inverse
from .quadrature import HalfLineGrid, PlaneGrid, build_grid, panel_rule
from .specfun import Order

__all__ = [
    "T_MIN",
    "PsiWeight",
    "ExpMixMultiplier",
    "PlancherelEstimate",
    "psi_eval",
    "m_function",
    "g_heat_kernel",
    "multiplier_kernel",
    "project_to_expmix",
    "estimate_plancherel",
]

# Below this heat time the oscillatory subordination integral is not
# evaluated by the public operations (the CLI reports non-convergence);
# internal callers may override where the extended-precision path is used.
T_MIN = 0.05

_XI_LO = 0.02
_XI_HI = 1.0e7
_PANELS_PER_DECADE = 3
_GL_N = 16

_gl_nodes, _gl_weights = np.polynomial.legendre.leggauss(_GL_N)


def _check_t(t, allow_small_t):
    if t <= 0:
        raise DomainError("heat time must be positive")
    if t < T_MIN and not allow_small_t:
        raise NonConvergent(
            f"t = {t} is below the supported floor {T_MIN}; the "
            "subordination integral oscillates too fast to evaluate")


def _rotated_panels(t, xi, budget):
    """Panel edges for the rotated-contour integrand, sized by the local
    phase speed pi/4t + cosh(s)/xi and by the Gaussian envelope."""
    freq0 = math.pi / (4.0 * t)
    env_step = 0.45 * math.sqrt(4.0 * t)
    edges = [0.0]
    s = 0.0
    # march until the envelope is below the peak by the cancellation budget
    while True:
        step = min(2.5 / (freq0 + math.cosh(s) / xi), env_step)
        s += step
        edges.append(s)
        if s > 2.0 * t and (s * s / (4.0 * t) - abs(s) -
                            math.log1p(0.5)) > budget:
            break
        if len(edges) > 20000:
            raise NonConvergent("rotated-contour paneling did not terminate")
    return np.asarray(edges)


def _psi_rotated_float(t, xi):
    """Rotated-contour evaluation in float64; valid when the residual
    cancellation exp(pi^2/16t + t) stays well inside double precision."""
    budget = math.pi**2 / (16.0 * t) + 36.0 - max(0.0, 1.0 / xi - 1.0)
    if budget <= 0.0:
        # the xi-damping exp(-1/xi) in every use of Psi makes the value
        # negligible before the integral is even attempted
        return 0.0
    edges = _rotated_panels(t, xi, budget)
    half = 0.5 * np.diff(edges)
    s = edges[:-1, None] + half[:, None] * (1.0 + _gl_nodes[None, :])
    w = half[:, None] * _gl_weights[None, :]
    with np.errstate(over="ignore"):
        integrand = (np.cosh(s) * np.exp(-s * s / (4.0 * t)) *
                     np.cos(math.pi * s / (4.0 * t) - np.sinh(s) / xi))
    total = float(np.sum(w * integrand))
    pref = math.exp(math.pi**2 / (16.0 * t)) / (xi * xi *
                                                math.sqrt(4.0 * math.pi**3 * t))
    return pref * total


def _psi_realaxis_float(t, xi):
    """Direct evaluation of the defining integral; only for t large enough
    that exp(pi^2/4t + t) is far from the float64 epsilon."""
    freq = math.pi / (2.0 * t)
    budget = math.pi**2 / (4.0 * t) + 36.0
    edges = [0.0]
    s = 0.0
    e_peak = -1e300
    while True:
        step = min(2.5 / freq, 0.45 * math.sqrt(4.0 * t))
        # keep panels shorter than the cosh-decay scale
        slope = abs(math.sinh(s)) / xi
        step = min(step, 2.0 / (1.0 + slope))
        s += step
        edges.append(s)
        env = (math.log(math.sinh(s)) if s > 0 else -1e300) \
            - s * s / (4.0 * t) - math.cosh(s) / xi
        e_peak = max(e_peak, env)
        # the envelope log sinh(s) - s^2/4t - cosh(s)/xi is unimodal, so a
        # drop of `budget` below the running peak is conclusive
        if env < e_peak - budget:
            break
        if len(edges) > 20000:
            raise NonConvergent("real-axis paneling did not terminate")
    edges = np.asarray(edges)
    half = 0.5 * np.diff(edges)
    s = edges[:-1, None] + half[:, None] * (1.0 + _gl_nodes[None, :])
    w = half[:, None] * _gl_weights[None, :]
    with np.errstate(over="ignore"):
        integrand = (np.sinh(s) * np.sin(freq * s) *
                     np.exp(-s * s / (4.0 * t) - np.cosh(s) / xi))
    total = float(np.sum(w * integrand))
    pref = math.exp(math.pi**2 / (4.0 * t)) / (xi * xi *
                                               math.sqrt(4.0 * math.pi**3 * t))
    return pref * total


def _mp_leggauss(n, dps):
    """Gauss-Legendre nodes/weights on [-1, 1] at dps digits, Newton-refined
    from the float64 nodes."""
    with mp.workdps(dps + 10):
        nodes = []
        weights = []
        seeds, _ = np.polynomial.legendre.leggauss(n)
        for x0 in seeds:
            x = mp.mpf(float(x0))
            for _ in range(6):
                p0, p1 = mp.mpf(1), x
                for k in range(2, n + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = n * (x * p1 - p0) / (x * x - 1)
                x = x - p1 / dp
            p0, p1 = mp.mpf(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            nodes.append(x)
            weights.append(2 / ((1 - x * x) * dp * dp))
    return nodes, weights


_MP_GL_CACHE = {}


def _psi_rotated_mp(t, xi):
    """Extended-precision rotated-contour evaluation for small t."""
    cancel_digits = (math.pi**2 / (16.0 * t) + t) / math.log(10.0)
    dps = int(cancel_digits) + 25
    key = (_GL_N, dps)
    if key not in _MP_GL_CACHE:
        _MP_GL_CACHE[key] = _mp_leggauss(_GL_N, dps)
    gl_x, gl_w = _MP_GL_CACHE[key]
    budget = (math.pi**2 / (16.0 * t) + (dps - 10) * math.log(10.0)
              - max(0.0, 1.0 / xi - 1.0))
    if budget <= 0.0:
        return 0.0
    edges = _rotated_panels(t, xi, budget)
    with mp.workdps(dps):
        tm = mp.mpf(t)
        xim = mp.mpf(xi)
        quarter = mp.pi / (4 * tm)
        total = mp.mpf(0)
        for a, b in zip(edges[:-1], edges[1:]):
            am, hm = mp.mpf(float(a)), mp.mpf(float(b - a)) / 2
            for x, w in zip(gl_x, gl_w):
                s = am + hm * (1 + x)
                total += hm * w * (mp.cosh(s) * mp.exp(-s * s / (4 * tm)) *
                                   mp.cos(quarter * s - mp.sinh(s) / xim))
        pref = mp.exp(mp.pi**2 / (16 * tm)) / (xim * xim *
                                               mp.sqrt(4 * mp.pi**3 * tm))
        return float(pref * total)


def psi_eval(t, xi, allow_small_t=False):
    """The subordination weight Psi_t(xi) for t, xi > 0."""
    _check_t(t, allow_small_t)
    if xi <= 0:
        raise DomainError("xi must be positive")
    if t > 0.36:
        return _psi_realaxis_float(t, xi)
    if t >= 0.04:
        return _psi_rotated_float(t, xi)
    return _psi_rotated_mp(t, xi)


class PsiWeight:
    """Psi_t cached on a geometric xi-grid, with the grid's quadrature
    weights, for use in the xi-integrals of the kernel formulas.

    C_t = sup of xi^2 |Psi_t(xi)| over the grid is stored; the weight obeys
    |Psi_t(xi)| <= C_t / xi^2.
    """

    __slots__ = ("t", "xi_nodes", "xi_weights", "values", "C_t")

    def __init__(self, t, xi_lo=None, xi_hi=None,
                 panels_per_decade=_PANELS_PER_DECADE, allow_small_t=False):
        _check_t(t, allow_small_t)
        if xi_lo is None:
            # the weight concentrates near xi ~ 2t for small t; keep the
            # grid floor well below that
            xi_lo = min(_XI_LO, t / 6.0)
        if xi_hi is None:
            # the tail is lognormal-heavy, roughly
            # xi^-2 exp(-(log xi)^2 / 16t); push the cutoff out like
            # exp(c sqrt(t)) so the truncated tail mass stays negligible
            # cap log(xi_hi) at 350 so xi^2 stays inside float64 range; the
            # truncated tail fraction exp(-350^2/16t) is negligible for any
            # t this cap can bind on
            xi_hi = max(_XI_HI, math.exp(min(24.0 * math.sqrt(t), 350.0)))
        n_panels = max(8, int(round(panels_per_decade *
                                    math.log10(xi_hi / xi_lo))))
        edges = np.geomspace(xi_lo, xi_hi, n_panels + 1)
        if t < 0.25:
            # refine around the peak at xi ~ 2t, whose relative width
            # shrinks like sqrt(t)
            n_ref = max(12, int(8.0 / math.sqrt(t) * 0.5))
            window = np.geomspace(max(xi_lo, t / 3.0), 12.0 * t, n_ref)
            edges = np.unique(np.concatenate([edges, window]))
        nodes, weights = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            n, w = panel_rule(a, b, 8)
            nodes.append(n)
            weights.append(w)
        nodes = np.concatenate(nodes)
        weights = np.concatenate(weights)
        self.t = float(t)
        self.xi_nodes = nodes
        self.xi_weights = weights
        self.values = np.array([psi_eval(t, xi, allow_small_t=True)
                                for xi in nodes])
        self.C_t = float(np.max(nodes**2 * np.abs(self.values)))

    def integrate(self, factor):
        """Integral of Psi_t(xi) * factor(xi) d(xi); factor is an array
        sampled on the xi nodes (any leading shape, last axis = xi)."""
        return np.asarray(factor) @ (self.xi_weights * self.values)


_PSI_CACHE: dict = {}


def get_psi_weight(t, allow_small_t=False) -> PsiWeight:
    key = float(t)
    if key not in _PSI_CACHE:
        _PSI_CACHE[key] = PsiWeight(t, allow_small_t=allow_small_t)
    return _PSI_CACHE[key]


def m_function(t, u, lam, allow_small_t=False):
    """The transference multiplier
    M_t(lambda, u) = int Psi_t(xi) exp(-cosh(u)/xi - xi lambda e^u / 2) dxi.

    u and lam may be arrays (broadcast against each other); the xi-integral
    uses the cached Psi_t table.
    """
    psi = get_psi_weight(t, allow_small_t)
    u = np.asarray(u, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise DomainError("spectral argument must be >= 0")
    shape = np.broadcast_shapes(u.shape, lam.shape)
    ub = np.broadcast_to(u, shape).reshape(-1)
    lb = np.broadcast_to(lam, shape).reshape(-1)
    xi = psi.xi_nodes
    wv = psi.xi_weights * psi.values
    out = np.empty(ub.size)
    # chunk the (points x xi) work array to bound peak memory
    chunk = max(1, int(4e6 // xi.size))
    with np.errstate(over="ignore", under="ignore"):
        for a in range(0, ub.size, chunk):
            b = min(a + chunk, ub.size)
            rate = 0.5 * xi * lb[a:b, None] * np.exp(ub[a:b, None])
            # 0 * inf from lam = 0 with overflowing xi e^u means "no decay"
            rate = np.nan_to_num(rate, nan=0.0)
            factor = np.exp(-np.cosh(ub[a:b, None]) / xi - rate)
            out[a:b] = factor @ wv
    out = out.reshape(shape)
    return out if out.shape else float(out)


def g_heat_kernel(order: Order, t, plane: PlaneGrid,
                  allow_small_t=False) -> KernelField:
    """Heat kernel of the lifted operator on the (x, u) plane grid:
    2/Gamma(nu/2) * int Psi_t(xi) (2 xi e^u)^(-nu/2)
                        exp(-cosh(u)/xi - x^2/(2 xi e^u)) dxi.
    """
    psi = get_psi_weight(t, allow_small_t)
    nu = order.nu
    x = plane.x_grid.nodes
    u = plane.u_nodes
    xi = psi.xi_nodes
    out = np.empty(plane.shape())
    pref = 2.0 / sp.gamma(nu / 2.0)
    with np.errstate(over="ignore", under="ignore"):
        for j, uj in enumerate(u):
            scale = 2.0 * xi * np.exp(uj)
            col = (scale ** (-nu / 2.0) * np.exp(-np.cosh(uj) / xi)
                   * np.exp(-np.square(x)[:, None] / scale))
            out[:, j] = pref * psi.integrate(col)
    neg = out.min()
    if neg < -1e-8 * max(out.max(), 1e-300):
        raise NonConvergent("heat kernel came out significantly negative; "
                            f"min value {neg:.3e}", estimate=out, error=-neg)
    return KernelField(plane, out, order)


@dataclass(frozen=True)
class ExpMixMultiplier:
    """A spectral multiplier F(lam) = sum_j c_j exp(-t_j lam) given by a
    finite list of (c_j, t_j) with distinct t_j > 0."""

    terms: tuple
    residual: float | None = None

    def __post_init__(self):
        terms = tuple((complex(c).real if complex(c).imag == 0 else complex(c),
                       float(t)) for c, t in self.terms)
        ts = [t for _, t in terms]
        if any(t <= 0 for t in ts):
            raise DomainError("mixture decay rates must be positive")
        if len(set(ts)) != len(ts):
            raise DomainError("mixture decay rates must be distinct")
        object.__setattr__(self, "terms", terms)

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        out = sum(c * np.exp(-t * lam) for c, t in self.terms)
        return out if np.shape(out) else complex(out).real

    def min_rate(self):
        return min(t for _, t in self.terms)


def transference_multiplier(F: ExpMixMultiplier, u, lam,
                            allow_small_t=False):
    """(Phi F)_u(lam) = sum_j c_j M_{t_j}(lam, u)."""
    return sum(c * m_function(t, u, lam, allow_small_t)
               for c, t in F.terms)


def multiplier_kernel(order: Order, F: ExpMixMultiplier, plane: PlaneGrid,
                      via="mixture", spectral_grid: HalfLineGrid | None = None,
                      allow_small_t=False):
    """Convolution kernel of F applied to the lifted operator.

    via="mixture": linear combination of heat kernels.
    via="transference": per-height Hankel inversion of (Phi F)_u.
    via="both": mixture kernel, plus the relative sup disagreement of the
    two routes reported in the returned diagnostics dict.
    """
    if via not in ("mixture", "transference", "both"):
        raise DomainError(f"unknown evaluation route {via!r}")
    diagnostics = {}
    mix = None
    if via in ("mixture", "both"):
        vals = np.zeros(plane.shape())
        for c, t in F.terms:
            vals += c * g_heat_kernel(order, t, plane, allow_small_t).values
        mix = KernelField(plane, vals, order)
    trans = None
    if via in ("transference", "both"):
        if spectral_grid is None:
            spectral_grid = build_grid(order.nu, 30.0 / math.sqrt(
                F.min_rate()), 900)
        y = spectral_grid.nodes
        vals = np.empty(plane.shape())
        for j, uj in enumerate(plane.u_nodes):
            phi = transference_multiplier(F, uj, y * y, allow_small_t)
            prof = RadialProfile(spectral_grid, phi, "exponential")
            vals[:, j] = hankel_inverse(order, prof, plane.x_grid).values
        trans = KernelField(plane, vals, order)
    if via == "both":
        scale = max(mix.norm_sup(), 1e-300)
        diagnostics["two_path_rel_sup"] = float(
            np.max(np.abs(mix.values - trans.values)) / scale)
        return mix, diagnostics
    return (mix if via == "mixture" else trans), diagnostics


def project_to_expmix(lam_grid, F_values, n_terms, t_range,
                      weight_exponents=(1.5, 1.5), ridge=1e-10,
                      cond_threshold=1e14) -> ExpMixMultiplier:
    """Weighted least-squares fit of F by a sum of decaying exponentials
    with log-spaced rates over t_range.

    The residual is measured in the weighted norm
    int |resid|^2 lam^[a,b] dlam/lam on the given grid (a, b from
    weight_exponents) and stored on the returned mixture.
    """
    lam = np.asarray(lam_grid, dtype=float)
    fv = np.asarray(F_values, dtype=float)
    if lam.ndim != 1 or lam.shape != fv.shape or np.any(np.diff(lam) <= 0):
        raise DomainError("need matching 1-d arrays on an increasing grid")
    t_lo, t_hi = t_range
    if not (0 < t_lo < t_hi) or n_terms < 1:
        raise DomainError("t_range must satisfy 0 < t_lo < t_hi")
    rates = np.geomspace(t_lo, t_hi, n_terms)
    a, b = weight_exponents
    bipower = np.where(lam <= 1.0, lam ** a, lam ** b) / lam
    dlam = np.gradient(lam)
    w = np.sqrt(np.maximum(bipower * dlam, 0.0))
    design = np.exp(-np.outer(lam, rates))
    A = design * w[:, None]
    scale = np.linalg.norm(A, axis=0)
    scale[scale == 0] = 1.0
    A_sc = A / scale
    reg = ridge * np.linalg.norm(A_sc, 2)
    A_aug = np.vstack([A_sc, reg * np.eye(n_terms)])
    rhs = np.concatenate([fv * w, np.zeros(n_terms)])
    coef, _, _, sv = np.linalg.lstsq(A_aug, rhs, rcond=None)
    cond = sv[0] / sv[-1] if sv[-1] > 0 else np.inf
    if cond > cond_threshold:
        raise IllConditioned(
            f"exponential-fit design matrix condition {cond:.2e} exceeds "
            f"threshold {cond_threshold:.1e}")
    coef = coef / scale
    resid_vals = fv - design @ coef
    resid = float(np.sqrt(np.sum(bipower * dlam * resid_vals ** 2)))
    terms = tuple((float(c), float(t)) for c, t in zip(coef, rates))
    return ExpMixMultiplier(terms=terms, residual=resid)


@dataclass
class PlancherelEstimate:
    """Empirical spectral density of the lifted operator on dyadic bands."""

    lam: np.ndarray                  # band centers
    density: np.ndarray              # estimated density w.r.t. dlam
    reference: np.ndarray            # lam^[1/2, (nu-1)/2]
    ratio: np.ndarray                # density / reference
    slopes: dict = field(default_factory=dict)

    def ratio_band(self):
        return float(np.min(self.ratio)), float(np.max(self.ratio))


def _band_probe(lam_b):
    """A bump localized near lam_b: e^(-lam/lam_b) - e^(-2 lam/lam_b).
    Its plain L2(dlam) norm squared is lam_b / 12."""
    return ExpMixMultiplier(terms=((1.0, 1.0 / lam_b), (-1.0, 2.0 / lam_b)))


def estimate_plancherel(order: Order, band_centers=None,
                        u_max=14.0, n_u=180, n_y=320) -> PlancherelEstimate:
    """Estimate the spectral density on dyadic bands.

    For each band the probe F_b is a difference of exponentials; the norm
    ||K_{F_b}||^2 over the extension is computed through the per-height
    transference multipliers, and divided by int |F_b|^2 dlam = lam_b/12.
    """
    nu = order.nu
    if band_centers is None:
        band_centers = 2.0 ** np.arange(-7, 8)
    band_centers = np.asarray(band_centers, dtype=float)

    density = np.empty_like(band_centers)
    for i, lam_b in enumerate(band_centers):
        # the squared kernel mass along u peaks near u = -t for the slowest
        # probe term t = 2/lam_b (the e^{-u} left-Haar weight shifts it),
        # with spread of order sqrt(t); on the positive side it dies like
        # e^{-u}.  At depths u ~ -t the spectral decay scale in lambda is
        # O(1), so the y range must not shrink with the band.
        t_slow = 2.0 / lam_b
        t_fast = 1.0 / lam_b
        u_lo = -(t_slow + 5.0 * math.sqrt(t_slow) + 25.0)
        u_hi = max(u_max, 40.0)
        edges = np.linspace(u_lo, u_hi, max(8, int((u_hi - u_lo) / 2.0)) + 1)
        if t_fast < 1.0:
            # for fast probe terms the kernel's u-profile has width
            # sqrt(t); refine the panels near u = 0 accordingly
            c = 1.0 + 8.0 * math.sqrt(t_slow)
            width = max(0.05, 2.0 * math.sqrt(t_fast))
            fine = np.arange(-c, c + width, width)
            edges = np.unique(np.concatenate([edges, fine]))
        ue, uw = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            n, w = panel_rule(a, b, 8)
            ue.append(n)
            uw.append(w)
        u_nodes = np.concatenate(ue)
        u_weights = np.concatenate(uw)
        y_max = max(5.5 * math.sqrt(lam_b), 8.0)
        y_grid = build_grid(nu, y_max, n_y)
        y = y_grid.nodes
        lam = y * y
        phi = np.zeros((len(u_nodes), len(y)))
        probe = _band_probe(lam_b)
        for c, t in probe.terms:
            phi += c * m_function(t, u_nodes[:, None], lam[None, :],
                                  allow_small_t=True)
        # ||K||^2 = int du (2 kappa^2)^-1 int |Phi F|^2 lam^(nu/2) dlam/lam
        #         = int du kappa^-2 int |Phi F(y^2)|^2 dmu(y)
        per_u = (phi ** 2) @ y_grid.weights / order.kappa**2
        norm_sq = float(u_weights @ per_u)
        density[i] = norm_sq / (lam_b / 12.0)

    reference = np.where(band_centers <= 1.0,
                         band_centers ** 0.5,
                         band_centers ** ((nu - 1.0) / 2.0))
    ratio = density / reference
    logl = np.log(band_centers)
    logd = np.log(density)
    low = band_centers <= 0.5
    high = band_centers >= 2.0
    slopes = {}
    if np.sum(low) >= 2:
        slopes["low"] = float(np.polyfit(logl[low], logd[low], 1)[0])
    if np.sum(high) >= 2:
        slopes["high"] = float(np.polyfit(logl[high], logd[high], 1)[0])
    return PlancherelEstimate(lam=band_centers, density=density,
                              reference=reference, ratio=ratio,
                              slopes=slopes)
