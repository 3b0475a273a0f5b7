"""Special functions: Bessel J of real order, the normalized kernel j^nu,
gamma/beta-derived constants, and a stable arccosh.

The normalized kernel is ``jnu(t) = kappa * J_{nu/2-1}(t) / t**(nu/2-1)``,
an even entire function with ``jnu(0) = 1`` and ``|jnu(t)| <= 1`` for
``nu >= 1``.  For nu = 1 it reduces to cos(t) and for nu = 3 to sin(t)/t.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma as _gamma

import numpy as np
from scipy import special as sp

from .errors import DomainError

__all__ = ["Order", "bessel_j", "j_kernel", "arccosh_stable"]


@dataclass(frozen=True)
class Order:
    """The hypergroup parameter nu >= 1 with its derived constants.

    kappa = 2**(nu/2-1) * Gamma(nu/2) normalizes the transform kernel;
    c = 2**(nu-1) * B(nu/2, nu/2) is the radial-volume constant.
    """

    nu: float
    kappa: float = field(init=False)
    c: float = field(init=False)

    def __post_init__(self):
        if not np.isfinite(self.nu) or self.nu < 1:
            raise DomainError(f"order parameter must satisfy nu >= 1, got {self.nu}")
        object.__setattr__(self, "kappa", compute_kappa(self.nu))
        object.__setattr__(self, "c", compute_radial_constant(self.nu))


def compute_kappa(nu: float) -> float:
    return 2.0 ** (nu / 2.0 - 1.0) * _gamma(nu / 2.0)


def compute_radial_constant(nu: float) -> float:
    return 2.0 ** (nu - 1.0) * sp.beta(nu / 2.0, nu / 2.0)


def bessel_j(s: float, t):
    """Bessel function of the first kind J_s(t) for real order s >= -1/2, t >= 0."""
    if s < -0.5:
        raise DomainError(f"Bessel order must be >= -1/2, got {s}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("bessel_j requires t >= 0")
    out = sp.jv(s, t)
    return out if out.shape else float(out)


# Terms of the defining power series; 30 terms cover |t| <= 1 to well below
# double precision for any nu >= 1.
_SERIES_TERMS = 30
_SERIES_CUTOFF = 1.0


def _j_kernel_series(nu: float, t: np.ndarray) -> np.ndarray:
    # jnu(t) = Gamma(nu/2) * sum_k (-1)^k (t^2/4)^k / (k! Gamma(k + nu/2))
    z = -(t * t) / 4.0
    acc = np.zeros_like(t)
    term = np.ones_like(t)
    half = nu / 2.0
    for k in range(_SERIES_TERMS):
        if k > 0:
            term = term * z / (k * (half + k - 1.0))
        acc = acc + term
    return acc


def j_kernel(order: Order | float, t):
    """The normalized even kernel jnu(t); handles the removable singularity at 0."""
    nu = order.nu if isinstance(order, Order) else float(order)
    if nu < 1:
        raise DomainError(f"j_kernel requires nu >= 1, got {nu}")
    t = np.abs(np.asarray(t, dtype=float))
    kappa = compute_kappa(nu)
    s = nu / 2.0 - 1.0
    small = t < _SERIES_CUTOFF
    out = np.empty_like(t)
    if np.any(small):
        out[small] = _j_kernel_series(nu, t[small])
    if np.any(~small):
        tl = t[~small]
        # closed forms for the common half-integer and integer orders
        if s == -0.5:
            out[~small] = np.cos(tl)
        elif s == 0.5:
            out[~small] = np.sin(tl) / tl
        elif s == 0.0:
            out[~small] = sp.j0(tl)
        elif s == 1.0:
            out[~small] = kappa * sp.j1(tl) / tl
        else:
            out[~small] = kappa * sp.jv(s, tl) / tl**s
    return out if out.shape else float(out)


def arccosh_stable(y):
    """arccosh(y) evaluated stably near y = 1.

    Inputs within 1e-12 below 1 are clamped to 1; smaller values raise.
    Uses arccosh(1 + d) = log1p(d + sqrt(d*(d + 2))), accurate for tiny d.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y < 1.0 - 1e-12):
        raise DomainError("arccosh_stable requires y >= 1 (tolerance 1e-12)")
    d = np.maximum(y - 1.0, 0.0)
    out = np.log1p(d + np.sqrt(d * (d + 2.0)))
    return out if out.shape else float(out)
