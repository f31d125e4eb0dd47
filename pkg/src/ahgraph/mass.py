"""Mass of a radial graph from the boundary integral over large spheres.

For a radial graph the tensor ``e = V^2 df (x) df`` is ``phi(r) dr (x) dr``
with ``phi = V^2 |grad f|^2``.  Against the outward normal ``nu = d/dr`` of
the sphere ``S_r`` the four terms of the mass 1-form are

    V (div e)(nu)       = cosh r (phi' + (n-1) coth r phi)
    -V d(tr e)(nu)      = -cosh r phi'
    (tr e) dV(nu)       = phi sinh r
    -e(grad V, nu)      = -phi sinh r

so the integrand is constant on ``S_r`` and the sphere integral is a product
with ``sphere_area``.  Each term is still evaluated separately so that the
reduction itself is under test.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError
from .graph import _five_point, _profile
from .hyperbolic import omega

log = logging.getLogger(__name__)

DEFAULT_SCHEDULE = (5.0, 8.0, 11.0, 14.0, 17.0, 20.0)


def _phi_and_derivative(prof, r):
    """``phi(r)`` and ``d phi / dr`` for the radial coefficient of ``e``."""
    rho = math.sinh(r)
    phi = float(prof.gradient_decay(rho))
    d2 = prof.d2f(rho)
    if d2 is not None:
        p = 1.0 + rho * rho
        d1 = float(prof.df(rho))
        dphi_drho = 4.0 * rho * p * d1 * d1 + 2.0 * p * p * d1 * float(d2)
    else:
        h = min(1e-3 * max(rho, 1.0), 0.25 * (rho - prof.rho_plus))
        dphi_drho = _five_point(lambda x: float(prof.gradient_decay(x)), rho, h)
    return phi, dphi_drho * math.cosh(r)


def mass_terms(G, r):
    """The four pointwise terms of the mass 1-form evaluated on ``nu_r``."""
    prof = _profile(G)
    n = prof.n
    if math.sinh(r) <= prof.rho_plus:
        raise DomainError(f"r={r} does not lie outside the inner boundary")
    phi, dphi = _phi_and_derivative(prof, r)
    ch, sh = math.cosh(r), math.sinh(r)
    div_e = dphi + (n - 1) * (ch / sh) * phi
    dtr_e = dphi
    return (ch * div_e, -ch * dtr_e, phi * sh, -phi * sh)


def mass_integrand(G, r):
    """Normalized sphere integral of the mass 1-form at radius ``r``."""
    n = _profile(G).n
    density = math.fsum(mass_terms(G, r))
    area = omega(n) * math.sinh(r) ** (n - 1)
    return density * area / (2.0 * (n - 1) * omega(n))


@dataclass
class MassReport:
    samples: list
    mass: float
    convergence_ok: bool
    tail_slope: float
    warnings: list = field(default_factory=list)

    @property
    def radii(self):
        return np.array([s[0] for s in self.samples])

    @property
    def values(self):
        return np.array([s[1] for s in self.samples])


def _extrapolate(r, s):
    """Limit of ``a + b exp(-c r)`` through three samples, or None.

    Returns None when the two increments do not have the geometric shape of
    a decaying exponential.
    """
    d1 = s[1] - s[0]
    d2 = s[2] - s[1]
    h1 = r[1] - r[0]
    h2 = r[2] - r[1]
    if d1 == 0.0 or d2 == 0.0 or (d1 > 0) != (d2 > 0):
        return None
    q = d2 / d1

    def ratio(c):
        return math.exp(-c * h1) * (-math.expm1(-c * h2)) / (-math.expm1(-c * h1))

    if not 0.0 < q < h2 / h1:
        return None
    if math.isclose(h1, h2, rel_tol=1e-12):
        c = -math.log(q) / h1
    else:
        hi = 1.0
        while ratio(hi) > q:
            hi *= 2.0
            if hi > 1e4:
                return None
        c = brentq(lambda x: ratio(x) - q, 1e-12, hi, xtol=1e-14)
    x = math.exp(-c * h2)
    return s[2] + d2 * x / (1.0 - x)


def _tail_slope(r, s, mass, floor):
    dev = np.abs(np.asarray(s) - mass)
    keep = dev > floor
    if np.count_nonzero(keep) < 2:
        return math.nan
    slope = np.polyfit(np.asarray(r)[keep], np.log(dev[keep]), 1)[0]
    return float(-slope)


def mass_estimate(G, r_schedule=DEFAULT_SCHEDULE, rel_tol=1e-6):
    """Sample the mass integrand along ``r_schedule`` and extrapolate.

    The limit is taken from the last three samples under the model
    ``a + b exp(-c r)``.  Differences below the round-off floor are treated as
    already converged.  ``tail_slope`` is the fitted decay rate ``c`` of
    ``|sample - mass|`` over all samples above that floor.
    """
    r = np.asarray(r_schedule, dtype=float)
    if r.ndim != 1 or r.size < 4:
        raise DomainError("schedule needs at least 4 radii")
    if np.any(np.diff(r) <= 0):
        raise DomainError("schedule must be strictly increasing")
    prof = _profile(G)
    if math.sinh(r[0]) <= prof.rho_plus:
        raise DomainError(f"schedule starts inside the inner boundary (r={r[0]})")

    if getattr(prof, "m", None) == 0.0:
        samples = [(float(x), 0.0) for x in r]
        return MassReport(samples, 0.0, True, math.nan)

    s = np.array([mass_integrand(prof, x) for x in r])
    samples = [(float(a), float(b)) for a, b in zip(r, s)]
    scale = 1.0 + float(np.max(np.abs(s)))
    floor = 64 * np.finfo(float).eps * scale
    notes = []

    tail = s[-3:]
    if abs(tail[2] - tail[1]) <= floor and abs(tail[1] - tail[0]) <= floor:
        mass = float(tail[2])
        ok = True
    else:
        est = _extrapolate(r[-3:], tail)
        if est is None:
            msg = "non-monotone tail: extrapolation skipped, using last sample"
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
            notes.append(msg)
            mass = float(tail[2])
            ok = False
        else:
            mass = float(est)
            ok = abs(tail[2] - tail[1]) <= rel_tol * (1.0 + abs(mass))
    slope = _tail_slope(r, s, mass, floor)
    return MassReport(samples, mass, bool(ok), slope, notes)
