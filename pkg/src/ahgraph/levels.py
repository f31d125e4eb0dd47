"""Level sets of a radial graph: areas, the height h0 and the Penrose margin.

For a monotone radial profile the level set ``f = h`` is the sphere of
areal radius ``rho(h)`` and its b-area is ``omega(n) rho(h)^(n-1)``.
"""

import math
from dataclasses import dataclass

from .errors import DomainError, NotApplicableError, UnsupportedProfileError
from .graph import _profile
from .hyperbolic import ball_volume, omega, sphere_area

BISECT_MAX_ITER = 200
BISECT_TOL = 1e-12


def _require_monotone(prof):
    if not prof.is_monotone():
        raise UnsupportedProfileError("level geometry needs a non-decreasing profile")


def invert_profile(prof, h):
    """Areal radius where ``f = h`` for ``base < h < sup f``, by bisection.

    Bisects on ``u = sqrt(rho - rho_plus)``: ``f`` grows like ``u`` at the
    inner boundary, so a bracket tight in ``u`` is tight in ``f``.
    """
    _require_monotone(prof)
    base = prof.f(prof.rho_plus) if prof.kind == "tabulated" else 0.0
    if not base < h < prof.sup_f:
        raise DomainError(f"level {h} lies outside ({base}, {prof.sup_f})")

    def level(u):
        return base + prof.f_offset(u * u)

    lo = 0.0
    hi = 1.0
    while level(hi) <= h:
        lo = hi
        hi *= 2.0
        if hi > 1e75:
            raise DomainError(f"level {h} is not attained below rho=1e150")
    for _ in range(BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if level(mid) < h:
            lo = mid
        else:
            hi = mid
        if hi - lo <= BISECT_TOL * hi:
            break
    u = 0.5 * (lo + hi)
    return prof.rho_plus + u * u


def level_set_area(G, h):
    """b-area of ``f^{-1}(h)``; zero outside ``[0, sup f)``."""
    prof = _profile(G)
    _require_monotone(prof)
    n = prof.n
    if h < 0.0 or h >= prof.sup_f:
        return 0.0
    if h == 0.0:
        return omega(n) * prof.rho_plus ** (n - 1)
    return omega(n) * invert_profile(prof, h) ** (n - 1)


def perimeter_function(G, h):
    """Perimeter of the sublevel set ``{f_bar < h}``, with ``f_bar = 0`` on U.

    Equals the area of ``dU`` for ``h <= 0`` and is infinite for
    ``h >= sup f`` (the sublevel set is then unbounded).
    """
    prof = _profile(G)
    _require_monotone(prof)
    n = prof.n
    if h >= prof.sup_f:
        return math.inf
    if h <= 0.0:
        return omega(n) * prof.rho_plus ** (n - 1)
    return level_set_area(prof, h)


@dataclass
class HeightReport:
    beta: float
    mass: float
    h0: float
    sup_f: float
    gap: float
    gap_ratio: float
    threshold: float
    rho_h: float


def height_threshold(n, mass, beta):
    """``max(2 beta omega m^((n-1)/(n-2)), 2 beta omega m)``."""
    w = omega(n)
    return max(2.0 * beta * w * mass ** ((n - 1) / (n - 2)), 2.0 * beta * w * mass)


def height_h0(G, mass, beta=2.0):
    """Height below which every level set has area under the mass threshold."""
    if not beta > 1.0:
        raise DomainError(f"beta must exceed 1, got {beta}")
    if mass < 0.0:
        raise DomainError(f"mass must be non-negative, got {mass}")
    prof = _profile(G)
    _require_monotone(prof)
    n = prof.n
    sup_f = prof.sup_f
    threshold = height_threshold(n, mass, beta)
    if mass == 0.0:
        # every nonzero level qualifies, so clamp to sup f
        return HeightReport(beta, mass, sup_f, sup_f, 0.0, math.nan, 0.0, 0.0)
    rho_h = (threshold / omega(n)) ** (1.0 / (n - 1))
    h0 = float(prof.f(rho_h)) if rho_h > prof.rho_plus else 0.0
    gap = sup_f - h0
    ratio = gap / mass ** (1.0 / (n - 2))
    return HeightReport(beta, mass, h0, sup_f, gap, ratio, threshold, rho_h)


@dataclass
class PenroseMargins:
    margin: float
    weak_margin: float
    boundary_area: float
    bound: float


def penrose_check(G, mass):
    """Slack in ``vol(dU) <= 2 omega m / V(r0)`` with ``r0 = arcsinh(rho_plus)``.

    ``weak_margin`` drops the ``1/V(r0)`` factor.
    """
    prof = _profile(G)
    if prof.is_entire:
        raise NotApplicableError("no inner boundary: the Penrose bound does not apply")
    n = prof.n
    w = omega(n)
    area = w * prof.rho_plus ** (n - 1)
    v0 = math.sqrt(1.0 + prof.rho_plus**2)
    bound = 2.0 * w * mass / v0
    return PenroseMargins(bound - area, 2.0 * w * mass - area, area, bound)


def isoperimetric_check(n, rho):
    """``area(S_rho)/(n-1) - vol(B_rho)`` for geodesic radius ``rho``."""
    if not rho > 0:
        raise DomainError(f"radius must be positive, got {rho}")
    return sphere_area(n, rho) / (n - 1) - ball_volume(n, rho)
