"""Volumes of Omega(rho), the estimates that bound them, and a flat filling.

Radii passed as ``rho_r`` (and ``rho0``) are geodesic radii in H^n.  The
ambient ball radius ``rho_bar`` of the flat filling is in the areal
coordinate, matching ``B(rho_bar) = {sinh(r)^2 + cosh(r)^2 s^2 <= rho_bar^2}``.
"""

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, OutOfHypothesisError
from .graph import _profile
from .hyperbolic import ball_volume, omega, sphere_area
from .levels import height_h0, invert_profile
from .quadrature import DEFAULT_QUADRATURE

log = logging.getLogger(__name__)


def _graph_volume_density(prof):
    """Integrand in ``u`` (``rho = rho_plus + u^2``) of the graph n-volume."""
    n = prof.n

    def integrand(u):
        u = np.asarray(u, dtype=float)
        rho = prof.rho_plus + u * u
        p = 1.0 + rho * rho
        return 2.0 * rho ** (n - 1) * np.sqrt(u * u / p + p * prof.df_u(u) ** 2)

    return integrand


def _graph_volume(prof, u_lo, u_hi, quad):
    if u_hi <= u_lo:
        return 0.0
    return omega(prof.n) * quad.integrate(_graph_volume_density(prof), u_lo, u_hi)


def _check_radius(prof, rho_r):
    if rho_r < prof.r_plus * (1.0 + 1e-9) or rho_r <= 0:
        raise DomainError(f"radius {rho_r} does not clear the inner boundary r+={prof.r_plus}")


def omega_volume(G, rho_r, quad=DEFAULT_QUADRATURE):
    """n-volume of the graph over ``B^b(rho_r) \\ U``."""
    prof = _profile(G)
    _check_radius(prof, rho_r)
    top = math.sinh(rho_r)
    return _graph_volume(prof, 0.0, math.sqrt(top - prof.rho_plus), quad)


def split_radius(prof, h0):
    """Areal radius of the level ``f = h0`` (clamped to the profile range)."""
    if h0 <= 0.0:
        return prof.rho_plus
    if h0 >= prof.sup_f:
        return math.inf
    return invert_profile(prof, h0)


def omega_volume_split(G, rho_r, h0, quad=DEFAULT_QUADRATURE):
    """Volumes of the parts of Omega(rho_r) below and above the height ``h0``."""
    prof = _profile(G)
    _check_radius(prof, rho_r)
    top = math.sinh(rho_r)
    cut = min(split_radius(prof, h0), top)
    u_cut = math.sqrt(cut - prof.rho_plus)
    u_top = math.sqrt(top - prof.rho_plus)
    return _graph_volume(prof, 0.0, u_cut, quad), _graph_volume(prof, u_cut, u_top, quad)


def diameter_bound(rho0, gamma, depth_D, rho):
    """``2D + 2(rho - rho0) sqrt(1+gamma^2) + pi sinh(rho0) sqrt(1+gamma^2)``."""
    if rho < rho0:
        raise DomainError(f"rho={rho} must be at least rho0={rho0}")
    k = math.sqrt(1.0 + gamma * gamma)
    return 2.0 * depth_D + 2.0 * (rho - rho0) * k + math.pi * math.sinh(rho0) * k


def annulus_lipschitz(rho0, rho, gamma):
    """``max(1, pi sinh(rho)/(rho - rho0/2)) sqrt(1+gamma^2)``."""
    if rho <= 0.5 * rho0:
        raise DomainError(f"rho={rho} must exceed rho0/2={0.5 * rho0}")
    return max(1.0, math.pi * math.sinh(rho) / (rho - 0.5 * rho0)) * math.sqrt(1.0 + gamma * gamma)


def boundary_area_bound(G, mass, rho):
    """``(bound, measured)`` for the area of the boundary of Omega(rho).

    The graph is radial, so Sigma(rho) is the sphere of radius ``rho`` with its
    b-area; the inner boundary contributes the horizon area.
    """
    prof = _profile(G)
    n = prof.n
    bound = 2.0 * omega(n) * mass + math.sqrt(1.0 + G.gamma**2) * sphere_area(n, rho)
    measured = omega(n) * prof.rho_plus ** (n - 1) + sphere_area(n, rho)
    return bound, measured


@dataclass
class VolumeBounds:
    lower: float
    upper: float
    certified_upper: float
    minus_bound: float
    plus_bound: float
    h0: float
    h0_minus_min: float
    D0: float
    c_audit: str = "C=1 stands in for an unstated constant; upper is a scaling check"


def volume_bounds(G, mass, rho_r, beta=2.0, quad=DEFAULT_QUADRATURE):
    """Lower and upper estimates for vol(Omega(rho_r)).

    ``upper`` substitutes ``D0`` for ``|h0 - min f|`` and sets the unknown
    height constant to 1.  ``certified_upper`` instead uses the exact
    ``max f - h0`` and ``|h0 - min f|`` over the ball, so it is a proven
    inequality for every member.
    """
    if mass >= 1.0:
        raise OutOfHypothesisError(f"volume estimates need mass < 1, got {mass}")
    prof = _profile(G)
    n = prof.n
    ball = ball_volume(n, rho_r, quad)
    vol_u = ball_volume(n, prof.r_plus, quad) if not prof.is_entire else 0.0
    lower = ball - vol_u
    d0 = diameter_bound(G.rho0, G.gamma, G.depth_D, max(rho_r, G.rho0))
    if mass == 0.0:
        return VolumeBounds(ball, ball, ball, 0.0, ball, prof.sup_f, 0.0, d0)
    hr = height_h0(prof, mass, beta)
    h0 = hr.h0
    w = omega(n)
    cn = 1.0 / (n - 1)
    ch = math.cosh(rho_r)
    area = sphere_area(n, rho_r)
    upper = ball + mass ** (1.0 / (n - 2)) * ch * area + 2.0 * beta * w * mass * (cn + ch * d0)

    f_min = 0.0
    f_max = float(prof.f(math.sinh(rho_r)))
    h0_minus_min = abs(h0 - f_min)
    minus_bound = 2.0 * beta * w * mass * (cn + ch * h0_minus_min)
    plus_bound = ball + ch * area * max(0.0, f_max - h0)
    return VolumeBounds(lower, upper, minus_bound + plus_bound, minus_bound, plus_bound,
                        h0, h0_minus_min, d0)


# -- flat filling --------------------------------------------------------------

def _vertical_extent(rho, rho_bar):
    """Half-height ``S(rho)`` of the ambient ball above the point ``rho``."""
    return np.sqrt(np.maximum(rho_bar**2 - np.square(rho), 0.0) / (1.0 + np.square(rho)))


def _profile_values(prof, rho):
    return np.asarray(prof.f_many(np.asarray(rho, dtype=float)), dtype=float)


def _sign_changes(func, lo, hi, samples=257):
    grid = np.linspace(lo, hi, samples)
    vals = np.array([func(x) for x in grid])
    roots = []
    for i in range(samples - 1):
        if vals[i] == 0.0:
            roots.append(grid[i])
        elif vals[i] * vals[i + 1] < 0:
            roots.append(brentq(func, grid[i], grid[i + 1], xtol=1e-14, rtol=1e-14))
    return roots


def _lateral_band_area(prof, h0, rho_bar, quad):
    """Area of the part of the ball boundary lying between slice and graph."""
    n = prof.n
    rb2 = rho_bar * rho_bar

    def rho_of(s):
        return math.sqrt(max(rb2 - s * s, 0.0) / (1.0 + s * s))

    def gap(s):
        # positive where the boundary point at height s lies in the filling
        rho = rho_of(s)
        if rho < prof.rho_plus:
            return -1.0
        val = float(prof.f(rho)) - h0
        return s * (val - s) if s != 0 else 0.0

    def density(s):
        s = np.asarray(s, dtype=float)
        rho = np.sqrt(np.maximum(rb2 - s * s, 0.0) / (1.0 + s * s))
        p = 1.0 + rho * rho
        # d rho / ds along the boundary
        drho = -s * (1.0 + rb2) / ((1.0 + s * s) ** 2 * np.maximum(rho, 1e-300))
        return rho ** (n - 1) * np.sqrt(drho * drho / p + p)

    total = 0.0
    f_top = prof.sup_f - h0
    f_bot = -h0
    for lo, hi in ((0.0, max(f_top, 0.0)), (min(f_bot, 0.0), 0.0)):
        if hi - lo <= 0:
            continue
        hi_c = min(hi, rho_bar)
        lo_c = max(lo, -rho_bar)
        roots = _sign_changes(gap, lo_c, hi_c)
        edges = sorted(set([lo_c, hi_c] + roots))
        for a, b in zip(edges[:-1], edges[1:]):
            mid = 0.5 * (a + b)
            if mid != 0.0 and gap(mid) > 0:
                total += quad.integrate(density, a, b)
    return omega(n) * total


@dataclass
class FlatFilling:
    mass_A: float
    mass_B: float
    disk: float
    wall: float
    band: float

    @property
    def total(self):
        return self.mass_A + self.mass_B


def flat_filling(G, mass, rho_bar, beta=2.0, h0=None, quad=DEFAULT_QUADRATURE):
    """Explicit filling ``A + dB = graph(f - h0) - slice`` inside ``B(rho_bar)``."""
    prof = _profile(G)
    n = prof.n
    if mass == 0.0 or (prof.is_entire and getattr(prof, "m", None) == 0.0):
        return FlatFilling(0.0, 0.0, 0.0, 0.0, 0.0)
    if h0 is None:
        h0 = height_h0(prof, mass, beta).h0
        warnings.warn("profile normalized to h0 = 0 before building the filling",
                      RuntimeWarning, stacklevel=2)
    if rho_bar <= prof.rho_plus:
        raise DomainError("ambient ball does not reach past the inner boundary")
    w = omega(n)

    def clipped(rho):
        rho = np.asarray(rho, dtype=float)
        s = _vertical_extent(rho, rho_bar)
        return np.abs(np.clip(_profile_values(prof, rho) - h0, -s, s))

    def excess(sign):
        return lambda x: float(prof.f(x)) - h0 - sign * float(_vertical_extent(x, rho_bar))

    breaks = [split_radius(prof, h0)]
    for sign in (1.0, -1.0):
        breaks += _sign_changes(excess(sign), prof.rho_plus, rho_bar, samples=65)
    u_breaks = [math.sqrt(b - prof.rho_plus) for b in breaks
                if prof.rho_plus < b < rho_bar]

    def vol_integrand(u):
        u = np.asarray(u, dtype=float)
        rho = prof.rho_plus + u * u
        return 2.0 * u * rho ** (n - 1) * clipped(rho)

    mass_b = w * quad.integrate(vol_integrand, 0.0, math.sqrt(rho_bar - prof.rho_plus),
                                breakpoints=u_breaks)
    disk = ball_volume(n, prof.r_plus, quad) if not prof.is_entire else 0.0
    s_plus = float(_vertical_extent(prof.rho_plus, rho_bar))
    wall = w * prof.rho_plus ** (n - 1) * math.sqrt(1.0 + prof.rho_plus**2) * min(abs(h0), s_plus)
    band = _lateral_band_area(prof, h0, rho_bar, quad)
    return FlatFilling(disk + wall + band, mass_b, disk, wall, band)


def flat_distance_bound(G, mass, rho_bar, beta=2.0, h0=None, quad=DEFAULT_QUADRATURE):
    """``M(A) + M(B)`` for the explicit filling; an upper bound on flat distance."""
    return flat_filling(G, mass, rho_bar, beta, h0, quad).total


@dataclass
class RegionReport:
    rho: float
    vol_omega: float
    vol_ball: float
    upper_bound: float
    certified_upper: float
    lower_bound: float
    vol_minus: float
    vol_plus: float
    split_error: float
    D0: float
    C0: float
    C0_measured: float
    gamma_lip: float
    flat_bound: float
    all_bounds_hold: bool
    eq_upper_holds: bool
    in_hypothesis: bool = True


def region_report(G, mass, rho_r, rho_bar, beta=2.0, quad=DEFAULT_QUADRATURE):
    """Evaluate every region estimate for one member.

    For ``mass >= 1`` the volume bounds are out of hypothesis: their fields
    are NaN and ``in_hypothesis`` is False, the rest is still computed.
    """
    prof = _profile(G)
    vol = omega_volume(G, rho_r, quad)
    ball = ball_volume(prof.n, rho_r, quad)
    h0 = height_h0(prof, mass, beta).h0
    try:
        vb = volume_bounds(G, mass, rho_r, beta, quad)
        inside = True
    except OutOfHypothesisError:
        d0 = diameter_bound(G.rho0, G.gamma, G.depth_D, max(rho_r, G.rho0))
        vb = VolumeBounds(math.nan, math.nan, math.nan, math.nan, math.nan, h0, math.nan, d0)
        inside = False
    minus, plus = omega_volume_split(G, rho_r, h0, quad)
    split_err = abs(minus + plus - vol)
    c0, c0_meas = boundary_area_bound(G, mass, rho_r)
    lip = annulus_lipschitz(G.rho0, rho_r, G.gamma)
    flat = flat_distance_bound(G, mass, rho_bar, beta, h0=h0, quad=quad)
    slack = 1e-10 * (1.0 + vol)
    ok = (inside and vb.lower - slack <= vol <= vb.certified_upper + slack
          and c0_meas <= c0 and split_err <= 1e-8)
    return RegionReport(
        rho=rho_r, vol_omega=vol, vol_ball=ball, upper_bound=vb.upper,
        certified_upper=vb.certified_upper, lower_bound=vb.lower, vol_minus=minus,
        vol_plus=plus, split_error=split_err, D0=vb.D0, C0=c0, C0_measured=c0_meas,
        gamma_lip=lip, flat_bound=flat, all_bounds_hold=bool(ok),
        eq_upper_holds=bool(inside and vol <= vb.upper + slack), in_hypothesis=inside,
    )
