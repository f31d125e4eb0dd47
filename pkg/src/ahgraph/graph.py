"""Rotationally symmetric graphs f: H^n \\ U -> R inside H^{n+1}.

Profiles are functions of the areal coordinate ``rho = sinh(r)``.  In these
coordinates the base metric is ``b = drho^2/(1+rho^2) + rho^2 sigma`` and the
induced graph metric is ``g = A(rho) drho^2 + rho^2 sigma`` with
``A = 1/(1+rho^2) + (1+rho^2) f'(rho)^2``.

Integrals that start at the inner boundary use ``rho = rho_plus + u^2``; the
profile supplies ``u * f'(rho_plus + u^2)`` directly (``df_u``) so the
inverse square-root blow-up of ``f'`` never has to be evaluated.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import DomainError, NumericalError
from .hyperbolic import omega
from .quadrature import DEFAULT_QUADRATURE

log = logging.getLogger(__name__)

MIN_BOUNDARY_THRESHOLD = 1e6


class RadialProfile:
    """Base class for radial graph functions.

    Subclasses provide ``df`` and may override ``df_u``, ``f_offset`` and
    ``d2f`` with more accurate closed forms.
    """

    kind = "abstract"

    def __init__(self, n, rho_plus, quad=DEFAULT_QUADRATURE):
        if int(n) != n or n < 3:
            raise DomainError(f"dimension must be an integer >= 3, got {n}")
        if rho_plus < 0:
            raise DomainError("rho_plus must be non-negative")
        self.n = int(n)
        self.rho_plus = float(rho_plus)
        self.quad = quad

    # -- evaluators ---------------------------------------------------------
    def df(self, rho):
        raise NotImplementedError

    def d2f(self, rho):
        """Second derivative; ``None`` means the caller must difference ``df``."""
        return None

    def df_u(self, u):
        u = np.asarray(u, dtype=float)
        return u * self.df(self.rho_plus + u * u)

    def f_offset(self, delta):
        """``f(rho_plus + delta)`` for scalar ``delta >= 0``."""
        if delta < 0:
            raise DomainError("offset below the inner boundary")
        if delta == 0:
            return 0.0
        return self.quad.integrate(lambda u: 2.0 * self.df_u(u), 0.0, math.sqrt(delta))

    def f_offset_many(self, delta):
        """``f_offset`` on an array of offsets."""
        delta = np.asarray(delta, dtype=float)
        return np.array([self.f_offset(float(x)) for x in np.ravel(delta)]).reshape(delta.shape)

    def f_many(self, rho):
        """``f`` on an array of radii."""
        rho = np.asarray(rho, dtype=float)
        return np.array([self.f(float(x)) for x in np.ravel(rho)]).reshape(rho.shape)

    def f(self, rho):
        if np.ndim(rho):
            return self.f_many(rho)
        if rho < self.rho_plus:
            raise DomainError(f"rho={rho} lies inside the inner boundary {self.rho_plus}")
        return self.f_offset(rho - self.rho_plus)

    @property
    def sup_f(self):
        raise NotImplementedError

    @property
    def is_entire(self):
        return self.rho_plus == 0.0

    @property
    def r_plus(self):
        return math.asinh(self.rho_plus)

    def is_monotone(self):
        raise NotImplementedError

    def gradient_decay(self, rho):
        """``V^2 |grad f|_b^2 = (1+rho^2)^2 f'(rho)^2``."""
        rho = np.asarray(rho, dtype=float)
        return (1.0 + rho * rho) ** 2 * self.df(rho) ** 2

    def radial_coefficient(self, rho):
        """``A(rho)``, the drho^2 coefficient of the induced metric."""
        p = 1.0 + np.square(rho)
        return 1.0 / p + p * self.df(rho) ** 2


class AdSSchwarzschildProfile(RadialProfile):
    """Graph realization of the spatial AdS-Schwarzschild metric of mass ``m``.

    With ``N(rho) = rho^n + rho^(n-2) - 2m`` the slope is
    ``f'(rho) = sqrt(2m / N(rho)) / (1 + rho^2)``, and ``N`` is evaluated as
    ``(rho - rho_plus) * Q(rho)`` so nothing cancels near the horizon.
    """

    kind = "closed_form"

    def __init__(self, n, m, quad=DEFAULT_QUADRATURE):
        if m < 0:
            raise DomainError(f"mass must be non-negative, got {m}")
        self.m = float(m)
        super().__init__(n, horizon_radius(n, m), quad)
        # split point for the far-field substitution u = split / w
        self._u_split = 1.0 + math.sqrt(self.rho_plus)

    def _q(self, delta):
        # N(rho_plus + delta) / delta, a sum of geometric series
        a = self.rho_plus + delta
        b = self.rho_plus
        out = np.zeros_like(a)
        for j in (self.n, self.n - 2):
            for k in range(j):
                out = out + a**k * b ** (j - 1 - k)
        return out

    def big_n(self, rho):
        rho = np.asarray(rho, dtype=float)
        delta = rho - self.rho_plus
        return delta * self._q(delta)

    def df(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.m == 0.0:
            return np.zeros_like(rho)
        return np.sqrt(2.0 * self.m / self.big_n(rho)) / (1.0 + rho * rho)

    def df_u(self, u):
        u = np.asarray(u, dtype=float)
        if self.m == 0.0:
            return np.zeros_like(u)
        delta = u * u
        rho = self.rho_plus + delta
        return np.sqrt(2.0 * self.m / self._q(delta)) / (1.0 + rho * rho)

    def d2f(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.m == 0.0:
            return np.zeros_like(rho)
        n = self.n
        dn = n * rho ** (n - 1) + (n - 2) * rho ** (n - 3)
        ratio = -0.5 * dn / self.big_n(rho) - 2.0 * rho / (1.0 + rho * rho)
        return self.df(rho) * ratio

    def gradient_decay(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.m == 0.0:
            return np.zeros_like(rho)
        return 2.0 * self.m / self.big_n(rho)

    def _tail_integrand(self, w):
        # 2 df_u(u) du with u = u_split / w
        s = self._u_split
        w = np.asarray(w, dtype=float)
        out = np.zeros_like(w)
        pos = w > 0
        out[pos] = 2.0 * self.df_u(s / w[pos]) * s / w[pos] ** 2
        return out

    def _tail(self, w_lo):
        # int_{u_split/w_lo}^{inf} 2 df_u(u) du
        return self.quad.integrate(self._tail_integrand, 0.0, w_lo)

    @cached_property
    def _head_total(self):
        return self.quad.integrate(lambda u: 2.0 * self.df_u(u), 0.0, self._u_split)

    def f_offset(self, delta):
        if self.m == 0.0:
            return 0.0
        if delta < 0:
            raise DomainError("offset below the inner boundary")
        u = math.sqrt(delta)
        if u <= self._u_split:
            if u == 0.0:
                return 0.0
            return self.quad.integrate(lambda x: 2.0 * self.df_u(x), 0.0, u)
        return self.sup_f - self._tail(self._u_split / u)

    def f_offset_many(self, delta, panels=8):
        """Vectorized ``f_offset`` for small offsets (``sqrt(delta) <= u_split``)."""
        delta = np.asarray(delta, dtype=float)
        if self.m == 0.0:
            return np.zeros_like(delta)
        u = np.sqrt(delta)
        if np.any(u > self._u_split):
            raise DomainError("f_offset_many is restricted to the near-horizon range")
        return self.quad.integrate_from(lambda x: 2.0 * self.df_u(x), 0.0, u, panels=panels)

    def f_many(self, rho, panels=8):
        """Vectorized ``f`` using fixed composite rules on both sides of the split."""
        rho = np.asarray(rho, dtype=float)
        if self.m == 0.0:
            return np.zeros_like(rho)
        if np.any(rho < self.rho_plus):
            raise DomainError("rho lies inside the inner boundary")
        flat = rho.ravel()
        u = np.sqrt(flat - self.rho_plus)
        out = np.empty_like(u)
        near = u <= self._u_split
        if np.any(near):
            out[near] = self.quad.integrate_from(lambda x: 2.0 * self.df_u(x), 0.0, u[near], panels=panels)
        far = ~near
        if np.any(far):
            tail = self.quad.integrate_from(self._tail_integrand, 0.0, self._u_split / u[far], panels=panels)
            out[far] = self.sup_f - tail
        return out.reshape(rho.shape)

    @cached_property
    def sup_f(self):
        if self.m == 0.0:
            return 0.0
        return self._head_total + self._tail(1.0)

    def is_monotone(self):
        return True


class TabulatedProfile(RadialProfile):
    """Profile interpolated from samples by monotone cubic (PCHIP) interpolation.

    The first abscissa is the inner radius.  Beyond the last sample the
    profile is continued as a constant.
    """

    kind = "tabulated"

    def __init__(self, n, rho, f, df=None, quad=DEFAULT_QUADRATURE):
        rho = np.asarray(rho, dtype=float)
        f = np.asarray(f, dtype=float)
        if rho.ndim != 1 or rho.size < 4 or rho.shape != f.shape:
            raise DomainError("table needs at least 4 matching (rho, f) samples")
        if np.any(np.diff(rho) <= 0):
            raise DomainError("rho grid must be strictly increasing")
        super().__init__(n, rho[0], quad)
        self.rho_grid = rho
        self.f_grid = f
        self.df_grid = None if df is None else np.asarray(df, dtype=float)
        self._f = PchipInterpolator(rho, f, extrapolate=False)
        if df is None:
            self._df = self._f.derivative()
        else:
            finite = np.isfinite(self.df_grid)
            self._df = PchipInterpolator(rho[finite], self.df_grid[finite], extrapolate=False)
            self._df_lo = rho[finite][0]

    def df(self, rho):
        rho = np.asarray(rho, dtype=float)
        out = np.zeros_like(rho)
        inside = rho <= self.rho_grid[-1]
        out[inside] = self._df(rho[inside])
        if self.df_grid is not None:
            # between rho_plus and the first finite slope sample
            below = inside & (rho < self._df_lo)
            out[below] = np.inf
        return out

    def f(self, rho):
        rho = np.asarray(rho, dtype=float)
        if np.any(rho < self.rho_plus):
            raise DomainError("rho lies inside the inner boundary")
        out = np.where(rho <= self.rho_grid[-1], self._f(np.minimum(rho, self.rho_grid[-1])), self.f_grid[-1])
        return float(out) if out.ndim == 0 else out

    def f_offset(self, delta):
        return float(self.f(self.rho_plus + delta)) - float(self.f_grid[0])

    @property
    def sup_f(self):
        return float(np.max(self.f_grid))

    def is_monotone(self):
        if np.any(np.diff(self.f_grid) < 0):
            return False
        if self.df_grid is not None:
            vals = self.df_grid[np.isfinite(self.df_grid)]
            if np.any(vals < 0):
                return False
        return True


def horizon_radius(n, m):
    """Largest root of ``rho^n + rho^(n-2) - 2m`` (0 when m = 0)."""
    if int(n) != n or n < 3:
        raise DomainError(f"dimension must be an integer >= 3, got {n}")
    if m < 0:
        raise DomainError("mass must be non-negative")
    if m == 0:
        return 0.0

    def poly(x):
        return x**n + x ** (n - 2) - 2.0 * m

    hi = max(1.0, (2.0 * m) ** (1.0 / n)) * 2.0
    try:
        root = brentq(poly, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    except (ValueError, RuntimeError) as exc:
        raise NumericalError(f"horizon root for n={n}, m={m} failed: {exc}") from exc
    # one Newton step polishes the last ulp
    d = n * root ** (n - 1) + (n - 2) * root ** (n - 3)
    polished = root - poly(root) / d
    if abs(poly(polished)) <= abs(poly(root)):
        root = polished
    if abs(poly(root)) > 1e-12 * max(1.0, 2.0 * m):
        raise NumericalError("horizon root residual too large", residual=abs(poly(root)))
    return root


@dataclass(frozen=True)
class GraphManifold:
    """A radial graph together with its class constants.

    ``rho0`` is a geodesic radius (same convention as ``r``); ``gamma`` bounds
    ``V |grad f|`` beyond ``rho0/2`` and ``depth_D`` bounds the depth of
    ``Omega(rho0)``.
    """

    profile: RadialProfile
    rho0: float
    gamma: float
    depth_D: float
    assumptions: tuple = field(default=("balanced chart", "upward mean curvature"))

    @property
    def n(self):
        return self.profile.n

    @property
    def rho_plus(self):
        return self.profile.rho_plus

    @property
    def r_plus(self):
        return self.profile.r_plus

    def induced_metric(self, rho):
        """``(g_rhorho, g_sphere)`` of the induced metric at areal radius ``rho``."""
        return float(self.profile.radial_coefficient(rho)), rho * rho


def radial_depth(profile, rho0_r, quad=DEFAULT_QUADRATURE):
    """Length of the radial graph curve from the inner boundary to ``r = rho0_r``."""
    top = math.sinh(rho0_r)
    if top <= profile.rho_plus:
        raise DomainError("rho0 does not enclose the inner boundary")

    def integrand(u):
        u = np.asarray(u, dtype=float)
        p = 1.0 + (profile.rho_plus + u * u) ** 2
        return 2.0 * np.sqrt(u * u / p + p * profile.df_u(u) ** 2)

    return quad.integrate(integrand, 0.0, math.sqrt(top - profile.rho_plus))


def sup_gradient_decay(profile, r_from, samples=400):
    """Sampled supremum of ``V^2 |grad f|^2`` over ``r >= r_from``."""
    rho_lo = math.sinh(r_from)
    if rho_lo <= profile.rho_plus:
        return math.inf
    grid = rho_lo * np.geomspace(1.0, 1e6, samples)
    return float(np.max(profile.gradient_decay(grid)))


def class_constants(profile, rho_cap=None):
    """Default ``(rho0, gamma, depth_D)`` for a profile.

    ``rho0 = 2.2 r_plus`` (clamped to ``rho_cap``), ``gamma`` is 1.1 times the
    sampled sup of ``V |grad f|`` beyond ``rho0/2`` and ``depth_D`` is the
    radial graph length up to ``Sigma(rho0)``.
    """
    if profile.is_entire:
        rho0 = 0.5 * rho_cap if rho_cap else 1.0
    else:
        rho0 = 2.2 * profile.r_plus
        if rho_cap is not None:
            rho0 = min(rho0, rho_cap)
    gamma = 1.1 * math.sqrt(sup_gradient_decay(profile, 0.5 * rho0))
    depth = radial_depth(profile, rho0)
    return rho0, gamma, depth


def ads_schwarzschild(n, m, rho0=None, gamma=None, depth_D=None, quad=DEFAULT_QUADRATURE):
    """AdS-Schwarzschild graph of mass ``m`` with class constants.

    Missing constants are filled by :func:`class_constants`.
    """
    profile = AdSSchwarzschildProfile(n, m, quad)
    if rho0 is None or gamma is None or depth_D is None:
        d_rho0, d_gamma, d_depth = class_constants(profile)
        rho0 = d_rho0 if rho0 is None else rho0
        gamma = d_gamma if gamma is None else gamma
        depth_D = d_depth if depth_D is None else depth_D
    return GraphManifold(profile, float(rho0), float(gamma), float(depth_D))


def load_profile_table(path, n, quad=DEFAULT_QUADRATURE):
    """Read a whitespace table ``rho f [df]`` ('#' starts a comment)."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] not in (2, 3):
        raise DomainError(f"{path}: expected 2 or 3 columns, found {data.shape[1]}")
    df = data[:, 2] if data.shape[1] == 3 else None
    return TabulatedProfile(n, data[:, 0], data[:, 1], df, quad)


# -- pointwise geometry -------------------------------------------------------

def _profile(G):
    return G.profile if isinstance(G, GraphManifold) else G


def gradient_decay(G, rho):
    """``V^2 |grad^b f|_b^2`` at areal radius ``rho`` (scalar or array)."""
    prof = _profile(G)
    arr = np.asarray(rho, dtype=float)
    bad = (arr <= prof.rho_plus) if not prof.is_entire else (arr < 0)
    if np.any(bad):
        raise DomainError(f"rho={rho} is not outside the inner boundary {prof.rho_plus}")
    out = prof.gradient_decay(arr)
    return float(out) if out.ndim == 0 else out


def _five_point(func, x, h):
    return (func(x - 2 * h) - 8 * func(x - h) + 8 * func(x + h) - func(x + 2 * h)) / (12 * h)


def scalar_curvature(G, rho):
    """Scalar curvature of ``g = A drho^2 + rho^2 sigma`` at areal radius ``rho``.

    For this warped form ``R = (n-1)/rho^2 [ (n-2)(1 - 1/A) + rho A'/A^2 ]``.
    ``A'`` comes from the profile's ``d2f`` or, failing that, a five-point
    difference of ``df``.
    """
    prof = _profile(G)
    n = prof.n
    if rho <= prof.rho_plus:
        raise DomainError(f"rho={rho} is not outside the inner boundary")
    p = 1.0 + rho * rho
    d1 = float(prof.df(rho))
    d2 = prof.d2f(rho)
    if d2 is None:
        h = min(1e-3 * max(rho, 1.0), 0.25 * (rho - prof.rho_plus))
        if h < 1e-12 * max(rho, 1.0):
            raise NumericalError(f"difference step underflow at rho={rho} (h={h:.3e})")
        d2 = _five_point(lambda x: float(prof.df(x)), rho, h)
    d2 = float(d2)
    a = 1.0 / p + p * d1 * d1
    da = -2.0 * rho / p**2 + 2.0 * rho * d1 * d1 + 2.0 * p * d1 * d2
    return (n - 1) / rho**2 * ((n - 2) * (1.0 - 1.0 / a) + rho * da / a**2)


@dataclass
class AdmissibilityReport:
    inner_ball_ok: bool
    inner_ball_margin: float
    decay_ok: bool
    decay_sup: float
    decay_margin: float
    minimal_boundary_ok: bool
    entire: bool
    monotone_ok: bool
    curvature_ok: bool
    curvature_margin: float
    assumptions: tuple

    @property
    def all_ok(self):
        return (
            self.inner_ball_ok
            and self.decay_ok
            and self.minimal_boundary_ok
            and self.monotone_ok
            and self.curvature_ok
        )


def check_admissibility(G, curvature_tol=1e-6):
    """Evaluate the class conditions that are checkable for a radial graph."""
    prof = G.profile
    n = prof.n
    r_plus = prof.r_plus
    inner_margin = 0.5 * G.rho0 - r_plus
    inner_ok = inner_margin > 0 or prof.is_entire

    dsup = sup_gradient_decay(prof, 0.5 * G.rho0) if inner_ok else math.inf
    decay_margin = G.gamma**2 - dsup
    decay_ok = decay_margin >= 0

    if prof.is_entire:
        minimal_ok = True
    else:
        scale = max(1.0, prof.rho_plus)
        probes = prof.rho_plus + scale * np.logspace(-2, -14, 13)
        with np.errstate(divide="ignore", invalid="ignore"):
            slopes = prof.df(probes)
        minimal_ok = bool(np.any(slopes > MIN_BOUNDARY_THRESHOLD))

    lo = prof.rho_plus * 1.01 if not prof.is_entire else 1e-2
    grid = np.geomspace(lo, max(100.0, 10 * lo), 60)
    monotone_ok = prof.is_monotone() and bool(np.all(prof.df(grid) >= 0))

    target = -n * (n - 1)
    try:
        curv = np.array([scalar_curvature(prof, x) for x in grid])
        curv_margin = float(np.min(curv - target))
    except NumericalError as exc:
        log.warning("curvature sampling failed: %s", exc)
        curv_margin = -math.inf
    curvature_ok = curv_margin >= -curvature_tol

    return AdmissibilityReport(
        inner_ball_ok=bool(inner_ok),
        inner_ball_margin=inner_margin,
        decay_ok=bool(decay_ok),
        decay_sup=dsup,
        decay_margin=decay_margin,
        minimal_boundary_ok=minimal_ok,
        entire=prof.is_entire,
        monotone_ok=monotone_ok,
        curvature_ok=bool(curvature_ok),
        curvature_margin=curv_margin,
        assumptions=G.assumptions,
    )


def omega_n(G):
    return omega(_profile(G).n)
