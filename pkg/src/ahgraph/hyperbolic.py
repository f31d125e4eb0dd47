"""Geometry of hyperbolic space H^n and the warped ambient H^{n+1} = H^n x_V R.

Radii named ``r`` are geodesic distances from the origin; ``rho`` denotes the
areal coordinate ``sinh(r)`` unless a docstring says otherwise.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .quadrature import DEFAULT_QUADRATURE


def omega(n):
    """Volume of the unit (n-1)-sphere, ``2 pi^(n/2) / Gamma(n/2)``."""
    if int(n) != n or n < 2:
        raise DomainError(f"omega needs an integer n >= 2, got {n}")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def _check_dim(n):
    if int(n) != n or n < 3:
        raise DomainError(f"dimension must be an integer >= 3, got {n}")


def sphere_area(n, r):
    """Area of the geodesic sphere of radius ``r`` in H^n."""
    _check_dim(n)
    if r < 0:
        raise DomainError(f"radius must be non-negative, got {r}")
    return omega(n) * math.sinh(r) ** (n - 1)


def ball_volume(n, r, quad=DEFAULT_QUADRATURE):
    """Volume of the geodesic ball of radius ``r`` in H^n.

    Computed as ``omega(n) * int_0^r sinh(t)^(n-1) dt`` by quadrature.
    """
    _check_dim(n)
    if r < 0:
        raise DomainError(f"radius must be non-negative, got {r}")
    if r == 0:
        return 0.0
    val = quad.integrate(lambda t: np.sinh(t) ** (n - 1), 0.0, r)
    return omega(n) * val


def ball_volume_h3(r):
    """Closed form ``pi (sinh 2r - 2r)`` for n = 3."""
    return math.pi * (math.sinh(2.0 * r) - 2.0 * r)


def lapse(r):
    """Static potential ``V(r) = cosh(r)``."""
    return np.cosh(r)


def lapse_from_rho(rho):
    """``V`` in the areal coordinate, ``sqrt(1 + rho^2)``."""
    return np.sqrt(1.0 + np.square(rho))


def ambient_metric(r):
    """Diagonal coefficients ``(b_rr, b_sphere, b_ss)`` of ``b + V^2 ds^2`` at ``r``.

    ``b_sphere`` multiplies the unit round metric on S^{n-1}.
    """
    return 1.0, math.sinh(r) ** 2, math.cosh(r) ** 2


@dataclass(frozen=True)
class HyperbolicSpace:
    """H^n, n >= 3, with convenience accessors."""

    n: int

    def __post_init__(self):
        _check_dim(self.n)

    @property
    def omega(self):
        return omega(self.n)

    def sphere_area(self, r):
        return sphere_area(self.n, r)

    def ball_volume(self, r, quad=DEFAULT_QUADRATURE):
        return ball_volume(self.n, r, quad)

    def isoperimetric_slack(self, r):
        """``area(S_r)/(n-1) - vol(B_r)``; non-negative for curvature -1."""
        return self.sphere_area(r) / (self.n - 1) - self.ball_volume(r)
