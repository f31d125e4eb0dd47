import math

import numpy as np
import pytest
import mpmath as mp
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from ahgraph.errors import DomainError, UnsupportedProfileError
from ahgraph.graph import (AdSSchwarzschildProfile, TabulatedProfile, ads_schwarzschild,
                           check_admissibility, gradient_decay, horizon_radius,
                           load_profile_table, scalar_curvature)
from ahgraph.levels import height_h0


def _mp_setup(n, m):
    mp.mp.dps = 40
    rp = mp.findroot(lambda x: x**n + x ** (n - 2) - 2 * m, horizon_radius(n, m))

    def integrand(u):
        # N = (x - rp) Q(x) with Q summed exactly, so nothing cancels
        x = rp + u * u
        q = sum(x**k * rp ** (j - 1 - k) for j in (n, n - 2) for k in range(j))
        return 2 * mp.sqrt(2 * m / q) / (1 + x * x)

    return rp, integrand


def _f_oracle(n, m, rho):
    rp, integrand = _mp_setup(n, m)
    return float(mp.quad(integrand, [0, mp.sqrt(rho - rp)]))


def _sympy_curvature(n, m, rho_values):
    """Scalar curvature of diag(A, rho^2 * round) from the Christoffel symbols."""
    rho = sp.Symbol("rho", positive=True)
    th = sp.symbols(f"t1:{n}")
    coords = (rho,) + th
    m_ = sp.Rational(m).limit_denominator(10**6)
    fp = sp.sqrt(2 * m_ / (rho**n + rho ** (n - 2) - 2 * m_)) / (1 + rho**2)
    A = 1 / (1 + rho**2) + (1 + rho**2) * fp**2
    diag = [A]
    warp = rho**2
    for k in range(n - 1):
        diag.append(warp)
        warp = warp * sp.sin(th[k]) ** 2
    g = sp.diag(*diag)
    ginv = sp.diag(*[1 / d for d in diag])
    dim = n
    gamma = [[[sum(ginv[a, d] * (sp.diff(g[d, b], coords[c]) + sp.diff(g[d, c], coords[b])
                                  - sp.diff(g[b, c], coords[d])) for d in range(dim)) / 2
               for c in range(dim)] for b in range(dim)] for a in range(dim)]

    def ricci(b, c):
        return sum(sp.diff(gamma[a][b][c], coords[a]) - sp.diff(gamma[a][b][a], coords[c])
                   + sum(gamma[a][a][d] * gamma[d][b][c] - gamma[a][c][d] * gamma[d][b][a]
                         for d in range(dim)) for a in range(dim))

    R = sum(ginv[b, b] * ricci(b, b) for b in range(dim))
    subs = {t: sp.Rational(7, 10) + k for k, t in enumerate(th)}
    func = sp.lambdify(rho, R.subs(subs), "mpmath")
    return [float(func(sp.Float(x, 40))) for x in rho_values]


@pytest.mark.parametrize("n, m", [(3, 0.5), (4, 0.25)])
def test_curvature_matches_symbolic_oracle(n, m):
    G = ads_schwarzschild(n, m)
    radii = [G.rho_plus * 1.01, G.rho_plus + 0.5, 3.0, 20.0]
    expected = _sympy_curvature(n, m, radii)
    got = [scalar_curvature(G, x) for x in radii]
    assert got == pytest.approx(expected, rel=1e-9)
    assert got == pytest.approx([-n * (n - 1)] * len(radii), rel=1e-9)


@pytest.mark.parametrize("n, m, expected", [(3, 1.0, 1.0), (4, 1.0, 1.0), (5, 1.0, 1.0)])
def test_horizon_radius_unit_cases(n, m, expected):
    # rho^n + rho^(n-2) = 2 has the root rho = 1 for every n
    assert horizon_radius(n, m) == pytest.approx(expected, rel=1e-15)


@given(st.integers(3, 6), st.floats(1e-6, 50.0))
def test_horizon_radius_is_a_root(n, m):
    rp = horizon_radius(n, m)
    assert abs(rp**n + rp ** (n - 2) - 2 * m) <= 1e-12 * max(1.0, 2 * m)


@pytest.mark.parametrize("n, m", [(3, 0.1), (3, 1.0), (4, 0.5), (5, 0.3)])
def test_profile_matches_quadrature_oracle(n, m):
    prof = AdSSchwarzschildProfile(n, m)
    for rho in (prof.rho_plus + 1e-6, prof.rho_plus + 0.3, 2.0, 10.0, 1e3):
        assert prof.f(rho) == pytest.approx(_f_oracle(n, m, rho), rel=1e-11)


@pytest.mark.parametrize("n, m", [(3, 0.5), (5, 1.0)])
def test_sup_matches_improper_integral(n, m):
    prof = AdSSchwarzschildProfile(n, m)
    rp, integrand = _mp_setup(n, m)
    total = mp.quad(integrand, [0, 1, 10, mp.inf])
    assert prof.sup_f == pytest.approx(float(total), rel=1e-12)


def test_vectorized_profile_agrees_with_scalar():
    prof = AdSSchwarzschildProfile(3, 0.5)
    rho = prof.rho_plus + np.geomspace(1e-10, 1e4, 60)
    scalar = np.array([prof.f(float(x)) for x in rho])
    assert np.allclose(prof.f_many(rho), scalar, rtol=1e-12, atol=1e-15)
    delta = np.geomspace(1e-12, 0.5, 20)
    off = np.array([prof.f_offset(float(d)) for d in delta])
    assert np.allclose(prof.f_offset_many(delta), off, rtol=1e-12, atol=1e-16)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_gradient_decay_law(n):
    # V^2 |grad f|^2 rho^n -> 2m
    m = 0.7
    G = ads_schwarzschild(n, m)
    rho = np.array([1e2, 1e3, 1e4])
    scaled = gradient_decay(G, rho) * rho**n
    assert scaled[-1] == pytest.approx(2 * m, rel=1e-7)
    assert np.all(np.diff(np.abs(scaled - 2 * m)) < 0)


@given(st.floats(0.01, 2.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_profile_increasing_and_bounded(m, a, b):
    prof = AdSSchwarzschildProfile(3, m)
    lo, hi = sorted((a, b))
    x1 = prof.rho_plus + 100 * lo**3
    x2 = prof.rho_plus + 100 * hi**3
    assert prof.f(x1) <= prof.f(x2) + 1e-15
    assert prof.f(x2) <= prof.sup_f + 1e-15


def test_massless_member_is_flat_and_entire():
    G = ads_schwarzschild(3, 0.0)
    assert G.profile.is_entire
    assert G.profile.f(5.0) == 0.0 and G.profile.sup_f == 0.0
    assert scalar_curvature(G, 1.0) == pytest.approx(-6.0)


def test_admissibility_of_default_and_explicit_constants():
    assert check_admissibility(ads_schwarzschild(3, 0.5)).all_ok
    # rho0 = 2 keeps the horizon inside B(rho0/2)
    assert check_admissibility(ads_schwarzschild(3, 1.0, rho0=2.0)).all_ok
    rep = check_admissibility(ads_schwarzschild(3, 1.0, rho0=1.0))
    assert not rep.inner_ball_ok and not rep.all_ok


def test_undersized_gamma_is_flagged():
    G = ads_schwarzschild(3, 0.5)
    bad = ads_schwarzschild(3, 0.5, rho0=G.rho0, gamma=0.1 * G.gamma, depth_D=G.depth_D)
    assert not check_admissibility(bad).decay_ok


def test_invalid_arguments():
    with pytest.raises(DomainError):
        ads_schwarzschild(2, 0.5)
    with pytest.raises(DomainError):
        ads_schwarzschild(3, -0.1)
    prof = AdSSchwarzschildProfile(3, 0.5)
    with pytest.raises(DomainError):
        prof.f(0.5 * prof.rho_plus)
    with pytest.raises(DomainError):
        scalar_curvature(prof, prof.rho_plus)


def test_tabulated_profile_round_trip(tmp_path):
    prof = AdSSchwarzschildProfile(3, 0.5)
    rho = prof.rho_plus + np.geomspace(1e-8, 50.0, 400)
    rho = np.concatenate([[prof.rho_plus], rho])
    f = prof.f_many(rho)
    path = tmp_path / "table.txt"
    np.savetxt(path, np.column_stack([rho, f]), header="rho f")
    tab = load_profile_table(path, 3)
    assert tab.kind == "tabulated" and tab.is_monotone()
    mid = np.array([1.0, 2.0, 10.0])
    assert np.allclose(tab.f(mid), prof.f_many(mid), rtol=1e-5)


def test_non_monotone_table_is_rejected_by_level_geometry():
    rho = np.linspace(1.0, 5.0, 9)
    f = np.sin(rho)
    tab = TabulatedProfile(3, rho, f)
    assert not tab.is_monotone()
    with pytest.raises(UnsupportedProfileError):
        height_h0(tab, 0.1)


def test_entire_profile_admissibility():
    G = ads_schwarzschild(3, 0.0, rho0=1.0, gamma=2.0, depth_D=1.0)
    rep = check_admissibility(G)
    assert rep.entire and rep.all_ok
    assert rep.decay_margin == pytest.approx(4.0)
