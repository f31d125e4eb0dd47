import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from ahgraph.capping import (CapProfile, _eps_conditions, _fhat_factory, alpha_residual,
                             build_cap, c1_seam_check, cap_bounds, check_invariants, ramp,
                             ramp_prime, smooth_step, solve_alpha, solve_root,
                             verify_metric_lower_bound)
from ahgraph.errors import CapBuildError, DomainError
from ahgraph.graph import ads_schwarzschild

LAMBDAS = (0.5, 0.9, 0.99)


@pytest.fixture(scope="module")
def caps():
    G = ads_schwarzschild(3, 0.5)
    return {lam: build_cap(G, 2.0, 1.0, lam) for lam in LAMBDAS}


@given(st.floats(-1.0, 2.0), st.floats(-1.0, 2.0))
def test_smooth_step_is_monotone_step(a, b):
    lo, hi = sorted((a, b))
    tl, th = smooth_step(np.array([lo, hi]))
    assert 0.0 <= tl <= th <= 1.0
    assert smooth_step(np.array([lo]))[0] + smooth_step(np.array([1.0 - lo]))[0] == pytest.approx(1.0)


@given(st.floats(0.0, 1.0))
def test_ramp_lies_between_identity_and_one(y):
    val = float(ramp(np.array([y]))[0])
    assert y - 1e-15 <= val <= 1.0


def test_ramp_endpoints():
    assert ramp(np.array([0.0]))[0] == 0.0 and ramp(np.array([1.0]))[0] == 1.0
    assert ramp_prime(np.array([0.0]))[0] == 1.0 and ramp_prime(np.array([1.0]))[0] == 0.0


def test_cap_profile_shape():
    cp = CapProfile(0.4)
    assert cp.chi(np.array([0.0]))[0] == 0.0
    assert np.all(cp.chi(np.array([-0.2, -0.3, -1.0])) == -1.0)
    # chi' ~ 1 / sqrt(2 eps_star |t|) at the top
    t = -np.array([1e-10, 1e-12])
    assert np.allclose(cp.chi_prime(t) * np.sqrt(2 * 0.4 * np.abs(t)), 1.0, rtol=1e-5)
    a = np.array([0.01, 0.05])
    assert np.allclose(cp.reflected(a), -cp.chi(-a))


def test_root_solver_matches_brentq():
    prof = ads_schwarzschild(3, 0.5).profile
    fhat, fhat_prime = _fhat_factory(prof)
    targets = np.array([1e-8, 1e-4, 1e-2, 0.1])
    v_hi = math.sqrt(0.1)
    plain = solve_root(fhat, targets, v_hi)
    newton = solve_root(fhat, targets, v_hi, func_prime=fhat_prime)
    for z, a1, a2 in zip(targets, plain, newton):
        ref = brentq(lambda a: float(fhat(np.array([a]))[0]) - z, 0.0, 0.1, xtol=1e-300,
                     rtol=1e-15)
        assert a1 == pytest.approx(ref, rel=1e-12)
        assert a2 == pytest.approx(ref, rel=1e-12)


def test_solve_alpha_residual_and_domain():
    G = ads_schwarzschild(3, 0.5)
    C = 10.0
    t = np.array([1e-9, 1e-6, 1e-4])
    a = solve_alpha(G, C, t)
    fhat, _ = _fhat_factory(G.profile)
    assert np.max(np.abs(fhat(a) - C * t)) <= 1e-12
    with pytest.raises(DomainError):
        solve_alpha(G, C, -1.0)
    with pytest.raises(DomainError):
        solve_alpha(ads_schwarzschild(3, 0.0), C, 1e-4)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_build_satisfies_its_conditions(caps, lam):
    cap = caps[lam]
    assert cap.C == pytest.approx(2.0 * cap.L / cap.epsilon)
    fhat_prime = _fhat_factory(cap.profile)[1]
    conds = _eps_conditions(cap.epsilon, cap.r_plus, cap.epsilon_star, cap.L, lam,
                            fhat_prime, cap.cap)
    assert all(ok for _, ok in conds), conds


@pytest.mark.parametrize("lam", LAMBDAS)
def test_metric_lower_bound(caps, lam):
    check = verify_metric_lower_bound(caps[lam], 10_000)
    assert check.samples == 10_000
    assert check.min_ratio >= lam - 1e-8 and check.passed


@pytest.mark.parametrize("lam", LAMBDAS)
def test_seams_and_invariants(caps, lam):
    cap = caps[lam]
    assert c1_seam_check(cap).passed
    inv = check_invariants(cap)
    assert all(getattr(inv, k) for k in ("alpha_increasing", "alpha_to_zero",
                                          "alpha_identity_tail", "alpha_c_increasing",
                                          "alpha_c_identity_tail", "chi_ok", "level_area_ok"))
    assert alpha_residual(cap) <= 1e-10


@pytest.mark.parametrize("lam", LAMBDAS)
def test_cap_size_bounds(caps, lam):
    b = cap_bounds(caps[lam])
    assert b.measured_vol <= b.V_tilde
    assert b.measured_diam <= b.D_tilde
    assert b.measured_vol == pytest.approx(b.cap_graph_vol + b.cylinder_vol)


def test_pullback_matches_differentiated_embedding(caps):
    """g_tt from the closed form against finite differences of Phi."""
    cap = caps[0.9]
    eps = cap.epsilon
    gs, cs = cap.graph_side, cap.cap_side
    ts = np.array([0.5 * (gs.xi + gs.w + gs.tau1 - gs.w), 0.9 * eps, -0.25 * eps,
                   -0.5 * eps - 0.5 * (cs.xi + cs.w + cs.tau1 - cs.w), -0.95 * eps,
                   0.5 * (gs.xi - gs.w)])
    h = 1e-6 * eps
    gtt, _ = cap.pullback(ts)
    for t, g in zip(ts, gtt):
        d_hi, s_hi = cap.phi_offset(np.array([t + h]))
        d_lo, s_lo = cap.phi_offset(np.array([t - h]))
        rho = cap.profile.rho_plus + cap.phi_offset(np.array([t]))[0][0]
        drho = (d_hi[0] - d_lo[0]) / (2 * h)
        ds = (s_hi[0] - s_lo[0]) / (2 * h)
        p = 1 + rho * rho
        assert g == pytest.approx(drho**2 / p + p * ds**2, rel=1e-5)


def test_cylinder_pullback_is_constant(caps):
    cap = caps[0.5]
    gtt, ratio = cap.pullback(np.array([-0.1, -0.3]) * cap.epsilon)
    assert np.allclose(gtt, math.cosh(cap.r_plus) ** 2 * cap.C**2)


def test_rescaling_is_c1_across_its_zones(caps):
    cap = caps[0.9]
    gs = cap.graph_side
    for edge in (gs.xi - gs.w, gs.xi + gs.w, gs.tau1 - gs.w, gs.tau1 + gs.w):
        h = 1e-7 * edge
        left = cap.alpha_prime(np.array([edge - h]))[0]
        right = cap.alpha_prime(np.array([edge + h]))[0]
        assert left == pytest.approx(right, rel=1e-5)


def test_forced_failure_names_the_inequality():
    with pytest.raises(CapBuildError) as info:
        build_cap(ads_schwarzschild(3, 0.5), 2.0, 1e-12, 0.999)
    assert info.value.violated == "2L/eps >= 1"


def test_sampling_is_deterministic(caps):
    a = verify_metric_lower_bound(caps[0.5], 2000)
    b = verify_metric_lower_bound(caps[0.5], 2000)
    assert a == b


def test_input_validation():
    G = ads_schwarzschild(3, 0.5)
    for kwargs in ({"lam": 1.0}, {"lam": 0.0}, {"L": 0.0}):
        args = {"rho_r": 2.0, "L": 1.0, "lam": 0.5} | kwargs
        with pytest.raises(DomainError):
            build_cap(G, **args)
    with pytest.raises(DomainError):
        build_cap(ads_schwarzschild(3, 0.0), 2.0, 1.0, 0.5)
    with pytest.raises(DomainError):
        verify_metric_lower_bound(build_cap(G, 2.0, 1.0, 0.5), 0)


def test_size_bounds_formula_at_unit_rho0():
    # 3 cosh(1/2) + 3/2
    cap = build_cap(ads_schwarzschild(3, 0.5, rho0=1.0), 2.0, 1.0, 0.5)
    b = cap_bounds(cap)
    assert b.D_tilde == pytest.approx(3 * math.cosh(0.5) + 1.5)
    assert b.D_tilde == pytest.approx(4.8829, abs=1e-4)
