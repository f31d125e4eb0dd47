"""Acceptance suites: each criterion is evaluated and reported, never skipped.

A criterion yields named values (all deterministic) plus a wall-clock
runtime.  Runtimes go to the log only, so the CSV table of a suite is
byte-stable across runs.
"""

import csv
import io
import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from .capping import (alpha_residual, build_cap, c1_seam_check, cap_bounds,
                      verify_metric_lower_bound)
from .family import FamilySpec, format_cell, frozen_constants
from .graph import _five_point, ads_schwarzschild, scalar_curvature
from .hyperbolic import ball_volume, ball_volume_h3, sphere_area
from .levels import height_h0, isoperimetric_check, penrose_check
from .mass import mass_estimate
from .regions import region_report

log = logging.getLogger(__name__)

MEMBERS = tuple((n, m) for n in (3, 4, 5) for m in (0.1, 0.5, 1.0))
VOLUME_MASSES = (0.5, 0.1, 0.02, 0.004)
CAP_LAMBDAS = (0.5, 0.9, 0.99)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    values: tuple
    runtime: float = math.nan


def _timed(func):
    start = time.perf_counter()
    passed, values = func()
    return passed, tuple(values), time.perf_counter() - start


def mass_recovery():
    """Relative mass error over n in {3,4,5}, m in {0.1,0.5,1}; under 5 s."""
    values = []
    worst = 0.0
    for n, m in MEMBERS:
        est = mass_estimate(ads_schwarzschild(n, m)).mass
        err = abs(est - m) / m
        worst = max(worst, err)
        values.append((f"rel_err_n{n}_m{m}", err))
    values.append(("worst_rel_err", worst))
    return worst <= 1e-3, values


def vacuum_curvature():
    """Scalar curvature equals -n(n-1) at 20 radii per member."""
    worst = 0.0
    values = []
    for n, m in MEMBERS:
        G = ads_schwarzschild(n, m)
        radii = G.rho_plus + np.geomspace(1e-2, 1e2, 20)
        err = max(abs(scalar_curvature(G, rho) + n * (n - 1)) for rho in radii)
        worst = max(worst, err)
        values.append((f"abs_err_n{n}_m{m}", err))
    values.append(("worst_abs_err", worst))
    return worst <= 1e-6, values


def penrose():
    """Non-negative margin on every member; closed form for n=3, m=1."""
    values = []
    margins = []
    for n, m in MEMBERS:
        margin = penrose_check(ads_schwarzschild(n, m), m).margin
        margins.append(margin)
        values.append((f"margin_n{n}_m{m}", margin))
    exact = 4.0 * math.pi * (math.sqrt(2.0) - 1.0)
    got = penrose_check(ads_schwarzschild(3, 1.0), 1.0).margin
    values.append(("closed_form_err", abs(got - exact)))
    return min(margins) >= 0.0 and abs(got - exact) <= 1e-6, values


def height_gap():
    """Gap positive, non-increasing as m decreases, ratio within a factor 2."""
    masses = np.logspace(-1, -3, 7)
    gaps, ratios = [], []
    values = []
    for m in masses:
        hr = height_h0(ads_schwarzschild(3, float(m)), float(m), 2.0)
        gaps.append(hr.gap)
        ratios.append(hr.gap_ratio)
        values.append((f"gap_m{m:.3g}", hr.gap))
        values.append((f"ratio_m{m:.3g}", hr.gap_ratio))
    spread = max(ratios) / min(ratios)
    values.append(("ratio_spread", spread))
    ok = (min(gaps) > 0 and all(b <= a for a, b in zip(gaps, gaps[1:])) and spread < 2.0)
    return ok, values


def _volume_family():
    spec = FamilySpec(masses=VOLUME_MASSES, rho=2.0, rho_bar=3.0, beta=2.0)
    rho0, gamma, depth = frozen_constants(spec)
    reports = []
    for m in VOLUME_MASSES:
        G = ads_schwarzschild(3, m, rho0=rho0, gamma=gamma, depth_D=depth)
        reports.append(region_report(G, m, spec.rho, spec.rho_bar, spec.beta))
    return spec, reports


def volume_sandwich(family=None):
    """Lower bound <= vol <= certified upper bound; vol gap shrinks 100-fold."""
    _, reports = family or _volume_family()
    values = []
    sandwich = True
    for m, rr in zip(VOLUME_MASSES, reports):
        sandwich &= rr.lower_bound <= rr.vol_omega <= rr.certified_upper
        values += [(f"lower_m{m}", rr.lower_bound), (f"vol_m{m}", rr.vol_omega),
                   (f"upper_m{m}", rr.certified_upper), (f"split_err_m{m}", rr.split_error)]
    gaps = [rr.vol_omega - rr.vol_ball for rr in reports]
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    shrink = gaps[-1] / gaps[0]
    split = max(rr.split_error for rr in reports)
    values += [("vol_gap_shrink", shrink), ("max_split_err", split)]
    return sandwich and decreasing and shrink <= 1e-2 and split <= 1e-8, values


def flat_distance(family=None):
    """Flat bound strictly decreasing to 5% of the first member; zero at m=0."""
    spec, reports = family or _volume_family()
    bounds = [rr.flat_bound for rr in reports]
    values = [(f"flat_m{m}", b) for m, b in zip(VOLUME_MASSES, bounds)]
    zero = region_report(ads_schwarzschild(3, 0.0), 0.0, spec.rho, spec.rho_bar).flat_bound
    ratio = bounds[-1] / bounds[0]
    values += [("final_over_first", ratio), ("flat_m0", zero)]
    decreasing = all(b < a for a, b in zip(bounds, bounds[1:]))
    return decreasing and ratio <= 0.05 and zero == 0.0, values


def capping():
    """Cap builds and bounds for ads(3, 0.5), L = 1; under 30 s."""
    G = ads_schwarzschild(3, 0.5)
    values = []
    ok = True
    for lam in CAP_LAMBDAS:
        cap = build_cap(G, 2.0, 1.0, lam)
        check = verify_metric_lower_bound(cap, 10_000)
        bounds = cap_bounds(cap)
        residual = alpha_residual(cap)
        seam = c1_seam_check(cap)
        ok &= (check.min_ratio >= lam - 1e-8 and bounds.measured_vol <= bounds.V_tilde
               and bounds.measured_diam <= bounds.D_tilde and residual <= 1e-10
               and seam.passed)
        values += [(f"min_ratio_l{lam}", check.min_ratio), (f"eps_l{lam}", cap.epsilon),
                   (f"vol_l{lam}", bounds.measured_vol), (f"V_tilde_l{lam}", bounds.V_tilde),
                   (f"diam_l{lam}", bounds.measured_diam), (f"D_tilde_l{lam}", bounds.D_tilde),
                   (f"residual_l{lam}", residual), (f"seam_err_l{lam}", seam.errors[-1])]
    return ok, values


def core_identities():
    """Closed-form ball volume, d(ball)/dr = area and isoperimetric slack."""
    radii = np.arange(1, 51) / 10.0
    vol_err = max(abs(ball_volume(3, r) - ball_volume_h3(r)) / ball_volume_h3(r) for r in radii)
    h = 1e-3
    deriv_err = 0.0
    slack = math.inf
    for n in (3, 4, 5):
        for r in radii:
            d = _five_point(lambda x, n=n: ball_volume(n, x), r, h)
            deriv_err = max(deriv_err, abs(d - sphere_area(n, r)) / sphere_area(n, r))
            slack = min(slack, isoperimetric_check(n, r))
    values = [("ball_rel_err", vol_err), ("deriv_rel_err", deriv_err), ("min_iso_slack", slack)]
    return vol_err <= 1e-10 and deriv_err <= 1e-6 and slack >= 0.0, values


CRITERIA = {
    1: ("mass recovery", mass_recovery, 5.0),
    2: ("vacuum curvature", vacuum_curvature, 5.0),
    3: ("penrose inequality", penrose, None),
    4: ("height gap scaling", height_gap, 10.0),
    5: ("volume sandwich", volume_sandwich, None),
    6: ("flat distance bound", flat_distance, None),
    7: ("capping", capping, 30.0),
    8: ("core identities", core_identities, None),
}

SUITES = {
    "core": (8,),
    "mass": (1, 2),
    "levels": (3, 4),
    "regions": (5, 6),
    "cap": (7,),
    "all": (1, 2, 3, 4, 5, 6, 7, 8, 9),
}


def evaluate(number):
    """Run one of the numeric criteria 1 to 8."""
    name, func, budget = CRITERIA[number]
    try:
        passed, values, runtime = _timed(func)
    except Exception as exc:  # noqa: BLE001 - a crash is a failed criterion
        log.error("criterion %d raised %s: %s", number, type(exc).__name__, exc)
        return CriterionResult(number, name, False, (("error", type(exc).__name__),))
    if budget is not None and runtime > budget:
        log.warning("criterion %d took %.2f s (budget %.0f s)", number, runtime, budget)
        passed = False
    return CriterionResult(number, name, bool(passed), values, runtime)


def results_csv(results):
    """Deterministic table: one line per reported value."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("criterion", "name", "passed", "key", "value"))
    for res in results:
        for key, value in res.values:
            writer.writerow((res.number, res.name, format_cell(bool(res.passed)), key,
                             format_cell(value)))
    return buf.getvalue()


def determinism(first):
    """Re-run criteria 1 to 8 and compare the table bytes and pass vector."""
    start = time.perf_counter()
    second = [evaluate(k) for k in range(1, 9)]
    same_bytes = results_csv(first) == results_csv(second)
    same_vector = [r.passed for r in first] == [r.passed for r in second]
    values = (("same_bytes", same_bytes), ("same_pass_vector", same_vector))
    return CriterionResult(9, "determinism", same_bytes and same_vector, values,
                           time.perf_counter() - start)


def run_suite(name):
    """Evaluate the criteria of suite ``name`` in order."""
    numbers = SUITES[name]
    results = [evaluate(k) for k in numbers if k != 9]
    if 9 in numbers:
        results.append(determinism(results))
    return results


def summary_line(res):
    status = "PASS" if res.passed else "FAIL"
    return f"[{status}] criterion {res.number}: {res.name} ({res.runtime:.2f} s)"
