"""Mass-to-zero families: run every estimate per member and tabulate.

Class constants are computed once from the largest-mass member and frozen,
since the estimates need them uniform over the family.  A member that fails
records sentinel cells in its own row and the family carries on.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, field

from .capping import build_cap, verify_metric_lower_bound
from .errors import CapBuildError, ConfigError, NotApplicableError
from .graph import AdSSchwarzschildProfile, ads_schwarzschild, class_constants
from .levels import height_h0, penrose_check
from .mass import DEFAULT_SCHEDULE, mass_estimate
from .quadrature import Quadrature
from .regions import region_report

log = logging.getLogger(__name__)

COLUMNS = (
    "mass", "mass_numeric", "h0", "gap", "gap_ratio", "penrose_margin",
    "vol_omega", "vol_ball", "vol_gap", "flat_bound", "D0", "C0_slack",
    "cap_min_ratio", "cap_pass",
)

NOT_APPLICABLE = "n/a"


@dataclass(frozen=True)
class FamilySpec:
    """One family of AdS-Schwarzschild graphs with shared parameters.

    ``rho`` is the geodesic radius of the region ``Omega(rho)`` and
    ``rho_bar`` the areal radius of the flat-distance ball.
    """

    masses: tuple
    n: int = 3
    model: str = "ads"
    rho: float = 2.0
    rho_bar: float = 3.0
    beta: float = 2.0
    lam: float = 0.9
    L: float = 1.0
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    r_schedule: tuple = DEFAULT_SCHEDULE
    cap_samples: int = 10_000

    def validate(self):
        if self.model != "ads":
            raise ConfigError(f"unknown model {self.model!r}; only 'ads' is available")
        if int(self.n) != self.n or self.n < 3:
            raise ConfigError(f"n must be an integer >= 3, got {self.n}")
        m = [float(x) for x in self.masses]
        if not m:
            raise ConfigError("family has no members")
        if any(not math.isfinite(x) or x < 0 for x in m):
            raise ConfigError("masses must be finite and non-negative")
        if any(b >= a for a, b in zip(m, m[1:])):
            raise ConfigError("masses must be strictly decreasing")
        if not self.rho > 0 or not self.rho_bar > 0:
            raise ConfigError("rho and rho_bar must be positive")
        if not self.beta > 1:
            raise ConfigError(f"beta must exceed 1, got {self.beta}")
        if not 0 < self.lam < 1:
            raise ConfigError(f"lambda must lie in (0, 1), got {self.lam}")
        if not self.L > 0:
            raise ConfigError(f"L must be positive, got {self.L}")
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise ConfigError("quadrature tolerances must be positive")
        if self.cap_samples < 1:
            raise ConfigError("cap_samples must be positive")
        return self

    @property
    def quad(self):
        return Quadrature(abs_tol=self.abs_tol, rel_tol=self.rel_tol)


@dataclass
class StabilityReport:
    spec: FamilySpec
    constants: tuple
    rows: list = field(default_factory=list)

    def column(self, name):
        return [row[name] for row in self.rows]


def _sentinel(exc):
    if isinstance(exc, NotApplicableError):
        return NOT_APPLICABLE
    if isinstance(exc, CapBuildError) and exc.violated:
        return f"violated:{exc.violated}"
    return f"error:{type(exc).__name__}"


def frozen_constants(spec):
    """``(rho0, gamma, depth_D)`` from the largest mass, ``rho0`` clamped below ``rho``."""
    prof = AdSSchwarzschildProfile(spec.n, float(spec.masses[0]), spec.quad)
    return class_constants(prof, rho_cap=spec.rho)


def _member_row(spec, m, constants):
    row = dict.fromkeys(COLUMNS, math.nan)
    row["mass"] = m
    quad = spec.quad
    rho0, gamma, depth = constants
    G = ads_schwarzschild(spec.n, m, rho0=rho0, gamma=gamma, depth_D=depth, quad=quad)

    def attempt(label, func):
        try:
            return func()
        except Exception as exc:  # noqa: BLE001 - isolate member failures
            log.warning("mass %g: %s failed: %s", m, label, exc)
            return exc

    est = attempt("mass", lambda: mass_estimate(G, spec.r_schedule))
    row["mass_numeric"] = _sentinel(est) if isinstance(est, Exception) else est.mass

    hr = attempt("height", lambda: height_h0(G, m, spec.beta))
    if isinstance(hr, Exception):
        for key in ("h0", "gap", "gap_ratio"):
            row[key] = _sentinel(hr)
    else:
        row["h0"], row["gap"], row["gap_ratio"] = hr.h0, hr.gap, hr.gap_ratio

    pm = attempt("penrose", lambda: penrose_check(G, m))
    row["penrose_margin"] = _sentinel(pm) if isinstance(pm, Exception) else pm.margin

    rr = attempt("regions", lambda: region_report(G, m, spec.rho, spec.rho_bar, spec.beta, quad))
    keys = ("vol_omega", "vol_ball", "vol_gap", "flat_bound", "D0", "C0_slack")
    if isinstance(rr, Exception):
        for key in keys:
            row[key] = _sentinel(rr)
    else:
        row.update(vol_omega=rr.vol_omega, vol_ball=rr.vol_ball,
                   vol_gap=rr.vol_omega - rr.vol_ball, flat_bound=rr.flat_bound,
                   D0=rr.D0, C0_slack=rr.C0 - rr.C0_measured)

    if G.profile.is_entire:
        row["cap_min_ratio"] = row["cap_pass"] = NOT_APPLICABLE
    else:
        cap = attempt("cap", lambda: build_cap(G, spec.rho, spec.L, spec.lam))
        if isinstance(cap, Exception):
            row["cap_min_ratio"] = row["cap_pass"] = _sentinel(cap)
        else:
            check = attempt("cap check", lambda: verify_metric_lower_bound(cap, spec.cap_samples))
            if isinstance(check, Exception):
                row["cap_min_ratio"] = row["cap_pass"] = _sentinel(check)
            else:
                row["cap_min_ratio"], row["cap_pass"] = check.min_ratio, check.passed
    return row


def run_family(spec):
    """Evaluate every member of ``spec`` in order; failures stay in their row."""
    spec.validate()
    constants = frozen_constants(spec)
    log.info("frozen constants rho0=%.6g gamma=%.6g depth_D=%.6g", *constants)
    report = StabilityReport(spec, constants)
    for m in spec.masses:
        report.rows.append(_member_row(spec, float(m), constants))
    return report


def format_cell(value):
    """Reals to 12 significant digits, booleans as ``true``/``false``."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return format(float(value), ".12g")
    return str(value)


def csv_text(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in report.rows:
        writer.writerow([format_cell(row[c]) for c in COLUMNS])
    return buf.getvalue()


def emit_csv(report, path):
    """Write the report as CSV; ``path`` may also be an open text stream."""
    text = csv_text(report)
    if hasattr(path, "write"):
        path.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
