"""Asymptotically hyperbolic graphs: mass, level sets, region estimates and capping."""

from .capping import CapComplex, build_cap, verify_metric_lower_bound
from .errors import (CapBuildError, ConfigError, DomainError, NotApplicableError,
                     NumericalError, OutOfHypothesisError, UnsupportedProfileError)
from .family import FamilySpec, StabilityReport, emit_csv, run_family
from .graph import (GraphManifold, ads_schwarzschild, check_admissibility, gradient_decay,
                    load_profile_table, scalar_curvature)
from .hyperbolic import HyperbolicSpace, ball_volume, omega, sphere_area
from .levels import height_h0, level_set_area, penrose_check, perimeter_function
from .mass import mass_estimate, mass_integrand
from .quadrature import Quadrature
from .regions import flat_distance_bound, omega_volume, region_report, volume_bounds

__version__ = "0.1.0"

__all__ = [
    "CapBuildError", "CapComplex", "ConfigError", "DomainError", "FamilySpec",
    "GraphManifold", "HyperbolicSpace", "NotApplicableError", "NumericalError",
    "OutOfHypothesisError", "Quadrature", "StabilityReport", "UnsupportedProfileError",
    "ads_schwarzschild", "ball_volume", "build_cap", "check_admissibility", "emit_csv",
    "flat_distance_bound", "gradient_decay", "height_h0", "level_set_area",
    "load_profile_table", "mass_estimate", "mass_integrand", "omega", "omega_volume",
    "penrose_check", "perimeter_function", "region_report", "run_family",
    "scalar_curvature", "sphere_area", "verify_metric_lower_bound", "volume_bounds",
]
