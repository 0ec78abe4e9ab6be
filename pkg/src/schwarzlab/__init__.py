"""Numerical laboratory for rotationally symmetric conformally flat metrics.

Riemannian Schwarzschild manifolds and their perturbations: geodesics,
curvature along them, the Ricci integral ``int -Ric(gamma', gamma') ds`` by
several independent routes, and metrics built from a prescribed profile
function.
"""

__version__ = "0.1.0"

from .errors import (ConstructionError, DomainError, HypothesisError, IntegrationError,
                     ParameterError, ProfileError, SchwarzlabError, UnsupportedDimensionError)
from .metric import (MetricProfile, SchwarzschildParams, UForm, areal_coordinate,
                     check_profile, f_phi, inversion_identity_residual, inversion_map,
                     schwarzschild_profile)
from .geodesic import GeodesicState, GeodesicTrace, integrate_geodesic, radial_speed_closed_form
from .curvature import (bakry_emery_ricci, conformal_ricci_oracle, ricci_along_geodesic,
                        scalar_curvature_conformal, scalar_curvature_u_form)
from .frankel import (R_functional, R_series_schwarzschild, alpha_parameter, horizon_ricci,
                      ricci_integral_alpha_form, ricci_integral_direct, wallis)
from .perturbation import (PerturbationBudget, PerturbationReport, ProfileFunction,
                           build_metric_from_f, check_theorem42, example44_profile,
                           load_tabulated_profile, scalar_sign_scan,
                           schwarzschild_profile_function)

__all__ = [name for name in dir() if not name.startswith("_")]
