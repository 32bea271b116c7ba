"""Interval-arithmetic certification of genus-one catenoid cousins in hyperbolic space."""
__version__ = "0.1.0"

from .interval import ComplexBox, RealInterval  # noqa: E402
from .surface import (  # noqa: E402
    REFERENCE_BOUNDS, CoefficientBounds, PolygonalPath, SurfaceParams, SurfacePoint,
    alpha1, alpha2, compute_h_bounds,
)
from .integrator import IntegrationConfig, MatrixEnclosure, integrate_batch, integrate_path  # noqa: E402
from .bounds import ErrorBudget, c_derivative_bound, global_rk4_bound, zeta  # noqa: E402
from .period import (  # noqa: E402
    assemble_monodromies, period_f1, period_f2, solve_gauge_beta, su2_distance,
)
from .certify import Certificate, certify_existence, check_certificate, sweep_periods  # noqa: E402

__all__ = [
    "ComplexBox", "RealInterval", "REFERENCE_BOUNDS", "CoefficientBounds", "PolygonalPath",
    "SurfaceParams", "SurfacePoint", "alpha1", "alpha2", "compute_h_bounds",
    "IntegrationConfig", "MatrixEnclosure", "integrate_batch", "integrate_path",
    "ErrorBudget", "c_derivative_bound", "global_rk4_bound", "zeta",
    "assemble_monodromies", "period_f1", "period_f2", "solve_gauge_beta", "su2_distance",
    "Certificate", "certify_existence", "check_certificate", "sweep_periods",
]
