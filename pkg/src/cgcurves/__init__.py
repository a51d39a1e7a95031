"""Closed curves of prescribed constant geodesic curvature on embedded spheres.

The solver regularizes length by L_eps, adds kappa times the enclosed area,
finds a min-max critical curve over latitude-type sweepouts and follows it
as eps decreases.
"""
__version__ = "0.1.0"

from ._accel import backend_name
from .action import ActionParams, AreaLedger, area_increment, degree, gradient, weighted_action
from .continuation import CriticalPointReport, cgc_residual, continue_in_eps
from .curve import DiscreteCurve, length, perturbed_length, resample_arclength
from .minmax import MinMaxConfig, MinMaxReport, minmax_solve, struwe_schedule, tighten_band
from .surface import SurfaceModel
from .sweepout import Sweepout, action_profile, latitude_sweepout, max_slice

__all__ = [
    "ActionParams", "AreaLedger", "CriticalPointReport", "DiscreteCurve", "MinMaxConfig",
    "MinMaxReport", "SurfaceModel", "Sweepout", "action_profile", "area_increment",
    "backend_name", "cgc_residual", "continue_in_eps", "degree", "gradient",
    "latitude_sweepout", "length", "max_slice", "minmax_solve", "perturbed_length",
    "resample_arclength", "struwe_schedule", "tighten_band", "weighted_action",
]
