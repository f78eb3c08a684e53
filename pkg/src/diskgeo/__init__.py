"""Weighted geometry of the unit disk and numerical criteria for composition
operators on large weighted Bergman spaces."""

from __future__ import annotations

__version__ = "0.1.0"

from .carleson import PullbackSampler, pullback_box_measure, vanishing_profile
from .criteria import (
    CriteriaConfig,
    Status,
    Verdict,
    boundedness,
    compact_difference,
    compactness,
    f_set,
    finite_sum_difference,
    path_connectedness,
    weighted_comp_compactness,
)
from .errors import (
    DegenerateBox,
    DiskGeoError,
    HypothesisViolated,
    MeshTooLarge,
    NonFiniteDerived,
    NotClassW,
    NotRadiusFunction,
    OutsideTruncation,
    PairOutOfRange,
)
from .functions import TestFunction, explin, monomial_fn, parse_function, polynomial
from .geometry import build_mesh, build_patch, check_inclusions, dist_phi, dist_tau, local_distance, rho_tau
from .profiles import LimitProfile, StolzSchedule, Trend
from .selfmap import SelfMapExpr, angular_derivative, check_selfmap, parse_map
from .weight import ExpPower, LogProxy, WeightModel, build_weight, parse_weight, validate_class_w

__all__ = [name for name in dir() if not name.startswith("_")]
