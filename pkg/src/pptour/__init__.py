"""Projection pursuit for complex bivariate structure: indexes, guided tours
and index-quality diagnostics."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    DataError,
    EvaluationError,
    InvalidParameter,
    NoStructureAtTarget,
    PPTourError,
    UnknownIndex,
)
from .geometry import DataMatrix, Frame, geodesic_path, orthonormalize, proj_dist, random_frame  # noqa: E402
from .indexes import INDEX_NAMES, IndexDescriptor, bind, descriptor, evaluate  # noqa: E402
from .optimizer import OptimizerConfig, TourHistory, guided_tour, scout_then_refine  # noqa: E402
from .simdata import SimSpec, generate, minmax_scale, sphere_pca, standardize  # noqa: E402

__all__ = [
    "ConfigError",
    "DataError",
    "DataMatrix",
    "EvaluationError",
    "Frame",
    "INDEX_NAMES",
    "IndexDescriptor",
    "InvalidParameter",
    "NoStructureAtTarget",
    "OptimizerConfig",
    "PPTourError",
    "SimSpec",
    "TourHistory",
    "UnknownIndex",
    "bind",
    "descriptor",
    "evaluate",
    "generate",
    "geodesic_path",
    "guided_tour",
    "minmax_scale",
    "orthonormalize",
    "proj_dist",
    "random_frame",
    "scout_then_refine",
    "sphere_pca",
    "standardize",
]
