"""Dyadic estimates of the mixed gauge measure with gauge r**n + lam * r**(n-1).

The measure interpolates volume (``lam = 0``) and volume plus a multiple
of perimeter (large ``lam``).  Covers are searched exactly over dyadic
subdivisions of a root cube.
"""
__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CoverageError,
    DomainError,
    FrameError,
    GeometryError,
    MixGaugeError,
    PreconditionError,
    ResourceError,
    UnsupportedDimensionError,
)
from .gauge import GaugeParams, evaluate, scale_identity_residual  # noqa: E402
from .geometry import (  # noqa: E402
    CellClassification,
    Disk,
    ImplicitSet,
    Interval,
    Polygon,
    ShapeUnion,
    area,
    boundary_distance,
    classify_cell,
    comb,
    koch,
    make_family,
    perimeter,
    rectangle,
    scale,
    shape_from_json,
    shape_to_json,
    star,
)
from .dyadic import CellTree, CoverResult, DyadicCell, RootFrame, cost_decomposition, default_root, measure, refine_until  # noqa: E402
from .covering import Ball, WhitneyDecomposition, boundary_lower_bound, vitali_select, whitney_cost_sums, whitney_decompose  # noqa: E402
from .analysis import (  # noqa: E402
    ComparabilityReport,
    additivity_check,
    comparability_sweep,
    lambda_sweep,
    minkowski_perimeter,
    monotonicity_battery,
    scaling_check,
    standard_suite,
)
from .kernels import BACKEND  # noqa: E402
