"""convfactor: logarithmic potential theory on unions of planar compact sets.

Green's functions with pole at infinity, capacities, asymptotic convergence
factors (two independent estimators), growth-bound checks, classification of
geometric weight sequences, and constructive weighted-approximation steps,
plus a CLI (``convfactor --help``).
"""

__version__ = "0.1.0"

from .config import DEFAULTS
from .errors import ConvfactorError, InputError, NumericalError
from .geometry import (
    CircleContour,
    CompactSet,
    ContourFamily,
    Disk,
    Polygon,
    PolylineContour,
    boundary_sample,
    build_contour_family,
    dist_interior_point_to_complement,
    dist_point_to_shape,
    validate_family,
    validate_set,
    winding_number,
)
from .kernels import IMPLEMENTATION as KERNEL_IMPLEMENTATION
from .potential import (
    GreenModel,
    capacity,
    estimate_rho_green,
    eval_green,
    eval_green_many,
    max_green_on_disk,
    max_green_on_shape,
    solve_green,
    theta_for_contour,
)
from .classify import (
    BoundsRecord,
    SequenceSpec,
    Verdict,
    classify_sequence,
    compute_bounds,
    verify_chain,
)
from .construct import UniversalStep, construct_step, weighted_sum_trace
from .geometry import geometry_from_dict, geometry_to_dict
from .minimax import (
    DeviationRecord,
    PiecewiseTarget,
    Polynomial,
    bernstein_check,
    best_polynomial,
    deviation_sequence,
    estimate_rho_deviation,
    partial_sum,
    rho_from_deviations,
    target_independence_check,
)
from .presets import (
    ExpectedFact,
    ScenarioPreset,
    get_preset,
    preset_ex31,
    preset_ex32,
    preset_ex33,
)
from .records import RhoEstimate

__all__ = [name for name in dir() if not name.startswith("_")]
