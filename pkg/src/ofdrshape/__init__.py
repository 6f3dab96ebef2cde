"""Calibrated 2D shape reconstruction from distributed fiber-optic strain.

The package turns per-gauge strain profiles from an OFDR interrogator into
planar centerlines of a flexible drilling instrument, and ships a forward
simulator and error metrics to evaluate the reconstruction offline.
"""

from .calibration import (
    CalibrationModel,
    PUBLISHED_MODEL,
    CalibrationSample,
    PowerLaw,
    fit_calibration,
    fit_power_law,
    fit_residuals,
    radius_from_strain,
    strain_from_radius,
)
from .errors import (
    DomainError,
    FormatError,
    InsufficientDataError,
    RankDeficiencyError,
    ShapeSensingError,
)
from .metrics import (
    EvaluationReport,
    aggregate_trials,
    normalize_error,
    resample_by_arclength,
    shape_error,
    tip_error,
)
from .reconstruction import (
    CurvatureProfile,
    PlanarShape,
    Pose2D,
    StrainProfile,
    integrate_shape,
    reconstruct_frame,
    smooth_strain,
    strain_to_curvature,
)
from .simulator import (
    ComplianceModel,
    FrameSeries,
    NoiseModel,
    apply_compliance,
    ideal_strain,
    simulate_series,
)
from .trajectory import (
    InsertionSchedule,
    Segment,
    TrajectorySpec,
    centerline,
    curvature_at_depth,
    preset,
)

__version__ = "0.1.0"
