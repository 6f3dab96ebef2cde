"""Strain profile -> curvature profile -> planar shape."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calibration import CalibrationModel, curvature_from_strain
from .errors import DomainError

DEFAULT_GAUGE_PITCH = 0.65  # mm
DEFAULT_SMOOTHING_WINDOW = 2.0  # mm
DEFAULT_SENSING_LENGTH = 45.0  # mm

# slack when comparing arc positions built from repeated multiples of the pitch
_POS_TOL = 1e-9


def _frozen_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise DomainError(f"{name} has a non-finite value at gauge index {int(bad[0])}")
    arr.setflags(write=False)
    return arr


def _check_pitch(pitch: float) -> None:
    if not (pitch > 0 and math.isfinite(pitch)):
        raise DomainError(f"gauge_pitch must be positive, got {pitch}")


@dataclass(frozen=True, eq=False)
class StrainProfile:
    """Signed strain (microstrain) sampled every ``gauge_pitch`` mm.

    ``origin_offset`` is the arc position of the first gauge relative to the
    base of the flexible section; gauges at negative positions lie in the
    rigid proximal part of the instrument.
    """

    samples: np.ndarray
    gauge_pitch: float = DEFAULT_GAUGE_PITCH
    origin_offset: float = 0.0
    timestamp: float = 0.0

    def __post_init__(self):
        _check_pitch(self.gauge_pitch)
        object.__setattr__(self, "samples", _frozen_array(self.samples, "strain profile"))
        if self.samples.size == 0:
            raise DomainError("strain profile must contain at least one gauge")

    def __len__(self):
        return self.samples.size

    @property
    def positions(self) -> np.ndarray:
        return self.origin_offset + self.gauge_pitch * np.arange(self.samples.size)

    @property
    def sensed_length(self) -> float:
        return (self.samples.size - 1) * self.gauge_pitch

    def with_samples(self, samples) -> "StrainProfile":
        return StrainProfile(samples, self.gauge_pitch, self.origin_offset, self.timestamp)


@dataclass(frozen=True, eq=False)
class CurvatureProfile:
    samples: np.ndarray
    gauge_pitch: float = DEFAULT_GAUGE_PITCH
    origin_offset: float = 0.0

    def __post_init__(self):
        _check_pitch(self.gauge_pitch)
        object.__setattr__(self, "samples", _frozen_array(self.samples, "curvature profile"))
        if self.samples.size == 0:
            raise DomainError("curvature profile must contain at least one gauge")

    def __len__(self):
        return self.samples.size

    @property
    def positions(self) -> np.ndarray:
        return self.origin_offset + self.gauge_pitch * np.arange(self.samples.size)


@dataclass(frozen=True)
class Pose2D:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0  # cumulative heading, not wrapped

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Map points from this pose's local frame into the parent frame."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        pts = np.asarray(points, dtype=float)
        return np.column_stack([self.x + c * pts[:, 0] - s * pts[:, 1], self.y + s * pts[:, 0] + c * pts[:, 1]])

    def inverse(self) -> "Pose2D":
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Pose2D(-(c * self.x + s * self.y), s * self.x - c * self.y, -self.theta)


@dataclass(frozen=True, eq=False)
class PlanarShape:
    """Arc-length parameterised planar polyline with a heading per point."""

    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    arc_positions: np.ndarray = field(default=None)

    def __post_init__(self):
        x = _frozen_array(self.x, "x")
        y = _frozen_array(self.y, "y")
        theta = _frozen_array(self.theta, "theta")
        if not (x.size == y.size == theta.size):
            raise DomainError("x, y and theta must have equal length")
        if self.arc_positions is None:
            seg = np.hypot(np.diff(x), np.diff(y))
            arc = np.concatenate([[0.0], np.cumsum(seg)])
        else:
            arc = self.arc_positions
        arc = _frozen_array(arc, "arc_positions")
        if arc.size != x.size:
            raise DomainError("arc_positions must have one entry per point")
        if arc.size > 1 and np.any(np.diff(arc) <= 0):
            raise DomainError("arc_positions must be strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "arc_positions", arc)

    def __len__(self):
        return self.x.size

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    @property
    def tip(self) -> Pose2D:
        return Pose2D(float(self.x[-1]), float(self.y[-1]), float(self.theta[-1]))

    @property
    def base(self) -> Pose2D:
        return Pose2D(float(self.x[0]), float(self.y[0]), float(self.theta[0]))

    @property
    def length(self) -> float:
        return float(self.arc_positions[-1] - self.arc_positions[0])

    def transformed(self, pose: Pose2D) -> "PlanarShape":
        """Rigidly move the shape by ``pose`` (rotate by theta, then translate)."""
        pts = pose.apply(self.points)
        return PlanarShape(pts[:, 0], pts[:, 1], self.theta + pose.theta, self.arc_positions)

    def subset(self, mask) -> "PlanarShape":
        return PlanarShape(self.x[mask], self.y[mask], self.theta[mask], self.arc_positions[mask])


def strain_to_curvature(profile: StrainProfile, model: CalibrationModel) -> CurvatureProfile:
    """Per-gauge signed curvature through the calibration; zero inside the dead-zone."""
    eps = np.asarray(profile.samples, dtype=float)
    bad = np.flatnonzero(~np.isfinite(eps))
    if bad.size:
        raise DomainError(f"non-finite strain at gauge index {int(bad[0])}")
    kappa = curvature_from_strain(model, eps)
    return CurvatureProfile(np.atleast_1d(kappa), profile.gauge_pitch, profile.origin_offset)


def smoothing_gauges(window: float, gauge_pitch: float) -> int:
    """Number of gauges (always odd) covered by a smoothing window in mm."""
    if window <= 0:
        return 1
    n = max(1, math.ceil(window / gauge_pitch - 1e-9))
    return n if n % 2 else n - 1


def smooth_strain(profile: StrainProfile, window: float) -> StrainProfile:
    """Centered moving average over ``window`` mm of arc length.

    The window spans ``ceil(window / gauge_pitch)`` gauges, rounded down to an
    odd count so it stays centered.  Near the ends the window shrinks
    symmetrically, so the first and last gauges are left untouched.
    """
    if not (window >= 0) or not math.isfinite(window):
        raise DomainError(f"smoothing window must be >= 0, got {window}")
    if window == 0:
        return profile
    if window >= profile.sensed_length:
        raise DomainError(
            f"smoothing window {window} mm must be shorter than the sensed length {profile.sensed_length} mm"
        )
    n = smoothing_gauges(window, profile.gauge_pitch)
    if n == 1:
        return profile
    half = n // 2
    eps = profile.samples
    csum = np.concatenate([[0.0], np.cumsum(eps)])
    idx = np.arange(eps.size)
    h = np.minimum(half, np.minimum(idx, eps.size - 1 - idx))
    smoothed = (csum[idx + h + 1] - csum[idx - h]) / (2 * h + 1)
    return profile.with_samples(smoothed)


def integrate_shape(curv: CurvatureProfile, start: Pose2D = Pose2D()) -> PlanarShape:
    """Integrate a curvature profile into a planar polyline.

    Between neighbouring gauges the heading advances by the mean of their two
    curvatures times the pitch, and each step moves a chord of exactly one
    pitch along the heading at the middle of the step.  For constant curvature
    this places every point on the exact arc up to a second-order error.
    """
    ds = curv.gauge_pitch
    kappa = curv.samples
    dtheta = 0.5 * (kappa[:-1] + kappa[1:]) * ds
    theta = start.theta + np.concatenate([[0.0], np.cumsum(dtheta)])
    mid = theta[:-1] + 0.5 * dtheta
    x = start.x + np.concatenate([[0.0], np.cumsum(np.cos(mid) * ds)])
    y = start.y + np.concatenate([[0.0], np.cumsum(np.sin(mid) * ds)])
    return PlanarShape(x, y, theta, curv.positions)


def sensing_mask(profile: StrainProfile, sensing_length: float | None) -> np.ndarray:
    """Gauges inside the flexible sensing window ``[0, sensing_length]``."""
    s = profile.positions
    mask = s >= -_POS_TOL
    if sensing_length is not None:
        if not sensing_length > 0:
            raise DomainError(f"sensing_length must be positive, got {sensing_length}")
        mask &= s <= sensing_length + _POS_TOL
    if not mask.any():
        raise DomainError("no gauges fall inside the sensing window")
    return mask


def reconstruct_frame(
    profile: StrainProfile,
    model: CalibrationModel,
    window: float = DEFAULT_SMOOTHING_WINDOW,
    start: Pose2D = Pose2D(),
    sensing_length: float | None = None,
) -> PlanarShape:
    """Smooth, calibrate and integrate one strain frame.

    Gauges in the rigid proximal section (negative arc position) and beyond
    ``sensing_length`` are excluded from the integrated shape.
    """
    smoothed = smooth_strain(profile, window)
    curv = strain_to_curvature(smoothed, model)
    mask = sensing_mask(profile, sensing_length)
    first = int(np.argmax(mask))
    sub = CurvatureProfile(curv.samples[mask], curv.gauge_pitch, float(curv.positions[first]))
    return integrate_shape(sub, start)
