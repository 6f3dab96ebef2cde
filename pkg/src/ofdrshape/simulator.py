"""Synthetic interrogator frames for a trajectory and an insertion schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calibration import JIG_RADII, NEGATIVE, POSITIVE, CalibrationModel, CalibrationSample, strain_from_radius
from .errors import DomainError
from .reconstruction import (
    DEFAULT_GAUGE_PITCH,
    DEFAULT_SENSING_LENGTH,
    CurvatureProfile,
    StrainProfile,
)
from .trajectory import InsertionSchedule, TrajectorySpec, curvature_at_depth

INTERROGATOR_RATE = 31.25  # Hz


@dataclass(frozen=True)
class ComplianceModel:
    """Loose fit of the fiber inside the instrument channel.

    ``attenuation`` scales every strain sample; ``ramp_length`` (mm) spreads
    each step in the ideal strain over a linear ramp.
    """

    attenuation: float = 0.65
    ramp_length: float = 15.0

    def __post_init__(self):
        if not (0 < self.attenuation <= 1):
            raise DomainError(f"attenuation must lie in (0, 1], got {self.attenuation}")
        if not (self.ramp_length >= 0 and math.isfinite(self.ramp_length)):
            raise DomainError(f"ramp_length must be >= 0, got {self.ramp_length}")


IDEAL = ComplianceModel(1.0, 0.0)


@dataclass(frozen=True)
class NoiseModel:
    sigma: float = 20.0  # microstrain, i.i.d. per gauge
    seed: int = 0

    def __post_init__(self):
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise DomainError(f"sigma must be >= 0, got {self.sigma}")

    def frame_generators(self, n_frames: int) -> list[np.random.Generator]:
        # one independent stream per frame so frames can be generated in any order
        return [np.random.default_rng(s) for s in np.random.SeedSequence(self.seed).spawn(n_frames)]


@dataclass(frozen=True, eq=False)
class FrameSeries:
    """Strain frames recorded at increasing insertion depths."""

    depths: np.ndarray
    frames: tuple[StrainProfile, ...]
    rate: float = INTERROGATOR_RATE
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        depths = np.array(self.depths, dtype=float).reshape(-1)
        frames = tuple(self.frames)
        if depths.size != len(frames):
            raise DomainError("one depth per frame is required")
        if depths.size > 1 and np.any(np.diff(depths) <= 0):
            raise DomainError("frame depths must be strictly increasing")
        if frames:
            ref = frames[0]
            for i, f in enumerate(frames[1:], 1):
                if (len(f) != len(ref) or f.gauge_pitch != ref.gauge_pitch
                        or f.origin_offset != ref.origin_offset):
                    raise DomainError(f"frame {i} does not share the gauge grid of frame 0")
        if not (self.rate > 0):
            raise DomainError(f"rate must be positive, got {self.rate}")
        depths.setflags(write=False)
        object.__setattr__(self, "depths", depths)
        object.__setattr__(self, "frames", frames)

    def __len__(self):
        return len(self.frames)

    def __iter__(self):
        return iter(zip(self.depths, self.frames))

    @property
    def gauge_pitch(self) -> float:
        return self.frames[0].gauge_pitch

    def strain_matrix(self) -> np.ndarray:
        return np.vstack([f.samples for f in self.frames])


def ideal_strain(curv: CurvatureProfile, model: CalibrationModel) -> StrainProfile:
    """Strain the calibrated sensor would read for a curvature profile."""
    kappa = curv.samples
    radius = np.divide(1.0, kappa, out=np.full(kappa.shape, np.inf), where=kappa != 0)
    eps = strain_from_radius(model, radius)
    return StrainProfile(np.atleast_1d(eps), curv.gauge_pitch, curv.origin_offset)


def _box_filter(samples: np.ndarray, pitch: float, width: float) -> np.ndarray:
    """Average of the piecewise-constant signal over ``[s - width/2, s + width/2]``.

    Each sample holds over its own cell of one pitch; the signal is extended
    flat beyond both ends.  A step therefore becomes an exact linear ramp of
    ``width`` centred on the cell boundary.
    """
    n = samples.size
    half = 0.5 * width
    pad = int(math.ceil(half / pitch)) + 1
    ext = np.concatenate([np.full(pad, samples[0]), samples, np.full(pad, samples[-1])])
    # cell edges in units of mm, first cell centred on -pad*pitch
    edges = (np.arange(ext.size + 1) - pad - 0.5) * pitch
    primitive = np.concatenate([[0.0], np.cumsum(ext * pitch)])
    centres = np.arange(n) * pitch
    upper = np.interp(centres + half, edges, primitive)
    lower = np.interp(centres - half, edges, primitive)
    return (upper - lower) / width


def apply_compliance(profile: StrainProfile, c: ComplianceModel) -> StrainProfile:
    eps = profile.samples * c.attenuation
    if c.ramp_length > 0 and eps.size > 1:
        eps = _box_filter(eps, profile.gauge_pitch, c.ramp_length)
    return profile.with_samples(eps)


def simulate_frame(
    spec: TrajectorySpec,
    depth: float,
    model: CalibrationModel,
    compliance: ComplianceModel,
    sigma: float,
    rng: np.random.Generator | None,
    sensing_length: float = DEFAULT_SENSING_LENGTH,
    gauge_pitch: float = DEFAULT_GAUGE_PITCH,
    rigid_length: float = 0.0,
) -> StrainProfile:
    curv = curvature_at_depth(spec, depth, sensing_length, gauge_pitch)
    n_rigid = int(math.floor(rigid_length / gauge_pitch + 1e-9))
    if n_rigid:
        curv = CurvatureProfile(np.concatenate([np.zeros(n_rigid), curv.samples]), gauge_pitch,
                                -n_rigid * gauge_pitch)
    profile = apply_compliance(ideal_strain(curv, model), compliance)
    if sigma > 0:
        profile = profile.with_samples(profile.samples + rng.normal(0.0, sigma, len(profile)))
    return profile


def simulate_series(
    spec: TrajectorySpec,
    sched: InsertionSchedule,
    model: CalibrationModel,
    compliance: ComplianceModel = ComplianceModel(),
    noise: NoiseModel = NoiseModel(),
    sensing_length: float = DEFAULT_SENSING_LENGTH,
    gauge_pitch: float = DEFAULT_GAUGE_PITCH,
    rigid_length: float = 0.0,
    rate: float = INTERROGATOR_RATE,
) -> FrameSeries:
    """One frame per scheduled depth: ideal strain, compliance, then Gaussian noise.

    ``rigid_length`` prepends gauges in the rigid proximal section, which read
    zero strain plus noise and sit at negative arc positions.
    """
    if abs(sched.total_length - spec.total_length) > 1e-9:
        raise DomainError("insertion schedule length does not match the trajectory")
    depths = sched.depths
    rngs = noise.frame_generators(depths.size)
    frames = []
    for i, (depth, rng) in enumerate(zip(depths, rngs)):
        f = simulate_frame(spec, float(depth), model, compliance, noise.sigma, rng,
                           sensing_length, gauge_pitch, rigid_length)
        frames.append(StrainProfile(f.samples, f.gauge_pitch, f.origin_offset, timestamp=i / rate))
    meta = {
        "trajectory": spec.label,
        "sensing_length_mm": sensing_length,
        "seed": noise.seed,
        "sigma_ue": noise.sigma,
        "attenuation": compliance.attenuation,
        "ramp_length_mm": compliance.ramp_length,
        "model": model.to_dict(),
    }
    return FrameSeries(depths, tuple(frames), rate, meta)


def simulate_jig(
    model: CalibrationModel,
    radii=JIG_RADII,
    trials: int = 3,
    radius_noise: float = 0.0,
    seed: int | None = None,
    include_straight: bool = True,
) -> list[CalibrationSample]:
    """Calibration-jig samples drawn from ``model``.

    ``radius_noise`` is a relative (multiplicative) Gaussian error on the
    recorded slot radius.
    """
    rng = np.random.default_rng(seed)
    out = []
    for trial in range(trials):
        if include_straight:
            out.append(CalibrationSample(math.inf, POSITIVE, 0.0, trial))
        for direction, sign in ((POSITIVE, 1.0), (NEGATIVE, -1.0)):
            for r in radii:
                eps = abs(strain_from_radius(model, sign * r))
                rec = r * (1.0 + radius_noise * rng.standard_normal()) if radius_noise else r
                out.append(CalibrationSample(float(rec), direction, float(eps), trial))
    return out
