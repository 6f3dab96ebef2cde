"""Strain to radius-of-curvature calibration.

Each bending direction of the sensing assembly follows a power law
``radius = a * strain**b`` (radius in mm, strain magnitude in microstrain,
``b < 0``).  Fits are ordinary least squares in log-log space.  Strains whose
magnitude falls inside a small dead-zone are mapped to a straight segment,
since the power law diverges as strain goes to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InsufficientDataError, RankDeficiencyError

POSITIVE = "pos"
NEGATIVE = "neg"
DEFAULT_DEAD_ZONE = 10.0  # microstrain

#: Jig slot radii used during calibration (mm).
JIG_RADII = tuple(float(r) for r in range(35, 101, 5))


@dataclass(frozen=True)
class CalibrationSample:
    """One jig measurement.

    ``radius`` is ``inf`` for the straight slot; such samples are kept for
    bookkeeping but never enter a fit.
    """

    radius: float
    direction: str
    strain: float
    trial: int = 0

    def __post_init__(self):
        if self.direction not in (POSITIVE, NEGATIVE):
            raise DomainError(f"direction must be 'pos' or 'neg', got {self.direction!r}")
        if not (self.radius > 0) or math.isnan(self.radius):
            raise DomainError(f"radius must be > 0, got {self.radius}")
        if not (self.strain >= 0) or not math.isfinite(self.strain):
            raise DomainError(f"strain magnitude must be finite and >= 0, got {self.strain}")

    @property
    def straight(self) -> bool:
        return math.isinf(self.radius)


@dataclass(frozen=True)
class PowerLaw:
    """``radius = a * strain**b`` for strain magnitude in microstrain."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise DomainError(f"power-law coefficient must be positive, got {self.a}")
        if not (self.b < 0 and math.isfinite(self.b)):
            raise DomainError(f"power-law exponent must be negative, got {self.b}")

    def radius(self, strain):
        return self.a * np.power(strain, self.b)

    def strain(self, radius):
        return np.power(np.divide(radius, self.a), 1.0 / self.b)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True)
class CalibrationModel:
    positive: PowerLaw
    negative: PowerLaw
    dead_zone: float = DEFAULT_DEAD_ZONE

    def __post_init__(self):
        if not (self.dead_zone > 0 and math.isfinite(self.dead_zone)):
            raise DomainError(f"dead_zone must be a positive microstrain value, got {self.dead_zone}")

    def to_dict(self) -> dict:
        return {
            "positive": self.positive.to_dict(),
            "negative": self.negative.to_dict(),
            "dead_zone_ue": self.dead_zone,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CalibrationModel":
        try:
            return cls(
                positive=PowerLaw(float(d["positive"]["a"]), float(d["positive"]["b"])),
                negative=PowerLaw(float(d["negative"]["a"]), float(d["negative"]["b"])),
                dead_zone=float(d.get("dead_zone_ue", DEFAULT_DEAD_ZONE)),
            )
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed calibration model: {exc}") from exc


#: Coefficients reported for the fabricated assembly.
PUBLISHED_MODEL = CalibrationModel(
    positive=PowerLaw(284000.0, -1.08),
    negative=PowerLaw(150000.0, -0.999),
)


def _as_pairs(samples) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        return np.empty(0), np.empty(0)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("samples must be a sequence of (strain, radius) pairs")
    return arr[:, 0], arr[:, 1]


def fit_power_law(samples: Iterable[Sequence[float]]) -> PowerLaw:
    """Fit ``radius = a * strain**b`` to ``(strain, radius)`` pairs.

    Minimises the squared residuals of ``ln(radius) = ln(a) + b ln(strain)``.

    Raises:
        InsufficientDataError: fewer than two samples.
        DomainError: a non-positive or non-finite strain or radius.
        RankDeficiencyError: every strain is identical.
    """
    strain, radius = _as_pairs(list(samples))
    if strain.size < 2:
        raise InsufficientDataError(f"need at least 2 samples to fit, got {strain.size}")
    if not (np.all(np.isfinite(strain)) and np.all(np.isfinite(radius))):
        raise DomainError("strain and radius must be finite")
    if np.any(strain <= 0) or np.any(radius <= 0):
        raise DomainError("strain and radius must be strictly positive")

    x = np.log(strain)
    y = np.log(radius)
    design = np.column_stack([np.ones_like(x), x])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 2 or np.ptp(x) == 0:
        raise RankDeficiencyError("all strains are identical; exponent is undetermined")
    return PowerLaw(a=float(np.exp(coef[0])), b=float(coef[1]))


def fit_calibration(samples: Iterable[CalibrationSample], dead_zone: float = DEFAULT_DEAD_ZONE) -> CalibrationModel:
    """Fit both bending directions from pooled jig samples (all trials together)."""
    pos, neg = [], []
    for s in samples:
        if s.straight:
            continue
        (pos if s.direction == POSITIVE else neg).append((s.strain, s.radius))
    return CalibrationModel(fit_power_law(pos), fit_power_law(neg), dead_zone)


def radius_from_strain(model: CalibrationModel, strain):
    """Signed bending radius (mm) for a signed strain (microstrain).

    Strains inside the dead-zone give ``inf`` (a straight segment).  Works on
    scalars and arrays alike.
    """
    eps = np.asarray(strain, dtype=float)
    if not np.all(np.isfinite(eps)):
        raise DomainError("strain must be finite")
    mag = np.abs(eps)
    out = np.full(eps.shape, np.inf)
    pos = eps > model.dead_zone
    neg = eps < -model.dead_zone
    out[pos] = model.positive.radius(mag[pos])
    out[neg] = -model.negative.radius(mag[neg])
    return float(out) if out.ndim == 0 else out


def curvature_from_strain(model: CalibrationModel, strain):
    """Signed curvature (1/mm); exactly zero inside the dead-zone."""
    rho = np.asarray(radius_from_strain(model, strain), dtype=float)
    kappa = np.where(np.isinf(rho), 0.0, 1.0 / np.where(np.isinf(rho), 1.0, rho))
    return float(kappa) if kappa.ndim == 0 else kappa


def strain_from_radius(model: CalibrationModel, radius, full_output: bool = False):
    """Inverse of :func:`radius_from_strain`.

    ``radius = +-inf`` maps to zero strain.  A radius so large that its strain
    would fall inside the dead-zone also maps to zero; with ``full_output``
    the function returns ``(strain, clipped)`` where ``clipped`` marks those
    entries.
    """
    rho = np.asarray(radius, dtype=float)
    if np.any(np.isnan(rho)):
        raise DomainError("radius must not be NaN")
    if np.any(rho == 0):
        raise DomainError("radius must be nonzero")
    finite = np.isfinite(rho)
    mag = np.abs(np.where(finite, rho, 1.0))
    eps = np.where(rho > 0, model.positive.strain(mag), -model.negative.strain(mag))
    eps = np.where(finite, eps, 0.0)
    clipped = finite & (np.abs(eps) <= model.dead_zone)
    eps = np.where(clipped, 0.0, eps)
    if eps.ndim == 0:
        eps, clipped = float(eps), bool(clipped)
    return (eps, clipped) if full_output else eps


@dataclass(frozen=True)
class FitResiduals:
    log_residuals: np.ndarray = field(repr=False)
    radius_residuals: np.ndarray = field(repr=False)
    rmse_log: float
    rmse_radius: float
    max_abs_error: float


def fit_residuals(law: PowerLaw, samples) -> FitResiduals:
    """Residuals (observed minus predicted) of ``law`` on ``(strain, radius)`` pairs."""
    strain, radius = _as_pairs(list(samples))
    if strain.size < 2:
        raise InsufficientDataError(f"need at least 2 samples, got {strain.size}")
    if np.any(strain <= 0) or np.any(radius <= 0) or not np.all(np.isfinite(radius)):
        raise DomainError("strain and radius must be finite and strictly positive")
    predicted = law.radius(strain)
    log_res = np.log(radius) - np.log(predicted)
    rad_res = radius - predicted
    return FitResiduals(
        log_residuals=log_res,
        radius_residuals=rad_res,
        rmse_log=float(np.sqrt(np.mean(log_res**2))),
        rmse_radius=float(np.sqrt(np.mean(rad_res**2))),
        max_abs_error=float(np.max(np.abs(rad_res))),
    )
