"""Ground-truth drilling trajectories built from straight and circular segments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .reconstruction import DEFAULT_GAUGE_PITCH, DEFAULT_SENSING_LENGTH, CurvatureProfile, PlanarShape

STRAIGHT = "straight"
ARC = "arc"

#: Straight insertion before the curved section (mm).  Only documented for
#: the free-bending runs; reused for the drilling presets.
STRAIGHT_INSERTION = 15.0
#: Length of the curved section (mm).
CURVED_LENGTH = 50.0


@dataclass(frozen=True)
class Segment:
    kind: str
    length: float
    radius: float | None = None  # signed, arcs only; positive bends toward +y

    def __post_init__(self):
        if self.kind not in (STRAIGHT, ARC):
            raise DomainError(f"segment kind must be 'straight' or 'arc', got {self.kind!r}")
        if not (self.length > 0 and math.isfinite(self.length)):
            raise DomainError(f"segment length must be positive, got {self.length}")
        if self.kind == ARC:
            if self.radius is None or self.radius == 0 or not math.isfinite(self.radius):
                raise DomainError(f"arc radius must be finite and nonzero, got {self.radius}")
        elif self.radius is not None:
            raise DomainError("straight segments take no radius")

    @property
    def curvature(self) -> float:
        return 0.0 if self.kind == STRAIGHT else 1.0 / self.radius

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "length_mm": self.length}
        if self.kind == ARC:
            d["radius_mm"] = self.radius
        return d


@dataclass(frozen=True)
class TrajectorySpec:
    segments: tuple[Segment, ...]
    label: str = ""
    _starts: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise DomainError("a trajectory needs at least one segment")
        object.__setattr__(self, "segments", segs)
        # (arc start, x, y, heading) at the entry of every segment
        starts = []
        s = x = y = th = 0.0
        for seg in segs:
            starts.append((s, x, y, th))
            x, y, th = _advance(seg, x, y, th, seg.length)
            s += seg.length
        starts.append((s, x, y, th))
        object.__setattr__(self, "_starts", tuple(starts))

    @property
    def total_length(self) -> float:
        return self._starts[-1][0]

    @property
    def entry_of_curve(self) -> float | None:
        """Arc position where the first curved segment begins."""
        for seg, (s, *_rest) in zip(self.segments, self._starts):
            if seg.kind == ARC:
                return s
        return None

    def _segment_index(self, s: np.ndarray, side: str = "right") -> np.ndarray:
        edges = np.array([st[0] for st in self._starts[1:-1]])
        return np.searchsorted(edges, s, side=side)

    def poses_at(self, positions) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Exact ``(x, y, theta)`` at arc positions.

        Negative positions extend the entry heading backwards (the straight
        guide tube).  Positions beyond the end are rejected.
        """
        s = np.asarray(positions, dtype=float).reshape(-1)
        if np.any(s > self.total_length + 1e-9):
            raise DomainError(f"position beyond trajectory end ({self.total_length} mm)")
        idx = self._segment_index(s)
        x = np.empty_like(s)
        y = np.empty_like(s)
        th = np.empty_like(s)
        for i, seg in enumerate(self.segments):
            m = idx == i
            if not m.any():
                continue
            s0, x0, y0, th0 = self._starts[i]
            x[m], y[m], th[m] = _advance(seg, x0, y0, th0, s[m] - s0)
        before = s < 0
        if before.any():
            th0 = self._starts[0][3]
            x[before] = s[before] * math.cos(th0)
            y[before] = s[before] * math.sin(th0)
            th[before] = th0
        return x, y, th

    def curvature_at(self, positions) -> np.ndarray:
        """Curvature at arc positions; a position on a joint reads the earlier segment."""
        s = np.asarray(positions, dtype=float).reshape(-1)
        kappa = np.array([seg.curvature for seg in self.segments])[self._segment_index(s, "left")]
        return np.where(s < 0, 0.0, kappa)

    def to_dict(self) -> dict:
        return {"label": self.label, "segments": [seg.to_dict() for seg in self.segments]}

    @classmethod
    def from_dict(cls, d: dict) -> "TrajectorySpec":
        try:
            segs = [
                Segment(
                    str(sd["kind"]),
                    float(sd["length_mm"]),
                    None if sd.get("radius_mm") is None else float(sd["radius_mm"]),
                )
                for sd in d["segments"]
            ]
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed trajectory spec: {exc}") from exc
        return cls(tuple(segs), str(d.get("label", "")))


def _advance(seg: Segment, x0, y0, th0, u):
    if seg.kind == STRAIGHT:
        return x0 + u * math.cos(th0), y0 + u * math.sin(th0), th0 + 0.0 * u
    r = seg.radius
    th = th0 + u / r
    return x0 + r * (np.sin(th) - math.sin(th0)), y0 - r * (np.cos(th) - math.cos(th0)), th


def j_shape(radius: float, label: str | None = None, straight: float = STRAIGHT_INSERTION,
            curved: float = CURVED_LENGTH) -> TrajectorySpec:
    """Straight insertion followed by a constant-curvature arc."""
    segs = [Segment(ARC, curved, radius)]
    if straight > 0:
        segs.insert(0, Segment(STRAIGHT, straight))
    return TrajectorySpec(tuple(segs), label or f"R{radius:g}")


def straight_path(length: float = STRAIGHT_INSERTION + CURVED_LENGTH, label: str = "Rinf") -> TrajectorySpec:
    return TrajectorySpec((Segment(STRAIGHT, length),), label)


# tube radii for the free-bending runs, drilled radii measured after drilling
FREE_BENDING_LABELS = ("R117", "R50", "R39")
DRILLING_LABELS = ("Rinf", "R121", "R53", "R46")

PRESETS = {
    **{lab: j_shape(float(lab[1:]), lab) for lab in ("R39", "R50", "R117", "R46", "R53", "R121")},
    "Rinf": straight_path(),
}
_ALIASES = {"R_inf": "Rinf", "R∞": "Rinf", "R0": "Rinf", "straight": "Rinf"}


def preset(label: str) -> TrajectorySpec:
    key = _ALIASES.get(label, label)
    try:
        return PRESETS[key]
    except KeyError:
        raise DomainError(f"unknown trajectory preset {label!r}; choose from {sorted(PRESETS)}") from None


def centerline(spec: TrajectorySpec, step: float = DEFAULT_GAUGE_PITCH) -> PlanarShape:
    """Analytic centerline sampled every ``step`` mm, always ending on the exact tip."""
    if not (step > 0):
        raise DomainError(f"step must be positive, got {step}")
    total = spec.total_length
    if step > total:
        raise DomainError(f"step {step} mm exceeds trajectory length {total} mm")
    s = np.arange(0.0, total, step)
    if total - s[-1] > 1e-9 * total:
        s = np.append(s, total)
    else:
        s[-1] = total
    x, y, th = spec.poses_at(s)
    return PlanarShape(x, y, th, s)


def window_positions(depth: float, sensing_length: float = DEFAULT_SENSING_LENGTH,
                     gauge_pitch: float = DEFAULT_GAUGE_PITCH) -> np.ndarray:
    """Trajectory positions of the gauges in a sensing window whose distal gauge sits at ``depth``.

    The gauge grid is anchored at the distal end, so the window holds
    ``floor(sensing_length / gauge_pitch) + 1`` gauges.
    """
    if not (sensing_length > 0):
        raise DomainError(f"sensing_length must be positive, got {sensing_length}")
    if not (gauge_pitch > 0):
        raise DomainError(f"gauge_pitch must be positive, got {gauge_pitch}")
    n = int(math.floor(sensing_length / gauge_pitch + 1e-9)) + 1
    return depth - gauge_pitch * np.arange(n - 1, -1, -1)


def curvature_at_depth(spec: TrajectorySpec, depth: float, sensing_length: float = DEFAULT_SENSING_LENGTH,
                       gauge_pitch: float = DEFAULT_GAUGE_PITCH) -> CurvatureProfile:
    """Ideal curvature seen by the sensing window at insertion ``depth``.

    Gauges that have not yet left the straight guide tube read zero.
    """
    if not (0 <= depth <= spec.total_length + 1e-9):
        raise DomainError(f"depth {depth} outside [0, {spec.total_length}]")
    s = window_positions(depth, sensing_length, gauge_pitch)
    return CurvatureProfile(spec.curvature_at(s), gauge_pitch, 0.0)


def truth_window(spec: TrajectorySpec, depth: float, sensing_length: float = DEFAULT_SENSING_LENGTH,
                 gauge_pitch: float = DEFAULT_GAUGE_PITCH) -> PlanarShape:
    """Ground-truth poses at the gauges of the sensing window, in the trajectory frame."""
    s = window_positions(depth, sensing_length, gauge_pitch)
    x, y, th = spec.poses_at(s)
    return PlanarShape(x, y, th, s)


@dataclass(frozen=True)
class InsertionSchedule:
    """Stepwise insertion: advance ``increment`` mm at ``speed`` mm/s, pause, record."""

    total_length: float
    increment: float = 10.0
    speed: float = 1.5

    def __post_init__(self):
        if not (self.increment > 0):
            raise DomainError(f"increment must be positive, got {self.increment}")
        if not (self.speed > 0):
            raise DomainError(f"speed must be positive, got {self.speed}")
        if not (self.total_length > 0):
            raise DomainError(f"total_length must be positive, got {self.total_length}")

    @classmethod
    def for_trajectory(cls, spec: TrajectorySpec, increment: float = 10.0, speed: float = 1.5):
        return cls(spec.total_length, increment, speed)

    @property
    def depths(self) -> np.ndarray:
        d = np.arange(self.increment, self.total_length, self.increment)
        d = d[self.total_length - d > 1e-9]
        return np.append(d, self.total_length)

    @property
    def travel_times(self) -> np.ndarray:
        """Cumulative actuation time (s) to reach each recorded depth."""
        return self.depths / self.speed
