"""Shared domain model: units, coordinate conventions, core value types.

All positions are bounding-box centers in a road-aligned frame measured in
meters: x is longitudinal, y is lateral. Lane markings run parallel to the
x axis, so lane membership is a pure function of y. Vehicles on the upper
carriageway travel toward decreasing x, vehicles on the lower carriageway
toward increasing x.

Every type here is an immutable value; instances can be shared freely
between workers.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

#: In-memory sentinel for a lane without a posted speed limit.
UNLIMITED_SPEED = math.inf


class ContractViolation(Exception):
    """An operation was invoked outside its documented precondition."""


class VehicleClass(Enum):
    CAR = "Car"
    TRUCK = "Truck"

    @classmethod
    def parse(cls, text: str) -> "VehicleClass":
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(f"unknown vehicle class {text!r} (expected 'Car' or 'Truck')")


class DrivingDirection(Enum):
    """Carriageway identity. Numeric values match the file encoding."""

    UPPER = 1
    LOWER = 2

    @property
    def travel_sign(self) -> int:
        """Sign of longitudinal travel: -1 on the upper, +1 on the lower carriageway."""
        return -1 if self is DrivingDirection.UPPER else 1

    @classmethod
    def parse(cls, value: int) -> "DrivingDirection":
        if value == 1:
            return cls.UPPER
        if value == 2:
            return cls.LOWER
        raise ValueError(f"unknown driving direction {value!r} (expected 1 or 2)")


def _check_boundaries(name: str, boundaries: Sequence[float]) -> None:
    if len(boundaries) < 3:
        raise ValueError(f"{name} needs >= 3 boundaries (>= 2 lanes), got {len(boundaries)}")
    for a, b in zip(boundaries, boundaries[1:]):
        if not (math.isfinite(a) and math.isfinite(b)) or b <= a:
            raise ValueError(f"{name} must be finite and strictly increasing, got {boundaries}")


@dataclass(frozen=True)
class RecordingMeta:
    """Site geometry and recording parameters for one recording.

    Lane boundaries are the lateral (y) positions of the lane markings of a
    carriageway, stored in strictly increasing order; lane k of a carriageway
    spans the half-open interval [boundary[k-1], boundary[k]). Speed limits
    are per lane in m/s, ``UNLIMITED_SPEED`` meaning no posted limit.
    """

    recording_id: int
    location_id: int
    frame_rate: float
    duration: float
    upper_lane_boundaries: Tuple[float, ...]
    lower_lane_boundaries: Tuple[float, ...]
    upper_speed_limits: Tuple[float, ...]
    lower_speed_limits: Tuple[float, ...]
    pixel_size: float = 0.10

    def __post_init__(self) -> None:
        if not self.frame_rate > 0:
            raise ValueError(f"frame_rate must be > 0, got {self.frame_rate}")
        if not self.duration > 0:
            raise ValueError(f"duration must be > 0, got {self.duration}")
        if not self.pixel_size > 0:
            raise ValueError(f"pixel_size must be > 0, got {self.pixel_size}")
        _check_boundaries("upper_lane_boundaries", self.upper_lane_boundaries)
        _check_boundaries("lower_lane_boundaries", self.lower_lane_boundaries)
        for limits, boundaries, name in (
            (self.upper_speed_limits, self.upper_lane_boundaries, "upper"),
            (self.lower_speed_limits, self.lower_lane_boundaries, "lower"),
        ):
            lanes = len(boundaries) - 1
            if len(limits) != lanes:
                raise ValueError(
                    f"{name} speed limits: expected one per lane ({lanes}), got {len(limits)}"
                )
            for v in limits:
                if not (v > 0):
                    raise ValueError(f"{name} speed limit must be positive, got {v}")

    def boundaries(self, direction: DrivingDirection) -> Tuple[float, ...]:
        if direction is DrivingDirection.UPPER:
            return self.upper_lane_boundaries
        return self.lower_lane_boundaries

    def speed_limits(self, direction: DrivingDirection) -> Tuple[float, ...]:
        if direction is DrivingDirection.UPPER:
            return self.upper_speed_limits
        return self.lower_speed_limits

    def lane_count(self, direction: DrivingDirection) -> int:
        return len(self.boundaries(direction)) - 1

    @property
    def max_frame(self) -> float:
        """Largest frame index the recording may contain."""
        return self.duration * self.frame_rate


def lane_id_of(y: float, meta: RecordingMeta, direction: DrivingDirection) -> Optional[int]:
    """1-based lane containing lateral offset ``y``, or None when off-road.

    Lane intervals are half-open with the lower edge inclusive:
    boundary[k-1] <= y < boundary[k] maps to lane k. Returning None (off
    road) is a value, not an error.
    """
    b = meta.boundaries(direction)
    if y < b[0] or y >= b[-1]:
        return None
    return bisect.bisect_right(b, y)


def nearest_lane_id(y: float, meta: RecordingMeta, direction: DrivingDirection) -> int:
    """Like lane_id_of but total: off-road offsets clamp to the edge lane."""
    lane = lane_id_of(y, meta, direction)
    if lane is not None:
        return lane
    b = meta.boundaries(direction)
    return 1 if y < b[0] else len(b) - 1


@dataclass(frozen=True, slots=True)
class KinematicState:
    """One vehicle's state at one frame (box center, road-aligned frame)."""

    frame: int
    x: float
    y: float
    vx: float
    vy: float
    ax: float
    ay: float
    lane_id: int

    def __post_init__(self) -> None:
        if self.frame < 0:
            raise ValueError(f"frame must be >= 0, got {self.frame}")
        if self.lane_id < 1:
            raise ValueError(f"lane_id must be >= 1, got {self.lane_id}")
        for name in ("x", "y", "vx", "vy", "ax", "ay"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)}")


def ahead_of(a: KinematicState, b: KinematicState, direction: DrivingDirection) -> bool:
    """True iff ``a`` is strictly ahead of ``b`` along the travel direction.

    Both states must belong to the same frame.
    """
    if a.frame != b.frame:
        raise ContractViolation(f"frame mismatch: {a.frame} vs {b.frame}")
    return (a.x - b.x) * direction.travel_sign > 0


def compute_mean_speed(states: Sequence[KinematicState]) -> float:
    """Mean of per-frame longitudinal speed magnitudes."""
    if not states:
        raise ValueError("mean speed of an empty state list is undefined")
    return sum(abs(s.vx) for s in states) / len(states)


@dataclass(frozen=True)
class Track:
    """One vehicle: per-frame kinematic states plus vehicle-level summary."""

    track_id: int
    vehicle_class: VehicleClass
    direction: DrivingDirection
    length: float
    width: float
    states: Tuple[KinematicState, ...]
    mean_speed: float

    def __post_init__(self) -> None:
        if not self.length > 0 or not self.width > 0:
            raise ValueError(f"track {self.track_id}: extents must be positive")
        if not self.states:
            raise ValueError(f"track {self.track_id}: needs at least one state")
        frames = [s.frame for s in self.states]
        for prev, cur in zip(frames, frames[1:]):
            if cur != prev + 1:
                raise ValueError(
                    f"track {self.track_id}: frames must be consecutive, "
                    f"got {prev} followed by {cur}"
                )

    @property
    def initial_frame(self) -> int:
        return self.states[0].frame

    @property
    def final_frame(self) -> int:
        return self.states[-1].frame

    @property
    def num_frames(self) -> int:
        return len(self.states)

    def state_at(self, frame: int) -> Optional[KinematicState]:
        idx = frame - self.initial_frame
        if 0 <= idx < len(self.states):
            return self.states[idx]
        return None

    def lane_change_count(self) -> int:
        """Number of frame-to-frame lane_id transitions."""
        return sum(
            1 for a, b in zip(self.states, self.states[1:]) if a.lane_id != b.lane_id
        )


@dataclass(frozen=True, slots=True)
class Detection:
    """A single-frame observation handed over by the per-frame detector."""

    frame: int
    cx: float
    cy: float
    length: float
    width: float
    class_hint: Optional[VehicleClass] = None

    def __post_init__(self) -> None:
        if self.frame < 0:
            raise ValueError(f"frame must be >= 0, got {self.frame}")
        if not self.length > 0 or not self.width > 0:
            raise ValueError("detection extents must be positive")
        for name in ("cx", "cy", "length", "width"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
