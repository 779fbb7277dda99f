"""Synthetic highway scenes with exact ground truth, plus detection corruption.

A scenario script fully determines a scene: lane layout, per-vehicle entry,
a piecewise-constant-acceleration speed profile (segment boundaries snap to
the frame grid so the sampled trajectory is exactly realizable by the
smoother's motion model) and scripted lane changes that reuse the quintic
lane-change model for the lateral motion. The generator derives trajectories,
lane-change episodes and cut-in scenarios analytically from the script; the
maneuver detectors are never involved.

``corrupt`` turns truth tracks into per-frame detection streams by adding
Gaussian position noise, dropping detections (randomly, in bursts, or in
scripted windows) and injecting single-frame false positives uniformly over
the road. Everything is a pure function of (script, seed).
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .core import (
    Detection,
    DrivingDirection,
    KinematicState,
    RecordingMeta,
    Track,
    UNLIMITED_SPEED,
    VehicleClass,
    compute_mean_speed,
    lane_id_of,
)
from .lane_change import (
    CutInScenario,
    CutInSide,
    LaneChangeParams,
    Side,
    evaluate_model,
)
from .maneuvers import ManeuverEpisode, ManeuverKind
from .surround import NO_VEHICLE, SPEED_FLOOR, UNDEFINED, left_lane_id

DEFAULT_UPPER_BOUNDARIES = (0.0, 3.7, 7.4)
DEFAULT_LOWER_BOUNDARIES = (12.0, 15.7, 19.4)


class ScriptError(Exception):
    """The scenario script is inconsistent or produces an invalid scene."""


@dataclass(frozen=True)
class NoiseSpec:
    position_sigma: float = 0.0
    dropout_probability: float = 0.0
    dropout_burst_length: int = 1
    false_positive_rate: float = 0.0

    def __post_init__(self) -> None:
        if self.position_sigma < 0 or self.false_positive_rate < 0:
            raise ValueError("noise magnitudes must be >= 0")
        if not 0.0 <= self.dropout_probability <= 1.0:
            raise ValueError("dropout_probability must lie in [0, 1]")
        if self.dropout_burst_length < 1:
            raise ValueError("dropout_burst_length must be >= 1")


@dataclass(frozen=True)
class SpeedSegment:
    duration: float       # seconds; snapped to whole frames at generation
    acceleration: float   # m/s^2 applied to the speed magnitude


@dataclass(frozen=True)
class ScriptedLaneChange:
    start_time: float     # seconds on the recording clock
    duration: float
    to_lane: int
    d_start: Optional[float] = None  # default: distance from the settled offset
    d_end: Optional[float] = None    # default: ends at the target lane center


@dataclass(frozen=True)
class VehicleSpec:
    vehicle_class: VehicleClass
    direction: DrivingDirection
    entry_lane: int
    entry_time: float = 0.0
    exit_time: Optional[float] = None
    entry_x: Optional[float] = None   # default: road start for the direction
    initial_speed: float = 25.0       # magnitude, m/s
    length: float = 4.5
    width: float = 2.0
    speed_segments: Tuple[SpeedSegment, ...] = ()
    lane_changes: Tuple[ScriptedLaneChange, ...] = ()
    dropout_windows: Tuple[Tuple[int, int], ...] = ()  # inclusive frame spans


@dataclass(frozen=True)
class ScenarioScript:
    seed: int
    duration: float
    frame_rate: float = 25.0
    road_length: float = 420.0
    recording_id: int = 1
    location_id: int = 1
    upper_lane_boundaries: Tuple[float, ...] = DEFAULT_UPPER_BOUNDARIES
    lower_lane_boundaries: Tuple[float, ...] = DEFAULT_LOWER_BOUNDARIES
    upper_speed_limits: Optional[Tuple[float, ...]] = None
    lower_speed_limits: Optional[Tuple[float, ...]] = None
    vehicles: Tuple[VehicleSpec, ...] = ()
    noise: NoiseSpec = NoiseSpec()

    def meta(self) -> RecordingMeta:
        upper_limits = self.upper_speed_limits or tuple(
            UNLIMITED_SPEED for _ in range(len(self.upper_lane_boundaries) - 1)
        )
        lower_limits = self.lower_speed_limits or tuple(
            UNLIMITED_SPEED for _ in range(len(self.lower_lane_boundaries) - 1)
        )
        return RecordingMeta(
            recording_id=self.recording_id,
            location_id=self.location_id,
            frame_rate=self.frame_rate,
            duration=self.duration,
            upper_lane_boundaries=self.upper_lane_boundaries,
            lower_lane_boundaries=self.lower_lane_boundaries,
            upper_speed_limits=upper_limits,
            lower_speed_limits=lower_limits,
        )


@dataclass(frozen=True)
class LaneChangeTruth:
    """Scripted lane change with its analytically derived episode."""

    track_id: int
    params: LaneChangeParams
    t0: float
    marking_y: float
    from_lane: int
    to_lane: int
    crossing_frame: int
    start_frame: int
    end_frame: int
    complete: bool

    def episode(self) -> ManeuverEpisode:
        return ManeuverEpisode(
            track_id=self.track_id,
            kind=ManeuverKind.LANE_CHANGE,
            start_frame=self.start_frame,
            end_frame=self.end_frame,
            from_lane=self.from_lane,
            to_lane=self.to_lane,
            crossing_frame=self.crossing_frame,
            complete=self.complete,
        )


@dataclass(frozen=True)
class GroundTruth:
    meta: RecordingMeta
    tracks: Tuple[Track, ...]
    lane_changes: Tuple[LaneChangeTruth, ...]
    episodes: Tuple[ManeuverEpisode, ...]
    cut_ins: Tuple[CutInScenario, ...]
    scripted_dropouts: Mapping[int, Tuple[Tuple[int, int], ...]]
    road_length: float


def _lane_center(boundaries: Sequence[float], lane: int) -> float:
    return (boundaries[lane - 1] + boundaries[lane]) / 2.0


class _VehicleTimeline:
    """Exact per-frame kinematics of one scripted vehicle."""

    def __init__(self, index: int, spec: VehicleSpec, script: ScenarioScript) -> None:
        self.spec = spec
        fps = script.frame_rate
        dt = 1.0 / fps
        self.dt = dt
        total_frames = int(round(script.duration * fps))
        name = f"vehicles[{index}]"

        boundaries = (
            script.upper_lane_boundaries
            if spec.direction is DrivingDirection.UPPER
            else script.lower_lane_boundaries
        )
        if not 1 <= spec.entry_lane <= len(boundaries) - 1:
            raise ScriptError(f"{name}: entry_lane {spec.entry_lane} does not exist")

        first = int(round(spec.entry_time * fps))
        exit_time = script.duration if spec.exit_time is None else spec.exit_time
        last = min(int(round(exit_time * fps)) - 1, total_frames - 1)
        if first < 0 or last < first:
            raise ScriptError(
                f"{name}: empty lifetime (entry {spec.entry_time}s, exit {exit_time}s)"
            )
        self.first, self.last = first, last
        n = last - first + 1

        # Longitudinal: exact per-frame stepping; constant acceleration within
        # each step because segment boundaries snap to the frame grid.
        accel = np.zeros(n)
        cursor = 0
        for k, seg in enumerate(spec.speed_segments):
            seg_frames = int(round(seg.duration * fps))
            if seg_frames < 0:
                raise ScriptError(f"{name}.speed_segments[{k}]: negative duration")
            accel[cursor : min(cursor + seg_frames, n)] = seg.acceleration
            cursor += seg_frames
        speed = np.empty(n)
        speed[0] = spec.initial_speed
        for i in range(1, n):
            speed[i] = speed[i - 1] + accel[i - 1] * dt
        if np.any(speed < 0):
            raise ScriptError(f"{name}: speed profile goes negative")
        self._speed, self._accel = speed, accel

        sign = spec.direction.travel_sign
        x0 = spec.entry_x if spec.entry_x is not None else (
            0.0 if sign > 0 else script.road_length
        )
        x = np.empty(n)
        x[0] = x0
        for i in range(1, n):
            x[i] = x[i - 1] + sign * (speed[i - 1] * dt + accel[i - 1] * dt * dt / 2.0)
        self.x = x
        self.vx = sign * speed
        self.ax = sign * accel

        self.maneuvers = self._plan_lane_changes(name, boundaries)

        # Lateral timeline: quintic inside maneuver windows, settled otherwise.
        self.y = np.empty(n)
        self.vy = np.zeros(n)
        self.ay = np.zeros(n)
        settled = (
            self.maneuvers[0]["settled_before"]
            if self.maneuvers
            else _lane_center(boundaries, spec.entry_lane)
        )
        m_idx = 0
        for i in range(n):
            t = (first + i) * dt
            while m_idx < len(self.maneuvers):
                m = self.maneuvers[m_idx]
                if t <= m["t0"] + m["params"].duration:
                    break
                settled = m["marking"] + m["params"].side.y_sign * m["params"].d_end
                m_idx += 1
            if m_idx < len(self.maneuvers) and t >= self.maneuvers[m_idx]["t0"]:
                m = self.maneuvers[m_idx]
                tau = min(t - m["t0"], m["params"].duration)
                _, y_rel, _, vy, _, ay = evaluate_model(m["params"], tau)
                self.y[i] = m["marking"] + y_rel
                self.vy[i] = vy
                self.ay[i] = ay
            else:
                self.y[i] = settled
                self.vy[i] = 0.0
                self.ay[i] = 0.0

        self.lanes: List[int] = []
        meta = script.meta()
        for i in range(n):
            lane = lane_id_of(float(self.y[i]), meta, spec.direction)
            if lane is None:
                raise ScriptError(
                    f"{name}: off-road at frame {first + i} (y={self.y[i]:.3f})"
                )
            self.lanes.append(lane)

    def _plan_lane_changes(self, name: str, boundaries: Sequence[float]) -> List[Dict]:
        spec = self.spec
        maneuvers: List[Dict] = []
        current_lane = spec.entry_lane
        settled_y = _lane_center(boundaries, current_lane)
        previous_end = -math.inf
        first_t = self.first * self.dt
        last_t = self.last * self.dt
        for k, lc in enumerate(spec.lane_changes):
            lc_name = f"{name}.lane_changes[{k}]"
            if lc.duration <= 0:
                raise ScriptError(f"{lc_name}: duration must be positive")
            if lc.start_time < previous_end:
                raise ScriptError(f"{lc_name}: overlaps the previous lane change")
            if not first_t - 1e-9 <= lc.start_time <= last_t:
                raise ScriptError(
                    f"{lc_name}: start_time {lc.start_time}s outside the vehicle's "
                    f"lifetime [{first_t}, {last_t}]s"
                )
            if not 1 <= lc.to_lane <= len(boundaries) - 1:
                raise ScriptError(f"{lc_name}: to_lane {lc.to_lane} does not exist")
            if abs(lc.to_lane - current_lane) != 1:
                raise ScriptError(
                    f"{lc_name}: to_lane {lc.to_lane} is not adjacent to lane "
                    f"{current_lane}"
                )
            lane_sign = 1 if lc.to_lane > current_lane else -1
            marking = boundaries[max(current_lane, lc.to_lane) - 1]
            default_d_start = lane_sign * (marking - settled_y)
            d_start = lc.d_start if lc.d_start is not None else default_d_start
            if d_start <= 0:
                raise ScriptError(f"{lc_name}: d_start must be positive, got {d_start}")
            start_y = marking - lane_sign * d_start
            if abs(start_y - settled_y) > 1e-9:
                raise ScriptError(
                    f"{lc_name}: d_start={d_start} starts the maneuver at y={start_y:.3f} "
                    f"but the vehicle is settled at y={settled_y:.3f}"
                )
            target_center = _lane_center(boundaries, lc.to_lane)
            d_end = (
                lc.d_end if lc.d_end is not None else lane_sign * (target_center - marking)
            )
            if d_end <= 0:
                raise ScriptError(f"{lc_name}: d_end must be positive, got {d_end}")

            v_start, v_end = self._window_speeds(lc, lc_name)
            params = LaneChangeParams(
                d_start=d_start,
                d_end=d_end,
                v_start=v_start,
                v_end=v_end,
                duration=lc.duration,
                side=Side.TO_LEFT if lane_sign > 0 else Side.TO_RIGHT,
            )
            maneuvers.append(
                {
                    "params": params,
                    "t0": lc.start_time,
                    "marking": marking,
                    "from_lane": current_lane,
                    "to_lane": lc.to_lane,
                    "settled_before": settled_y,
                }
            )
            settled_y = marking + lane_sign * d_end
            current_lane = lc.to_lane
            previous_end = lc.start_time + lc.duration
        return maneuvers

    def _window_speeds(self, lc: ScriptedLaneChange, name: str) -> Tuple[float, float]:
        """Speed magnitudes at the maneuver ends; the window must have one
        constant acceleration (the model's longitudinal motion is quadratic)."""
        dt = self.dt
        a = lc.start_time - self.first * dt
        b = a + lc.duration
        i0 = max(int(math.floor(a / dt + 1e-9)), 0)
        i1 = min(int(math.ceil(b / dt - 1e-9)), len(self._accel))
        window = self._accel[i0:i1]
        if window.size and float(window.max() - window.min()) > 1e-12:
            raise ScriptError(
                f"{name}: longitudinal acceleration changes during the maneuver "
                "(the lane-change model needs a constant-acceleration window)"
            )
        accel = float(window[0]) if window.size else 0.0
        base_index = min(i0, len(self._speed) - 1)
        v_start = float(self._speed[base_index]) + accel * (a - base_index * dt)
        v_end = v_start + accel * lc.duration
        if v_start <= 0 or v_end <= 0:
            raise ScriptError(f"{name}: maneuver speeds must be positive")
        return v_start, v_end

    def track(self, track_id: int) -> Track:
        states = tuple(
            KinematicState(
                frame=self.first + i,
                x=float(self.x[i]),
                y=float(self.y[i]),
                vx=float(self.vx[i]),
                vy=float(self.vy[i]),
                ax=float(self.ax[i]),
                ay=float(self.ay[i]),
                lane_id=self.lanes[i],
            )
            for i in range(len(self.x))
        )
        return Track(
            track_id=track_id,
            vehicle_class=self.spec.vehicle_class,
            direction=self.spec.direction,
            length=self.spec.length,
            width=self.spec.width,
            states=states,
            mean_speed=compute_mean_speed(states),
        )


def _truth_lane_changes(
    timeline: _VehicleTimeline, track: Track, settle_speed: float
) -> List[LaneChangeTruth]:
    out: List[LaneChangeTruth] = []
    n = len(track.states)
    vy = timeline.vy
    lanes = timeline.lanes
    fps = 1.0 / timeline.dt
    pending: List[Dict] = []
    for m in timeline.maneuvers:
        t0, T = m["t0"], m["params"].duration
        lo = max(int(math.floor(t0 * fps)) - timeline.first - 1, 1)
        hi = min(int(math.ceil((t0 + T) * fps)) - timeline.first + 1, n - 1)
        crossing = None
        for i in range(lo, hi + 1):
            if lanes[i] == m["to_lane"] and lanes[i - 1] != m["to_lane"]:
                crossing = i
                break
        if crossing is None:
            continue  # truncated before the marking: no lane change observed
        start, found_start = 0, False
        for j in range(crossing, -1, -1):
            if abs(vy[j]) < settle_speed:
                start, found_start = j, True
                break
        end, found_end = n - 1, False
        for j in range(crossing, n):
            if abs(vy[j]) < settle_speed:
                end, found_end = j, True
                break
        complete = found_start and found_end and start > 0 and end < n - 1
        pending.append(
            {"m": m, "crossing": crossing, "start": start, "end": end,
             "complete": complete}
        )
    for prev, cur in zip(pending, pending[1:]):
        if prev["end"] >= cur["start"]:
            lo, hi = prev["crossing"], cur["crossing"]
            split = min(range(lo, hi), key=lambda j: (abs(vy[j]), j))
            prev["end"] = split
            cur["start"] = min(split + 1, cur["crossing"])
    first = track.initial_frame
    for item in pending:
        m = item["m"]
        out.append(
            LaneChangeTruth(
                track_id=track.track_id,
                params=m["params"],
                t0=m["t0"],
                marking_y=m["marking"],
                from_lane=m["from_lane"],
                to_lane=m["to_lane"],
                crossing_frame=first + item["crossing"],
                start_frame=first + item["start"],
                end_frame=first + item["end"],
                complete=item["complete"],
            )
        )
    return out


def _validate_no_overlap(tracks: Sequence[Track], meta: RecordingMeta) -> None:
    if not tracks:
        return
    max_length = max(t.length for t in tracks)
    first = min(t.initial_frame for t in tracks)
    last = max(t.final_frame for t in tracks)
    for frame in range(first, last + 1):
        boxes = []
        for t in tracks:
            s = t.state_at(frame)
            if s is not None:
                boxes.append((s.x, s.y, t.length, t.width, t.track_id))
        boxes.sort()
        for i, (x1, y1, l1, w1, id1) in enumerate(boxes):
            for x2, y2, l2, w2, id2 in boxes[i + 1 :]:
                if x2 - x1 >= (l1 + max_length) / 2.0:
                    break
                if x2 - x1 < (l1 + l2) / 2.0 and abs(y2 - y1) < (w1 + w2) / 2.0:
                    raise ScriptError(
                        f"vehicles {id1} and {id2} overlap at frame {frame}"
                    )


class _FrameIndex:
    """Per-frame, per-(direction, lane) vehicles sorted by x."""

    def __init__(self, tracks: Sequence[Track]) -> None:
        self.cells: Dict[Tuple[int, DrivingDirection, int], List[Tuple[float, int]]] = {}
        for t in tracks:
            for s in t.states:
                self.cells.setdefault((s.frame, t.direction, s.lane_id), []).append(
                    (s.x, t.track_id)
                )
        for entries in self.cells.values():
            entries.sort()

    def nearest(self, track: Track, frame: int, ahead: bool) -> int:
        state = track.state_at(frame)
        if state is None:
            return NO_VEHICLE
        entries = self.cells.get((frame, track.direction, state.lane_id), [])
        xs = [e[0] for e in entries]
        want_larger_x = (track.direction.travel_sign > 0) == ahead
        if want_larger_x:
            for j in range(bisect.bisect_right(xs, state.x), len(entries)):
                if entries[j][1] != track.track_id:
                    return entries[j][1]
            return NO_VEHICLE
        j = bisect.bisect_left(xs, state.x) - 1
        while j >= 0:
            run_start = bisect.bisect_left(xs, xs[j])
            for m in range(run_start, j + 1):
                if entries[m][1] != track.track_id:
                    return entries[m][1]
            j = run_start - 1
        return NO_VEHICLE


def _truth_cut_ins(
    lane_changes: Sequence[LaneChangeTruth], tracks: Sequence[Track]
) -> List[CutInScenario]:
    """Cut-in scenarios recomputed geometrically from the exact states."""
    by_id = {t.track_id: t for t in tracks}
    index = _FrameIndex(tracks)
    scenarios: List[CutInScenario] = []
    for lc in lane_changes:
        changer = by_id[lc.track_id]
        f = lc.crossing_frame
        tailing_id = index.nearest(changer, f, ahead=False)
        if tailing_id == NO_VEHICLE:
            continue
        tail = by_id[tailing_id]
        tail_state = tail.state_at(f)
        changer_state = changer.state_at(f)
        gap = max(
            abs(changer_state.x - tail_state.x) - (changer.length + tail.length) / 2.0,
            0.0,
        )
        tail_speed = abs(tail_state.vx)
        entry_thw = gap / tail_speed if tail_speed > SPEED_FLOOR else UNDEFINED

        min_dhw = min_thw = min_ttc = UNDEFINED
        lo = max(lc.start_frame, tail.initial_frame)
        hi = min(lc.end_frame, tail.final_frame)
        for frame in range(lo, hi + 1):
            if index.nearest(tail, frame, ahead=True) != lc.track_id:
                continue
            ts = tail.state_at(frame)
            cs = changer.state_at(frame)
            if cs is None:
                continue
            dhw = max(abs(cs.x - ts.x) - (changer.length + tail.length) / 2.0, 0.0)
            v_tail, v_changer = abs(ts.vx), abs(cs.vx)
            thw = dhw / v_tail if v_tail > SPEED_FLOOR else UNDEFINED
            closing = v_tail - v_changer
            ttc = dhw / closing if closing > SPEED_FLOOR else UNDEFINED
            if min_dhw == UNDEFINED or dhw < min_dhw:
                min_dhw = dhw
            if thw != UNDEFINED and (min_thw == UNDEFINED or thw < min_thw):
                min_thw = thw
            if ttc != UNDEFINED and (min_ttc == UNDEFINED or ttc < min_ttc):
                min_ttc = ttc

        preceding_id = index.nearest(changer, f, ahead=True)
        gap_between = UNDEFINED
        if preceding_id != NO_VEHICLE:
            lead = by_id[preceding_id]
            lead_state = lead.state_at(f)
            gap_between = max(
                abs(lead_state.x - tail_state.x) - (lead.length + tail.length) / 2.0,
                0.0,
            )
        side = (
            CutInSide.FROM_LEFT
            if lc.from_lane == left_lane_id(lc.to_lane, tail.direction)
            else CutInSide.FROM_RIGHT
        )
        scenarios.append(
            CutInScenario(
                track_id=lc.track_id,
                tailing_id=tailing_id,
                preceding_id=preceding_id,
                crossing_frame=f,
                entry_thw=entry_thw,
                tail_speed_at_entry=tail_speed,
                min_dhw=min_dhw,
                min_thw=min_thw,
                min_ttc=min_ttc,
                gap_size=gap_between,
                side=side,
            )
        )
    return scenarios


def generate_truth(script: ScenarioScript, settle_speed: float = 0.1) -> GroundTruth:
    """Exact tracks, lane-change episodes and cut-ins for a scenario script.

    ``settle_speed`` is the |vy| threshold delimiting lane-change episode
    extents (it matches the maneuver detector's default so clean pipelines
    agree with the truth). Raises ScriptError when the script is
    inconsistent or makes vehicles overlap.
    """
    meta = script.meta()
    tracks: List[Track] = []
    lane_changes: List[LaneChangeTruth] = []
    dropouts: Dict[int, Tuple[Tuple[int, int], ...]] = {}
    for index, spec in enumerate(script.vehicles):
        timeline = _VehicleTimeline(index, spec, script)
        track = timeline.track(track_id=index + 1)
        tracks.append(track)
        lane_changes.extend(_truth_lane_changes(timeline, track, settle_speed))
        if spec.dropout_windows:
            dropouts[track.track_id] = tuple(
                (int(a), int(b)) for a, b in spec.dropout_windows
            )
    _validate_no_overlap(tracks, meta)
    lane_changes.sort(key=lambda lc: (lc.track_id, lc.crossing_frame))
    cut_ins = _truth_cut_ins(lane_changes, tracks)
    return GroundTruth(
        meta=meta,
        tracks=tuple(tracks),
        lane_changes=tuple(lane_changes),
        episodes=tuple(lc.episode() for lc in lane_changes),
        cut_ins=tuple(cut_ins),
        scripted_dropouts=dropouts,
        road_length=script.road_length,
    )


def corrupt(
    tracks: Sequence[Track],
    noise: NoiseSpec,
    seed: int,
    meta: Optional[RecordingMeta] = None,
    road_length: float = 420.0,
    scripted_dropouts: Optional[Mapping[int, Sequence[Tuple[int, int]]]] = None,
) -> List[List[Detection]]:
    """Corrupt truth tracks into per-frame detection lists.

    Per frame, vehicles are visited in track-id order: a vehicle inside a
    scripted dropout window or an active random burst emits nothing; others
    start a burst with the configured probability or emit their center plus
    Gaussian noise and their true extents. False positives are then drawn
    (Poisson count per frame) uniformly over the road area. The RNG draw
    order is fixed, so the output is a pure function of the inputs and seed.
    """
    if noise.false_positive_rate > 0 and meta is None:
        raise ValueError("false positives need `meta` for the road geometry")
    rng = np.random.default_rng(seed)
    scripted = scripted_dropouts or {}
    ordered = sorted(tracks, key=lambda t: t.track_id)
    if not ordered:
        return []
    n_frames = max(t.final_frame for t in ordered) + 1
    burst_left: Dict[int, int] = {t.track_id: 0 for t in ordered}
    frames: List[List[Detection]] = []
    for frame in range(n_frames):
        dets: List[Detection] = []
        for track in ordered:
            state = track.state_at(frame)
            if state is None:
                continue
            if any(a <= frame <= b for a, b in scripted.get(track.track_id, ())):
                continue
            if burst_left[track.track_id] > 0:
                burst_left[track.track_id] -= 1
                continue
            if noise.dropout_probability > 0 and rng.random() < noise.dropout_probability:
                burst_left[track.track_id] = noise.dropout_burst_length - 1
                continue
            cx, cy = state.x, state.y
            if noise.position_sigma > 0:
                cx += rng.normal(0.0, noise.position_sigma)
                cy += rng.normal(0.0, noise.position_sigma)
            dets.append(
                Detection(
                    frame=frame,
                    cx=cx,
                    cy=cy,
                    length=track.length,
                    width=track.width,
                    class_hint=track.vehicle_class,
                )
            )
        if noise.false_positive_rate > 0:
            upper = meta.upper_lane_boundaries
            lower = meta.lower_lane_boundaries
            width_upper = upper[-1] - upper[0]
            width_lower = lower[-1] - lower[0]
            for _ in range(int(rng.poisson(noise.false_positive_rate))):
                x = rng.uniform(0.0, road_length)
                r = rng.uniform(0.0, width_upper + width_lower)
                y = upper[0] + r if r < width_upper else lower[0] + (r - width_upper)
                dets.append(
                    Detection(
                        frame=frame, cx=x, cy=y, length=4.5, width=2.0,
                        class_hint=VehicleClass.CAR,
                    )
                )
        frames.append(dets)
    return frames


# ---------------------------------------------------------------------------
# Script files (JSON)


def _require(mapping: Mapping, key: str, where: str):
    if key not in mapping:
        raise ScriptError(f"{where}: missing required key {key!r}")
    return mapping[key]


def script_from_dict(data: Mapping) -> ScenarioScript:
    if not isinstance(data, Mapping):
        raise ScriptError("script root must be an object")
    try:
        noise_data = data.get("noise", {})
        noise = NoiseSpec(
            position_sigma=float(noise_data.get("position_sigma", 0.0)),
            dropout_probability=float(noise_data.get("dropout_probability", 0.0)),
            dropout_burst_length=int(noise_data.get("dropout_burst_length", 1)),
            false_positive_rate=float(noise_data.get("false_positive_rate", 0.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ScriptError(f"noise: {exc}") from exc
    vehicles: List[VehicleSpec] = []
    for i, v in enumerate(data.get("vehicles", [])):
        where = f"vehicles[{i}]"
        try:
            direction_text = str(_require(v, "direction", where)).lower()
            if direction_text not in ("upper", "lower"):
                raise ScriptError(f"{where}: direction must be 'upper' or 'lower'")
            lane_changes = tuple(
                ScriptedLaneChange(
                    start_time=float(_require(lc, "start_time", f"{where}.lane_changes[{j}]")),
                    duration=float(_require(lc, "duration", f"{where}.lane_changes[{j}]")),
                    to_lane=int(_require(lc, "to_lane", f"{where}.lane_changes[{j}]")),
                    d_start=None if lc.get("d_start") is None else float(lc["d_start"]),
                    d_end=None if lc.get("d_end") is None else float(lc["d_end"]),
                )
                for j, lc in enumerate(v.get("lane_changes", []))
            )
            segments = tuple(
                SpeedSegment(
                    duration=float(_require(s, "duration", f"{where}.speed_segments[{j}]")),
                    acceleration=float(
                        _require(s, "acceleration", f"{where}.speed_segments[{j}]")
                    ),
                )
                for j, s in enumerate(v.get("speed_segments", []))
            )
            vehicles.append(
                VehicleSpec(
                    vehicle_class=VehicleClass.parse(str(v.get("class", "Car"))),
                    direction=(
                        DrivingDirection.UPPER
                        if direction_text == "upper"
                        else DrivingDirection.LOWER
                    ),
                    entry_lane=int(_require(v, "entry_lane", where)),
                    entry_time=float(v.get("entry_time", 0.0)),
                    exit_time=None if v.get("exit_time") is None else float(v["exit_time"]),
                    entry_x=None if v.get("entry_x") is None else float(v["entry_x"]),
                    initial_speed=float(v.get("initial_speed", 25.0)),
                    length=float(v.get("length", 4.5)),
                    width=float(v.get("width", 2.0)),
                    speed_segments=segments,
                    lane_changes=lane_changes,
                    dropout_windows=tuple(
                        (int(a), int(b)) for a, b in v.get("dropout_windows", [])
                    ),
                )
            )
        except ScriptError:
            raise
        except (TypeError, ValueError, KeyError) as exc:
            raise ScriptError(f"{where}: {exc}") from exc
    try:
        script = ScenarioScript(
            seed=int(_require(data, "seed", "script")),
            duration=float(_require(data, "duration", "script")),
            frame_rate=float(data.get("frame_rate", 25.0)),
            road_length=float(data.get("road_length", 420.0)),
            recording_id=int(data.get("recording_id", 1)),
            location_id=int(data.get("location_id", 1)),
            upper_lane_boundaries=tuple(
                float(b) for b in data.get("upper_lane_boundaries", DEFAULT_UPPER_BOUNDARIES)
            ),
            lower_lane_boundaries=tuple(
                float(b) for b in data.get("lower_lane_boundaries", DEFAULT_LOWER_BOUNDARIES)
            ),
            upper_speed_limits=(
                None
                if data.get("upper_speed_limits") is None
                else tuple(
                    UNLIMITED_SPEED if float(v) == -1.0 else float(v)
                    for v in data["upper_speed_limits"]
                )
            ),
            lower_speed_limits=(
                None
                if data.get("lower_speed_limits") is None
                else tuple(
                    UNLIMITED_SPEED if float(v) == -1.0 else float(v)
                    for v in data["lower_speed_limits"]
                )
            ),
            vehicles=tuple(vehicles),
            noise=noise,
        )
    except ScriptError:
        raise
    except (TypeError, ValueError) as exc:
        raise ScriptError(f"script: {exc}") from exc
    try:
        script.meta()  # lane layout and speed limits must form a valid site
    except ValueError as exc:
        raise ScriptError(f"script: {exc}") from exc
    return script


def load_script(path: Path) -> ScenarioScript:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScriptError(f"{path}: invalid JSON ({exc})") from exc
    return script_from_dict(data)
