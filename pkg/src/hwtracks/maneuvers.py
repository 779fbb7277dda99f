"""Per-frame maneuver labeling and episode extraction.

Four maneuver kinds are mined from each track: free driving and vehicle
following (mutually exclusive, decided by a THW threshold with hysteresis),
critical maneuvers (low TTC or THW to the preceding vehicle), and lane
changes (a lane-id crossing that sticks on the new lane). Episode extents of
lane changes run between the lateral-speed settle points around the
crossing, which also defines whether a lane change counts as complete.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .core import ContractViolation, RecordingMeta, Track
from .surround import NO_VEHICLE, UNDEFINED, SurroundFrame


class ManeuverKind(Enum):
    FREE_DRIVING = "FreeDriving"
    VEHICLE_FOLLOWING = "VehicleFollowing"
    CRITICAL = "Critical"
    LANE_CHANGE = "LaneChange"


@dataclass(frozen=True)
class ManeuverConfig:
    following_thw_max: float = 3.0
    following_hysteresis: float = 0.5
    critical_ttc_max: float = 4.0
    critical_thw_max: float = 1.0
    lane_change_min_dwell: int = 25
    lateral_settle_speed: float = 0.1

    def __post_init__(self) -> None:
        for name in ("following_thw_max", "following_hysteresis", "critical_ttc_max",
                     "critical_thw_max", "lateral_settle_speed"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.lane_change_min_dwell < 1:
            raise ValueError("lane_change_min_dwell must be >= 1")
        if not self.following_hysteresis < self.following_thw_max:
            raise ValueError("following_hysteresis must be < following_thw_max")


@dataclass(frozen=True)
class ManeuverEpisode:
    track_id: int
    kind: ManeuverKind
    start_frame: int
    end_frame: int
    from_lane: Optional[int] = None
    to_lane: Optional[int] = None
    crossing_frame: Optional[int] = None
    complete: Optional[bool] = None

    def __post_init__(self) -> None:
        if self.start_frame > self.end_frame:
            raise ValueError("episode start must not exceed its end")
        if self.kind is ManeuverKind.LANE_CHANGE:
            if self.from_lane is None or self.to_lane is None or self.crossing_frame is None:
                raise ValueError("lane change episodes need from/to lanes and a crossing frame")
            if self.from_lane == self.to_lane:
                raise ValueError("lane change must change the lane")


def _check_alignment(track: Track, surround_frames: Sequence[SurroundFrame]) -> None:
    if len(surround_frames) != len(track.states) or any(
        sf.frame != st.frame for sf, st in zip(surround_frames, track.states)
    ):
        raise ContractViolation(
            f"track {track.track_id}: surround frames not aligned with states"
        )


def label_longitudinal(
    track: Track, surround_frames: Sequence[SurroundFrame], cfg: ManeuverConfig
) -> List[ManeuverKind]:
    """FreeDriving / VehicleFollowing label for every frame of the track.

    Following starts when a preceding vehicle exists with THW below
    ``following_thw_max`` and ends only when the THW exceeds the threshold
    plus the hysteresis band, the preceding vehicle disappears, or the THW
    becomes undefined. The hysteresis keeps the label from chattering when
    the THW rides the threshold.
    """
    _check_alignment(track, surround_frames)
    labels: List[ManeuverKind] = []
    following = False
    for sf in surround_frames:
        if sf.preceding_id == NO_VEHICLE or sf.thw == UNDEFINED:
            following = False
        elif not following:
            following = sf.thw < cfg.following_thw_max
        else:
            following = not sf.thw > cfg.following_thw_max + cfg.following_hysteresis
        labels.append(
            ManeuverKind.VEHICLE_FOLLOWING if following else ManeuverKind.FREE_DRIVING
        )
    return labels


def longitudinal_episodes(
    track: Track, surround_frames: Sequence[SurroundFrame], cfg: ManeuverConfig
) -> List[ManeuverEpisode]:
    """Maximal runs of the two longitudinal labels as episodes."""
    labels = label_longitudinal(track, surround_frames, cfg)
    episodes: List[ManeuverEpisode] = []
    start = 0
    for i in range(1, len(labels) + 1):
        if i == len(labels) or labels[i] is not labels[start]:
            episodes.append(
                ManeuverEpisode(
                    track_id=track.track_id,
                    kind=labels[start],
                    start_frame=track.states[start].frame,
                    end_frame=track.states[i - 1].frame,
                )
            )
            start = i
    return episodes


def detect_critical(
    track: Track, surround_frames: Sequence[SurroundFrame], cfg: ManeuverConfig
) -> List[ManeuverEpisode]:
    """Maximal runs of frames with low TTC or low THW to the preceding vehicle."""
    _check_alignment(track, surround_frames)
    critical = [
        (0.0 < sf.ttc < cfg.critical_ttc_max) or (0.0 < sf.thw < cfg.critical_thw_max)
        for sf in surround_frames
    ]
    episodes: List[ManeuverEpisode] = []
    start: Optional[int] = None
    for i, flag in enumerate(critical):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            episodes.append(
                ManeuverEpisode(
                    track_id=track.track_id,
                    kind=ManeuverKind.CRITICAL,
                    start_frame=track.states[start].frame,
                    end_frame=track.states[i - 1].frame,
                )
            )
            start = None
    if start is not None:
        episodes.append(
            ManeuverEpisode(
                track_id=track.track_id,
                kind=ManeuverKind.CRITICAL,
                start_frame=track.states[start].frame,
                end_frame=track.states[-1].frame,
            )
        )
    return episodes


def detect_lane_changes(
    track: Track, meta: RecordingMeta, cfg: ManeuverConfig
) -> List[ManeuverEpisode]:
    """Lane-change episodes of one track.

    A crossing is a frame whose lane id differs from the previous frame's;
    it becomes a lane change only when the new lane persists for at least
    ``lane_change_min_dwell`` frames (shorter stays are discarded bounces,
    and the return crossing of a bounce - back to the last lane the vehicle
    actually stayed on - is not a lane change either). The episode expands
    from the crossing to the nearest frames where the lateral speed settles
    below ``lateral_settle_speed`` (clamped at the track ends); the change
    is complete iff both settle points were found strictly inside the
    observed window. When the episodes of consecutive crossings would
    overlap (a double lane change), they are split at the frame of minimal
    |vy| between the crossings.
    """
    states = track.states
    n = len(states)
    lanes = [s.lane_id for s in states]
    vy = [s.vy for s in states]

    confirmed: List[int] = []
    settled_lane = lanes[0]
    for i in range(1, n):
        if lanes[i] == lanes[i - 1]:
            continue
        dwell = 0
        for j in range(i, n):
            if lanes[j] != lanes[i]:
                break
            dwell += 1
        if dwell < cfg.lane_change_min_dwell:
            continue
        if lanes[i] == settled_lane:
            continue  # return half of a bounce: never left the settled lane
        confirmed.append(i)
        settled_lane = lanes[i]

    settle = cfg.lateral_settle_speed
    raw: List[Dict] = []
    for i in confirmed:
        start, found_start = 0, False
        for j in range(i, -1, -1):
            if abs(vy[j]) < settle:
                start, found_start = j, True
                break
        end, found_end = n - 1, False
        for j in range(i, n):
            if abs(vy[j]) < settle:
                end, found_end = j, True
                break
        complete = found_start and found_end and start > 0 and end < n - 1
        raw.append({"crossing": i, "start": start, "end": end, "complete": complete})

    for prev, cur in zip(raw, raw[1:]):
        if prev["end"] >= cur["start"]:
            lo, hi = prev["crossing"], cur["crossing"]
            split = min(range(lo, hi), key=lambda j: (abs(vy[j]), j))
            prev["end"] = split
            cur["start"] = min(split + 1, cur["crossing"])

    return [
        ManeuverEpisode(
            track_id=track.track_id,
            kind=ManeuverKind.LANE_CHANGE,
            start_frame=states[ep["start"]].frame,
            end_frame=states[ep["end"]].frame,
            from_lane=lanes[ep["crossing"] - 1],
            to_lane=lanes[ep["crossing"]],
            crossing_frame=states[ep["crossing"]].frame,
            complete=ep["complete"],
        )
        for ep in raw
    ]


def detect_all(
    track: Track,
    surround_frames: Sequence[SurroundFrame],
    meta: RecordingMeta,
    cfg: ManeuverConfig,
) -> List[ManeuverEpisode]:
    """All episodes of one track, ordered by kind then start frame."""
    episodes = longitudinal_episodes(track, surround_frames, cfg)
    episodes += detect_critical(track, surround_frames, cfg)
    episodes += detect_lane_changes(track, meta, cfg)
    episodes.sort(key=lambda e: (e.kind.value, e.start_frame))
    return episodes


# ---------------------------------------------------------------------------
# Episode export (canonical CSV and JSON)

EPISODE_COLUMNS = [
    "recordingId",
    "trackId",
    "kind",
    "startFrame",
    "endFrame",
    "fromLane",
    "toLane",
    "crossingFrame",
    "complete",
]


def _episode_cells(recording_id: int, ep: ManeuverEpisode) -> List:
    is_lc = ep.kind is ManeuverKind.LANE_CHANGE
    return [
        recording_id,
        ep.track_id,
        ep.kind.value,
        ep.start_frame,
        ep.end_frame,
        ep.from_lane if is_lc else "",
        ep.to_lane if is_lc else "",
        ep.crossing_frame if is_lc else "",
        (1 if ep.complete else 0) if is_lc else "",
    ]


def write_episodes_csv(
    episodes: Sequence[ManeuverEpisode], recording_id: int, path: Path
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EPISODE_COLUMNS)
        for ep in episodes:
            writer.writerow(_episode_cells(recording_id, ep))


def write_episodes_json(
    episodes: Sequence[ManeuverEpisode], recording_id: int, path: Path
) -> None:
    items = []
    for ep in episodes:
        is_lc = ep.kind is ManeuverKind.LANE_CHANGE
        items.append(
            {
                "recordingId": recording_id,
                "trackId": ep.track_id,
                "kind": ep.kind.value,
                "startFrame": ep.start_frame,
                "endFrame": ep.end_frame,
                "fromLane": ep.from_lane if is_lc else None,
                "toLane": ep.to_lane if is_lc else None,
                "crossingFrame": ep.crossing_frame if is_lc else None,
                "complete": ep.complete if is_lc else None,
            }
        )
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(items, fh, indent=2)
        fh.write("\n")
