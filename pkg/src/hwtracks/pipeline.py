"""Pipeline configuration and per-recording stage drivers.

The CLI chains these stages over one or many recordings; recordings are
independent, so they parallelize freely while every per-recording output
stays a pure function of (inputs, config).
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .core import Track
from .dataset_io import (
    Recording,
    RecordingFileSet,
    read_recording,
    read_recording_meta,
    write_recording,
)
from .lane_change import (
    CutInScenario,
    DegenerateEpisode,
    FitConfig,
    InsufficientData,
    LaneChangeFitResult,
    extract_cut_ins,
    fit_episode,
)
from .maneuvers import ManeuverConfig, ManeuverEpisode, ManeuverKind, detect_all
from .smoothing import SmootherConfig, smooth_track_with_diagnostics
from .surround import compute_surround
from .tracking import TrackerConfig, build_tracks, read_detections


@dataclass(frozen=True)
class StatsConfig:
    mean_speed_bin: float = 1.0     # m/s
    speed_bin: float = 2.0          # m/s, decile band over tailing speed
    thw_bin: float = 0.25           # s
    truck_ratio_window: float = 60.0  # s

    def __post_init__(self) -> None:
        for name in ("mean_speed_bin", "speed_bin", "thw_bin", "truck_ratio_window"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class PipelineConfig:
    """Union of all stage configs; a fully defaulted instance is valid.

    Per-recording quantities (tracker frame rate, smoother time step) are
    overridden from each recording's meta at run time.
    """

    tracker: TrackerConfig = field(default_factory=TrackerConfig)
    smoother: SmootherConfig = field(default_factory=lambda: SmootherConfig(dt=0.04))
    maneuvers: ManeuverConfig = field(default_factory=ManeuverConfig)
    fit: FitConfig = field(default_factory=FitConfig)
    stats: StatsConfig = field(default_factory=StatsConfig)
    jobs: int = 1
    seed_override: Optional[int] = None

    def __post_init__(self) -> None:
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


def _merge_section(cls, defaults, data: Dict, where: str):
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"{where}: unknown key(s) {sorted(unknown)}")
    return dataclasses.replace(defaults, **data)


def load_pipeline_config(path: Optional[Path] = None, **overrides) -> PipelineConfig:
    """PipelineConfig from an optional JSON file plus keyword overrides.

    The file may set any subset of the sections ``tracker``, ``smoother``,
    ``maneuvers``, ``fit``, ``stats`` and the scalars ``jobs`` and
    ``seed_override``; flags passed as keyword overrides win over the file.
    """
    cfg = PipelineConfig()
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("config root must be a JSON object")
        sections = {
            "tracker": (TrackerConfig, "tracker"),
            "smoother": (SmootherConfig, "smoother"),
            "maneuvers": (ManeuverConfig, "maneuvers"),
            "fit": (FitConfig, "fit"),
            "stats": (StatsConfig, "stats"),
        }
        kwargs = {}
        for key, value in data.items():
            if key in sections:
                cls, attr = sections[key]
                if not isinstance(value, dict):
                    raise ValueError(f"config section {key!r} must be an object")
                kwargs[attr] = _merge_section(cls, getattr(cfg, attr), value, key)
            elif key in ("jobs", "seed_override"):
                kwargs[key] = value
            else:
                raise ValueError(f"unknown config key {key!r}")
        cfg = dataclasses.replace(cfg, **kwargs)
    valid = {f.name for f in dataclasses.fields(PipelineConfig)}
    cleaned = {k: v for k, v in overrides.items() if v is not None}
    unknown = set(cleaned) - valid
    if unknown:
        raise ValueError(f"unknown override(s) {sorted(unknown)}")
    return dataclasses.replace(cfg, **cleaned)


# ---------------------------------------------------------------------------
# Stages


def track_stage(
    detections_path: Path, meta_path: Path, cfg: PipelineConfig, output_dir: Path
) -> RecordingFileSet:
    """detections + site meta -> tracked, smoothed, annotated recording files.

    Also writes ``NN_smoothingReport.json`` with per-track diagnostics (RMS
    deviation of the smoothed positions from the measurements, covariance
    health).
    """
    meta = read_recording_meta(meta_path)
    detections = read_detections(detections_path)
    tracker_cfg = dataclasses.replace(cfg.tracker, frame_rate=meta.frame_rate)
    smoother_cfg = dataclasses.replace(cfg.smoother, dt=1.0 / meta.frame_rate)
    raw_tracks = build_tracks(detections, tracker_cfg)
    tracks = []
    report = []
    for raw in raw_tracks:
        track, diag = smooth_track_with_diagnostics(raw, smoother_cfg, meta)
        tracks.append(track)
        report.append(
            {
                "trackId": diag.track_id,
                "frames": diag.frames,
                "measured": diag.measured,
                "rmsDeviation": round(diag.rms_deviation, 6),
                "usedPinv": diag.used_pinv,
            }
        )
    surround = compute_surround(tracks, meta)
    paths = write_recording(meta, tracks, surround, output_dir)
    report_path = output_dir / f"{meta.recording_id:02d}_smoothingReport.json"
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump({"recordingId": meta.recording_id, "tracks": report}, fh, indent=2)
        fh.write("\n")
    return paths


@dataclass(frozen=True)
class ExtractResult:
    recording_id: int
    tracks: Tuple[Track, ...]
    episodes: Tuple[ManeuverEpisode, ...]
    fits: Tuple[Tuple[ManeuverEpisode, LaneChangeFitResult], ...]
    cut_ins: Tuple[CutInScenario, ...]
    fit_failures: int


def extract_stage(recording: Recording, cfg: PipelineConfig) -> ExtractResult:
    """Episodes, lane-change fits and cut-ins for one loaded recording."""
    episodes: List[ManeuverEpisode] = []
    for track in recording.tracks:
        episodes.extend(
            detect_all(
                track,
                recording.surround[track.track_id],
                recording.meta,
                cfg.maneuvers,
            )
        )
    episodes.sort(key=lambda e: (e.track_id, e.kind.value, e.start_frame))

    by_id = {t.track_id: t for t in recording.tracks}
    fits = []
    failures = 0
    for episode in episodes:
        if episode.kind is not ManeuverKind.LANE_CHANGE:
            continue
        try:
            fits.append(
                (episode, fit_episode(by_id[episode.track_id], episode,
                                      recording.meta, cfg.fit))
            )
        except (InsufficientData, DegenerateEpisode):
            failures += 1
    cut_ins = extract_cut_ins(episodes, recording.tracks, recording.surround,
                              recording.meta)
    return ExtractResult(
        recording_id=recording.meta.recording_id,
        tracks=recording.tracks,
        episodes=tuple(episodes),
        fits=tuple(fits),
        cut_ins=tuple(cut_ins),
        fit_failures=failures,
    )


def extract_recording_files(
    paths: RecordingFileSet, cfg: PipelineConfig
) -> ExtractResult:
    return extract_stage(read_recording(paths), cfg)
