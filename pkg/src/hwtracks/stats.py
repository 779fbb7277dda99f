"""Dataset statistics: histograms, truck ratio, maneuver tallies, THW bands.

All aggregations are order-independent and conserve their sample counts.
Quantiles interpolate linearly between order statistics; a "decile band"
holds the ten quantile levels 0.1 .. 1.0 per bin, so its 5th entry is the
median and the last is the bin maximum.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .core import Track, VehicleClass
from .lane_change import CutInScenario
from .maneuvers import ManeuverEpisode, ManeuverKind
from .surround import UNDEFINED

DECILE_LEVELS = tuple((k + 1) / 10.0 for k in range(10))
#: Bins with fewer samples than this are flagged sparse in decile bands.
SPARSE_BIN_THRESHOLD = 10


@dataclass(frozen=True)
class Histogram:
    bin_edges: Tuple[float, ...]   # len = bins + 1, strictly increasing
    counts: Tuple[int, ...]        # per half-open bin [edge[i], edge[i+1])
    underflow: int = 0
    overflow: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts) + self.underflow + self.overflow

    def __post_init__(self) -> None:
        if self.bin_edges and len(self.bin_edges) != len(self.counts) + 1:
            raise ValueError("need one more edge than bins")
        for a, b in zip(self.bin_edges, self.bin_edges[1:]):
            if not b > a:
                raise ValueError("bin edges must be strictly increasing")


def build_histogram(values: Sequence[float], bin_edges: Sequence[float]) -> Histogram:
    """Count values into half-open bins; out-of-range samples go to under/overflow."""
    edges = tuple(float(e) for e in bin_edges)
    if not edges:
        if len(values):
            raise ValueError("cannot bin samples without edges")
        return Histogram(bin_edges=(), counts=())
    arr = np.asarray(values, dtype=float)
    underflow = int(np.count_nonzero(arr < edges[0]))
    overflow = int(np.count_nonzero(arr >= edges[-1]))
    inside = arr[(arr >= edges[0]) & (arr < edges[-1])]
    idx = np.searchsorted(edges, inside, side="right") - 1
    counts = np.bincount(idx, minlength=len(edges) - 1)
    return Histogram(
        bin_edges=edges,
        counts=tuple(int(c) for c in counts),
        underflow=underflow,
        overflow=overflow,
    )


def _span_edges(values: np.ndarray, bin_width: float) -> Tuple[float, ...]:
    """Edges k*w .. (k+1)*w covering all values (empty input gives no edges)."""
    if values.size == 0:
        return ()
    k_min = math.floor(float(values.min()) / bin_width)
    k_max = math.floor(float(values.max()) / bin_width)
    return tuple(k * bin_width for k in range(k_min, k_max + 2))


def mean_speed_histogram(tracks: Sequence[Track], bin_width: float) -> Histogram:
    """Histogram of per-track mean speeds in bins [k*w, (k+1)*w)."""
    if not bin_width > 0:
        raise ValueError("bin_width must be positive")
    speeds = np.asarray([t.mean_speed for t in tracks], dtype=float)
    return build_histogram(speeds, _span_edges(speeds, bin_width))


@dataclass(frozen=True)
class TruckRatioSeries:
    """Per-window truck share; NaN marks windows no vehicle entered."""

    window_starts: Tuple[float, ...]  # seconds
    ratios: Tuple[float, ...]
    entries: Tuple[int, ...]          # vehicles entering each window


def truck_ratio_over_time(
    tracks: Sequence[Track], window: float, frame_rate: float = 25.0
) -> TruckRatioSeries:
    """Truck ratio per time window, counting each vehicle once at its entry.

    A vehicle belongs to the window containing its first frame, so the
    per-window entry counts partition the vehicles.
    """
    if not window > 0:
        raise ValueError("window must be positive")
    if not tracks:
        return TruckRatioSeries((), (), ())
    entry_times = [t.initial_frame / frame_rate for t in tracks]
    n_windows = int(max(entry_times) // window) + 1
    vehicles = [0] * n_windows
    trucks = [0] * n_windows
    for track, entry in zip(tracks, entry_times):
        k = int(entry // window)
        vehicles[k] += 1
        if track.vehicle_class is VehicleClass.TRUCK:
            trucks[k] += 1
    ratios = tuple(
        trucks[k] / vehicles[k] if vehicles[k] else math.nan for k in range(n_windows)
    )
    return TruckRatioSeries(
        window_starts=tuple(k * window for k in range(n_windows)),
        ratios=ratios,
        entries=tuple(vehicles),
    )


@dataclass(frozen=True)
class ManeuverSummary:
    episode_counts: Dict[str, int]
    lane_changes_complete: int
    lane_changes_partial: int
    vehicle_count: int
    lane_change_rate: Optional[float]  # complete lane changes per vehicle


def maneuver_summary(
    episodes: Sequence[ManeuverEpisode], tracks: Sequence[Track]
) -> ManeuverSummary:
    counts = {kind.value: 0 for kind in ManeuverKind}
    complete = partial = 0
    for ep in episodes:
        counts[ep.kind.value] += 1
        if ep.kind is ManeuverKind.LANE_CHANGE:
            if ep.complete:
                complete += 1
            else:
                partial += 1
    n_vehicles = len(tracks)
    return ManeuverSummary(
        episode_counts=counts,
        lane_changes_complete=complete,
        lane_changes_partial=partial,
        vehicle_count=n_vehicles,
        lane_change_rate=complete / n_vehicles if n_vehicles else None,
    )


@dataclass(frozen=True)
class DecileBand:
    """Per-bin deciles of a y variable over bins of an x variable."""

    x_bin_centers: Tuple[float, ...]
    deciles: Tuple[Tuple[float, ...], ...]  # per bin, levels 0.1 .. 1.0
    counts: Tuple[int, ...]
    sparse: Tuple[bool, ...]                # fewer than SPARSE_BIN_THRESHOLD samples

    def medians(self) -> Tuple[float, ...]:
        return tuple(d[4] for d in self.deciles)


def build_decile_band(
    x: Sequence[float], y: Sequence[float], bin_width: float
) -> DecileBand:
    """Decile band of y binned by x (empty bins are dropped)."""
    if not bin_width > 0:
        raise ValueError("bin_width must be positive")
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape:
        raise ValueError("x and y must have the same length")
    if xa.size == 0:
        return DecileBand((), (), (), ())
    keys = np.floor(xa / bin_width).astype(int)
    centers = []
    deciles = []
    counts = []
    sparse = []
    for k in sorted(set(int(v) for v in keys)):
        values = ya[keys == k]
        centers.append((k + 0.5) * bin_width)
        deciles.append(tuple(float(q) for q in np.quantile(values, DECILE_LEVELS)))
        counts.append(int(values.size))
        sparse.append(values.size < SPARSE_BIN_THRESHOLD)
    return DecileBand(
        x_bin_centers=tuple(centers),
        deciles=tuple(deciles),
        counts=tuple(counts),
        sparse=tuple(sparse),
    )


@dataclass(frozen=True)
class CutInThwStats:
    histogram: Histogram
    band: DecileBand


def cut_in_thw_stats(
    scenarios: Sequence[CutInScenario],
    speed_bin: float,
    thw_bin: float = 0.25,
) -> CutInThwStats:
    """Entry-THW distribution and its decile band versus tailing speed.

    Only scenarios with a defined entry THW contribute.
    """
    if not speed_bin > 0 or not thw_bin > 0:
        raise ValueError("bin widths must be positive")
    defined = [s for s in scenarios if s.entry_thw != UNDEFINED]
    thw = np.asarray([s.entry_thw for s in defined], dtype=float)
    speed = np.asarray([s.tail_speed_at_entry for s in defined], dtype=float)
    return CutInThwStats(
        histogram=build_histogram(thw, _span_edges(thw, thw_bin)),
        band=build_decile_band(speed, thw, speed_bin),
    )


# ---------------------------------------------------------------------------
# Plot-ready exports


def write_histogram_csv(histogram: Histogram, path: Path) -> None:
    from .dataset_io import format_float

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["binStart", "binEnd", "count"])
        for i, count in enumerate(histogram.counts):
            writer.writerow(
                [
                    format_float(histogram.bin_edges[i]),
                    format_float(histogram.bin_edges[i + 1]),
                    count,
                ]
            )


def write_truck_ratio_csv(series: TruckRatioSeries, path: Path) -> None:
    from .dataset_io import format_float

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["windowStart", "entries", "truckRatio"])
        for start, entries, ratio in zip(series.window_starts, series.entries,
                                         series.ratios):
            writer.writerow(
                [
                    format_float(start),
                    entries,
                    "" if math.isnan(ratio) else format_float(ratio),
                ]
            )


def write_decile_band_csv(band: DecileBand, path: Path) -> None:
    from .dataset_io import format_float

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["binCenter", "count", "sparse"] + [f"d{k + 1}" for k in range(10)]
        )
        for center, count, is_sparse, deciles in zip(
            band.x_bin_centers, band.counts, band.sparse, band.deciles
        ):
            writer.writerow(
                [format_float(center), count, 1 if is_sparse else 0]
                + [format_float(d) for d in deciles]
            )


def write_summary_json(
    summary: ManeuverSummary, cut_in_count: int, path: Path
) -> None:
    payload = {
        "episodeCounts": summary.episode_counts,
        "laneChangesComplete": summary.lane_changes_complete,
        "laneChangesPartial": summary.lane_changes_partial,
        "vehicleCount": summary.vehicle_count,
        "laneChangeRate": summary.lane_change_rate,
        "cutInCount": cut_in_count,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
