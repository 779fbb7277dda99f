"""Forward Kalman filtering and Rauch-Tung-Striebel smoothing of tracks.

The motion model is constant acceleration with white jerk driving noise.
The x and y axes carry no coupling in this model, so each track is smoothed
as two independent 3-state chains (position, velocity, acceleration); this
halves the cost and gives the same result as a joint 6-state filter.

Frames flagged as predicted (coasted by the tracker) contribute no
measurement: the filter runs predict-only across them, and the backward
pass fills them with smoothed estimates informed by both sides of the gap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .core import (
    DrivingDirection,
    KinematicState,
    RecordingMeta,
    Track,
    compute_mean_speed,
    nearest_lane_id,
)
from .tracking import RawTrack

#: Covariance eigenvalues may dip this far below zero before the run is
#: declared numerically failed.
PSD_TOLERANCE = 1e-9


class NumericalFailure(Exception):
    """Covariance lost positive semi-definiteness beyond tolerance."""

    def __init__(self, frame: int, message: str) -> None:
        self.frame = frame
        super().__init__(f"frame {frame}: {message}")


@dataclass(frozen=True)
class SmootherConfig:
    """Noise model of the smoother.

    The initial sigmas keep the zero-velocity/zero-acceleration start from
    biasing the smoothed estimates near the track head: they are wide enough
    that the first measurements dominate within a few frames.
    """

    dt: float
    measurement_sigma: float = 0.10
    jerk_sigma: float = 2.0
    initial_velocity_sigma: float = 10000.0
    initial_accel_sigma: float = 1000.0

    def __post_init__(self) -> None:
        for name in ("dt", "measurement_sigma", "jerk_sigma",
                     "initial_velocity_sigma", "initial_accel_sigma"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @classmethod
    def for_frame_rate(cls, frame_rate: float, **kwargs) -> "SmootherConfig":
        return cls(dt=1.0 / frame_rate, **kwargs)


def transition_matrix(dt: float) -> np.ndarray:
    return np.array([[1.0, dt, dt * dt / 2.0], [0.0, 1.0, dt], [0.0, 0.0, 1.0]])


def process_noise(dt: float, jerk_sigma: float) -> np.ndarray:
    """White-jerk process noise: Q = jerk_sigma^2 * g g^T, g = [dt^3/6, dt^2/2, dt]."""
    g = np.array([dt**3 / 6.0, dt**2 / 2.0, dt])
    return jerk_sigma**2 * np.outer(g, g)


@dataclass(frozen=True)
class AxisSeries:
    """Per-frame filtered and one-step-predicted moments of one axis."""

    means: np.ndarray       # (N, 3) filtered [pos, vel, acc]
    covs: np.ndarray        # (N, 3, 3) filtered covariances
    pred_means: np.ndarray  # (N, 3) predicted prior to the update
    pred_covs: np.ndarray   # (N, 3, 3)


@dataclass(frozen=True)
class FilteredSeries:
    x: AxisSeries
    y: AxisSeries
    dt: float


@dataclass(frozen=True)
class SmoothedSeries:
    """Smoothed 6-vector states (x, vx, ax, y, vy, ay) and covariances."""

    states: np.ndarray       # (N, 6)
    covariances: np.ndarray  # (N, 6, 6), block diagonal over the two axes
    used_pinv: bool = False

    def positions(self) -> np.ndarray:
        return self.states[:, [0, 3]]

    def velocities(self) -> np.ndarray:
        return self.states[:, [1, 4]]

    def accelerations(self) -> np.ndarray:
        return self.states[:, [2, 5]]


def _check_psd(covs: np.ndarray, what: str) -> None:
    sym = (covs + np.swapaxes(covs, -1, -2)) / 2.0
    eigvals = np.linalg.eigvalsh(sym)
    worst = eigvals.min(axis=-1)
    bad = np.nonzero(worst < -PSD_TOLERANCE)[0]
    if bad.size:
        frame = int(bad[0])
        raise NumericalFailure(
            frame, f"{what} covariance eigenvalue {worst[frame]:.3e} < -{PSD_TOLERANCE}"
        )


def _filter_axis(
    z: np.ndarray, predicted: np.ndarray, cfg: SmootherConfig
) -> AxisSeries:
    n = len(z)
    F = transition_matrix(cfg.dt)
    Q = process_noise(cfg.dt, cfg.jerk_sigma)
    R = cfg.measurement_sigma**2
    I = np.eye(3)

    means = np.empty((n, 3))
    covs = np.empty((n, 3, 3))
    pred_means = np.empty((n, 3))
    pred_covs = np.empty((n, 3, 3))

    x = np.array([z[0], 0.0, 0.0])
    P = np.diag(
        [cfg.measurement_sigma**2, cfg.initial_velocity_sigma**2,
         cfg.initial_accel_sigma**2]
    )
    means[0], covs[0] = x, P
    pred_means[0], pred_covs[0] = x, P

    for k in range(1, n):
        x = F @ x
        P = F @ P @ F.T + Q
        pred_means[k], pred_covs[k] = x, P
        if not predicted[k]:
            # Scalar measurement of the position component; Joseph-form update.
            S = P[0, 0] + R
            K = P[:, 0] / S
            x = x + K * (z[k] - x[0])
            A = I - np.outer(K, [1.0, 0.0, 0.0])
            P = A @ P @ A.T + R * np.outer(K, K)
        means[k], covs[k] = x, P

    _check_psd(covs, "filtered")
    return AxisSeries(means=means, covs=covs, pred_means=pred_means, pred_covs=pred_covs)


def forward_filter(
    positions: Sequence[Tuple[float, float]],
    predicted: Optional[Sequence[bool]],
    cfg: SmootherConfig,
) -> FilteredSeries:
    """Run the constant-acceleration Kalman filter over both axes.

    ``positions`` are the per-frame (x, y) observations at a fixed frame
    interval ``cfg.dt``; ``predicted`` flags frames whose value is a tracker
    prediction rather than a measurement (those frames skip the update).
    The state initializes at the first observation with zero velocity and
    acceleration under the configured prior sigmas.
    """
    pos = np.asarray(positions, dtype=float)
    if pos.ndim != 2 or pos.shape[1] != 2 or pos.shape[0] < 1:
        raise ValueError("positions must be a non-empty sequence of (x, y)")
    if predicted is None:
        flags = np.zeros(len(pos), dtype=bool)
    else:
        flags = np.asarray(predicted, dtype=bool)
        if flags.shape != (len(pos),):
            raise ValueError("predicted flags must align with positions")
    return FilteredSeries(
        x=_filter_axis(pos[:, 0], flags, cfg),
        y=_filter_axis(pos[:, 1], flags, cfg),
        dt=cfg.dt,
    )


def _smooth_axis(axis: AxisSeries, F: np.ndarray) -> Tuple[np.ndarray, np.ndarray, bool]:
    n = len(axis.means)
    xs = axis.means.copy()
    ps = axis.covs.copy()
    used_pinv = False
    for k in range(n - 2, -1, -1):
        pp = axis.pred_covs[k + 1]
        a = axis.covs[k] @ F.T
        try:
            gain = np.linalg.solve(pp, a.T).T
        except np.linalg.LinAlgError:
            gain = a @ np.linalg.pinv(pp)
            used_pinv = True
        xs[k] = axis.means[k] + gain @ (xs[k + 1] - axis.pred_means[k + 1])
        cov = axis.covs[k] + gain @ (ps[k + 1] - pp) @ gain.T
        ps[k] = (cov + cov.T) / 2.0
    return xs, ps, used_pinv


def rts_smooth(filtered: FilteredSeries, cfg: SmootherConfig) -> SmoothedSeries:
    """Backward RTS pass over a filtered series.

    The last frame's smoothed state equals the last filtered state; earlier
    frames are corrected with the standard smoother gain. A singular
    predicted covariance falls back to the pseudo-inverse and is flagged via
    ``used_pinv``.
    """
    F = transition_matrix(cfg.dt)
    xs_x, ps_x, pinv_x = _smooth_axis(filtered.x, F)
    xs_y, ps_y, pinv_y = _smooth_axis(filtered.y, F)
    n = len(xs_x)
    states = np.hstack([xs_x, xs_y])
    covariances = np.zeros((n, 6, 6))
    covariances[:, :3, :3] = ps_x
    covariances[:, 3:, 3:] = ps_y
    _check_psd(covariances, "smoothed")
    return SmoothedSeries(
        states=states, covariances=covariances, used_pinv=pinv_x or pinv_y
    )


def carriageway_of(y_values: Sequence[float], meta: RecordingMeta) -> DrivingDirection:
    """Carriageway whose lane span is closest to the track's median y."""
    median_y = float(np.median(np.asarray(y_values, dtype=float)))

    def span_distance(boundaries: Tuple[float, ...]) -> float:
        if boundaries[0] <= median_y < boundaries[-1]:
            return 0.0
        return min(abs(median_y - boundaries[0]), abs(median_y - boundaries[-1]))

    upper = span_distance(meta.upper_lane_boundaries)
    lower = span_distance(meta.lower_lane_boundaries)
    return DrivingDirection.UPPER if upper <= lower else DrivingDirection.LOWER


@dataclass(frozen=True)
class SmoothingDiagnostics:
    """Per-track smoothing health, reported by the CLI's track stage."""

    track_id: int
    frames: int
    measured: int
    rms_deviation: float  # smoothed vs measured positions, 2D, meters
    used_pinv: bool


def smooth_track(
    raw: RawTrack, cfg: SmootherConfig, meta: RecordingMeta
) -> Track:
    track, _ = smooth_track_with_diagnostics(raw, cfg, meta)
    return track


def smooth_track_with_diagnostics(
    raw: RawTrack, cfg: SmootherConfig, meta: RecordingMeta
) -> Tuple[Track, SmoothingDiagnostics]:
    """Smooth a confirmed raw track into a Track with full kinematic states.

    Runs the forward filter and the RTS pass per axis, derives the lane id
    of every frame from the smoothed lateral position (off-span positions
    clamp to the nearest edge lane), and recomputes the mean speed.
    """
    positions = [(obs.x, obs.y) for obs in raw.observations]
    flags = [not obs.measured for obs in raw.observations]
    smoothed = rts_smooth(forward_filter(positions, flags, cfg), cfg)

    direction = carriageway_of(smoothed.states[:, 3], meta)
    states = []
    for obs, row in zip(raw.observations, smoothed.states):
        x, vx, ax, y, vy, ay = (float(v) for v in row)
        states.append(
            KinematicState(
                frame=obs.frame, x=x, y=y, vx=vx, vy=vy, ax=ax, ay=ay,
                lane_id=nearest_lane_id(y, meta, direction),
            )
        )
    length, width = raw.extent()
    track = Track(
        track_id=raw.track_id,
        vehicle_class=raw.decide_class(),
        direction=direction,
        length=length,
        width=width,
        states=tuple(states),
        mean_speed=compute_mean_speed(states),
    )
    deviations = [
        (obs.x - s.x) ** 2 + (obs.y - s.y) ** 2
        for obs, s in zip(raw.observations, states)
        if obs.measured
    ]
    diagnostics = SmoothingDiagnostics(
        track_id=raw.track_id,
        frames=len(states),
        measured=raw.measured_count,
        rms_deviation=float(np.sqrt(np.mean(deviations))) if deviations else 0.0,
        used_pinv=smoothed.used_pinv,
    )
    return track, diagnostics
