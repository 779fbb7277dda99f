"""Symmetric lane-change trajectory model, episode fitting, cut-in extraction.

The model splits the maneuver into two polynomials over its duration T:

* lateral: the unique quintic with zero lateral speed and acceleration at
  both ends, running from ``d_start`` before the crossed marking to
  ``d_end`` beyond it. In normalized time s = t/T its shape factor is
  10 s^3 - 15 s^4 + 6 s^5.
* longitudinal: a quadratic, i.e. constant acceleration taking the speed
  from ``v_start`` to ``v_end``. (A quadratic cannot also have zero
  acceleration at the endpoints whenever the speeds differ; the speed
  degrees of freedom win and the endpoint condition binds laterally only.)

That leaves five free parameters: d_start, d_end, v_start, v_end and the
duration. Fitting exploits the structure: for a fixed placement (t0, T) both
polynomials are linear in their remaining parameters and solve in closed
form, so the search is only two-dimensional (coarse grid, then
golden-section refinement one variable at a time).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .core import ContractViolation, RecordingMeta, Track
from .maneuvers import ManeuverEpisode, ManeuverKind
from .surround import (
    NO_VEHICLE,
    SPEED_FLOOR,
    UNDEFINED,
    SurroundFrame,
    left_lane_id,
)

#: Quintic shape coefficients for s^3, s^4, s^5.
SHAPE_COEFFICIENTS = (10.0, -15.0, 6.0)


class Side(Enum):
    """Sign of the lateral motion in road coordinates: toLeft = +y.

    The names coincide with the driver's left/right on the lower
    carriageway and flip on the upper one.
    """

    TO_LEFT = "toLeft"
    TO_RIGHT = "toRight"

    @property
    def y_sign(self) -> int:
        return 1 if self is Side.TO_LEFT else -1


class CutInSide(Enum):
    """Where the lane changer came from, seen from the tailing vehicle."""

    FROM_LEFT = "fromLeft"
    FROM_RIGHT = "fromRight"


class InsufficientData(Exception):
    """Too few samples to fit the model."""


class DegenerateEpisode(Exception):
    """The samples cannot identify the model (singular or out-of-domain fit)."""


@dataclass(frozen=True)
class LaneChangeParams:
    """The five model parameters plus the lateral sign."""

    d_start: float   # distance from the crossed marking at maneuver start (m, > 0)
    d_end: float     # distance beyond the marking at maneuver end (m, > 0)
    v_start: float   # longitudinal speed at maneuver start (m/s, > 0)
    v_end: float     # longitudinal speed at maneuver end (m/s, > 0)
    duration: float  # maneuver duration T (s, > 0)
    side: Side

    def __post_init__(self) -> None:
        for name in ("d_start", "d_end", "v_start", "v_end", "duration"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


def shape(s):
    """Normalized lateral progress q(s) = 10 s^3 - 15 s^4 + 6 s^5 on [0, 1]."""
    c3, c4, c5 = SHAPE_COEFFICIENTS
    return s**3 * (c3 + s * (c4 + s * c5))


def shape_rate(s):
    c3, c4, c5 = SHAPE_COEFFICIENTS
    return s**2 * (3 * c3 + s * (4 * c4 + s * 5 * c5))


def shape_accel(s):
    c3, c4, c5 = SHAPE_COEFFICIENTS
    return s * (6 * c3 + s * (12 * c4 + s * 20 * c5))


def evaluate_model(params: LaneChangeParams, t):
    """Model state at maneuver time t in [0, duration].

    Returns (x_rel, y_rel, vx, vy, ax, ay): x_rel is the longitudinal
    distance traveled since the maneuver start, y_rel the lateral offset
    relative to the crossed marking. Accepts scalars or arrays.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0) or np.any(t_arr > params.duration):
        raise ContractViolation(f"t must lie in [0, {params.duration}]")
    T = params.duration
    sign = params.side.y_sign
    span = sign * (params.d_start + params.d_end)
    s = t_arr / T

    y_rel = -sign * params.d_start + span * shape(s)
    vy = span * shape_rate(s) / T
    ay = span * shape_accel(s) / T**2

    accel = (params.v_end - params.v_start) / T
    x_rel = params.v_start * t_arr + accel / 2.0 * t_arr**2
    vx = params.v_start + accel * t_arr
    ax = np.full_like(t_arr, accel)

    if np.isscalar(t) or t_arr.ndim == 0:
        return (float(x_rel), float(y_rel), float(vx), float(vy), float(ax), float(ay))
    return x_rel, y_rel, vx, vy, ax, ay


@dataclass(frozen=True)
class FitConfig:
    longitudinal_weight: float = 0.1
    duration_min: float = 1.0
    duration_max: float = 15.0
    duration_step: float = 0.5
    refine_tolerance: float = 1e-3
    max_refine_iterations: int = 200
    min_samples: int = 10
    min_amplitude: float = 0.1  # fits with d_start + d_end below this never converge

    def __post_init__(self) -> None:
        if not 0 < self.duration_min < self.duration_max:
            raise ValueError("need 0 < duration_min < duration_max")
        if not self.duration_step > 0 or not self.refine_tolerance > 0:
            raise ValueError("duration_step and refine_tolerance must be positive")


@dataclass(frozen=True)
class LaneChangeFitResult:
    params: LaneChangeParams
    t0: float
    lateral_rmse: float
    longitudinal_rmse: float
    converged: bool
    iterations: int
    objective: float
    #: Objective value after the grid stage and after each refinement pass.
    objective_trace: Tuple[float, ...] = ()


class _SeparableObjective:
    """Weighted SSE of the model over samples, for a fixed placement (t0, T).

    Outside [t0, t0 + T] the model extends steadily: constant lateral offset
    and constant longitudinal speed, which is how a settled vehicle moves.
    Both inner problems are linear and solved in closed form per evaluation.
    """

    def __init__(self, times, xs, ys, marking_y, cfg: FitConfig) -> None:
        self.t = np.asarray(times, dtype=float)
        self.x = np.asarray(xs, dtype=float)
        self.r = np.asarray(ys, dtype=float) - marking_y
        self.w = cfg.longitudinal_weight

    def __call__(self, t0: float, T: float) -> Tuple[float, Optional[Dict]]:
        """(objective, solution); solution None when the inner solve is singular."""
        u = self.t - t0
        s = np.clip(u / T, 0.0, 1.0)
        q = shape(s)

        # Lateral: r = alpha (1 - q) + beta q, alpha = -sign*d_start, beta = sign*d_end.
        b1 = 1.0 - q
        a11 = float(b1 @ b1)
        a12 = float(b1 @ q)
        a22 = float(q @ q)
        det = a11 * a22 - a12 * a12
        if det <= 1e-12 * max(a11 * a22, 1e-300):
            return math.inf, None
        r1 = float(b1 @ self.r)
        r2 = float(q @ self.r)
        alpha = (a22 * r1 - a12 * r2) / det
        beta = (a11 * r2 - a12 * r1) / det
        lat_res = self.r - alpha * b1 - beta * q

        # Longitudinal: x = x0 + v_start*phi1 + v_end*phi2 (piecewise basis).
        after = u > T
        phi1 = np.where(u < 0.0, u, np.where(after, T / 2.0, u - u * u / (2.0 * T)))
        phi2 = np.where(u < 0.0, 0.0, np.where(after, u - T / 2.0, u * u / (2.0 * T)))
        design = np.column_stack([np.ones_like(u), phi1, phi2])
        gram = design.T @ design
        rhs = design.T @ self.x
        try:
            x0, v_start, v_end = np.linalg.solve(gram, rhs)
        except np.linalg.LinAlgError:
            return math.inf, None
        lon_res = self.x - design @ np.array([x0, v_start, v_end])

        objective = float(lat_res @ lat_res) + self.w * float(lon_res @ lon_res)
        solution = {
            "alpha": float(alpha),
            "beta": float(beta),
            "v_start": float(v_start),
            "v_end": float(v_end),
            "lateral_sse": float(lat_res @ lat_res),
            "longitudinal_sse": float(lon_res @ lon_res),
        }
        return objective, solution

    def grid_minimum(self, t0_grid: np.ndarray, T: float) -> Tuple[float, Optional[float]]:
        """(best objective, best t0) over all t0 candidates for one duration.

        Vectorizes the two inner linear solves across the whole t0 grid;
        the residual sums come from the quadratic form, so no per-candidate
        residual vectors are materialized. Ties keep the earliest t0.
        """
        u = self.t[None, :] - t0_grid[:, None]
        s = np.clip(u / T, 0.0, 1.0)
        q = shape(s)
        b1 = 1.0 - q

        a11 = np.einsum("ij,ij->i", b1, b1)
        a12 = np.einsum("ij,ij->i", b1, q)
        a22 = np.einsum("ij,ij->i", q, q)
        det = a11 * a22 - a12 * a12
        valid = det > 1e-12 * np.maximum(a11 * a22, 1e-300)
        safe_det = np.where(valid, det, 1.0)
        r1 = b1 @ self.r
        r2 = q @ self.r
        alpha = (a22 * r1 - a12 * r2) / safe_det
        beta = (a11 * r2 - a12 * r1) / safe_det
        rr = float(self.r @ self.r)
        lat_sse = (
            rr - 2 * (alpha * r1 + beta * r2)
            + alpha * alpha * a11 + 2 * alpha * beta * a12 + beta * beta * a22
        )

        after = u > T
        phi1 = np.where(u < 0.0, u, np.where(after, T / 2.0, u - u * u / (2.0 * T)))
        phi2 = np.where(u < 0.0, 0.0, np.where(after, u - T / 2.0, u * u / (2.0 * T)))
        n = float(len(self.t))
        g12 = phi1.sum(axis=1)
        g13 = phi2.sum(axis=1)
        g22 = np.einsum("ij,ij->i", phi1, phi1)
        g23 = np.einsum("ij,ij->i", phi1, phi2)
        g33 = np.einsum("ij,ij->i", phi2, phi2)
        h1 = np.full(len(t0_grid), float(self.x.sum()))
        h2 = phi1 @ self.x
        h3 = phi2 @ self.x
        gram = np.empty((len(t0_grid), 3, 3))
        gram[:, 0, 0] = n
        gram[:, 0, 1] = gram[:, 1, 0] = g12
        gram[:, 0, 2] = gram[:, 2, 0] = g13
        gram[:, 1, 1] = g22
        gram[:, 1, 2] = gram[:, 2, 1] = g23
        gram[:, 2, 2] = g33
        rhs = np.stack([h1, h2, h3], axis=1)
        lon_valid = np.abs(np.linalg.det(gram)) > 1e-12
        valid = valid & lon_valid
        if not valid.any():
            return math.inf, None
        coeff = np.zeros_like(rhs)
        coeff[valid] = np.linalg.solve(gram[valid], rhs[valid][:, :, None])[:, :, 0]
        xx = float(self.x @ self.x)
        lon_sse = (
            xx - 2 * np.einsum("ij,ij->i", coeff, rhs)
            + np.einsum("ij,ijk,ik->i", coeff, gram, coeff)
        )
        objective = np.where(valid, lat_sse + self.w * lon_sse, math.inf)
        best = int(np.argmin(objective))
        return float(objective[best]), float(t0_grid[best])


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_section(f, lo: float, hi: float, tol: float, budget: int):
    """Golden-section minimum of f on [lo, hi] to width tol.

    Returns (argmin, fmin, iterations, hit_budget).
    """
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    iterations = 0
    while b - a > tol:
        if iterations >= budget:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        iterations += 1
    xm = (a + b) / 2.0
    return xm, f(xm), iterations, b - a > tol


def fit_lane_change(
    times: Sequence[float],
    xs: Sequence[float],
    ys: Sequence[float],
    marking_y: float,
    cfg: FitConfig = FitConfig(),
) -> LaneChangeFitResult:
    """Least-squares fit of the lane-change model to an episode trajectory.

    ``times``/``xs``/``ys`` sample the episode (x must increase along the
    travel direction, i.e. already projected for upper-carriageway tracks);
    ``marking_y`` is the crossed lane marking. Minimizes the lateral SSE
    plus ``longitudinal_weight`` times the longitudinal SSE over all six
    quantities; the placement (t0, T) is found by a coarse grid over the
    episode window and the configured duration range, then refined by
    coordinate golden-section search to ``refine_tolerance`` seconds.
    """
    t = np.asarray(times, dtype=float)
    if t.size < cfg.min_samples:
        raise InsufficientData(f"need >= {cfg.min_samples} samples, got {t.size}")
    objective = _SeparableObjective(t, xs, ys, marking_y, cfg)

    durations = np.arange(
        cfg.duration_min, cfg.duration_max + cfg.duration_step / 2, cfg.duration_step
    )
    best: Optional[Tuple[float, float, float]] = None  # (J, t0, T)
    for T in durations:
        value, t0_best_for_T = objective.grid_minimum(t, float(T))
        if t0_best_for_T is not None and (best is None or value < best[0]):
            best = (value, t0_best_for_T, float(T))
    if best is None:
        raise DegenerateEpisode("inner least squares singular over the whole grid")

    # Refinement in (midpoint, duration) coordinates: stretching T around a
    # fixed maneuver midpoint leaves the crossing in place, so the two
    # variables decouple and coordinate-wise golden-section search converges
    # in a few passes (in (t0, T) the valley is strongly correlated).
    trace = [best[0]]
    j_best, t0_best, T_best = best
    mid_best = t0_best + T_best / 2.0
    iterations = 0
    converged_by_tol = True
    window_lo, window_hi = float(t[0]), float(t[-1])
    for _ in range(8):
        budget = cfg.max_refine_iterations - iterations
        if budget <= 0:
            converged_by_tol = False
            break
        mid_new, j0, used, hit = _golden_section(
            lambda v: objective(v - T_best / 2.0, T_best)[0],
            max(window_lo, mid_best - cfg.duration_step),
            min(window_hi, mid_best + cfg.duration_step),
            cfg.refine_tolerance,
            budget,
        )
        iterations += used
        if hit:
            converged_by_tol = False
        mid_change = abs(mid_new - mid_best)
        if j0 < j_best:
            j_best, mid_best = j0, mid_new
        budget = cfg.max_refine_iterations - iterations
        if budget <= 0:
            converged_by_tol = False
            break
        T_new, j1, used, hit = _golden_section(
            lambda v: objective(mid_best - v / 2.0, v)[0],
            max(cfg.duration_min, T_best - cfg.duration_step),
            min(cfg.duration_max, T_best + cfg.duration_step),
            cfg.refine_tolerance,
            budget,
        )
        iterations += used
        if hit:
            converged_by_tol = False
        T_change = abs(T_new - T_best)
        if j1 < j_best:
            j_best, T_best = j1, T_new
        trace.append(j_best)
        if mid_change < cfg.refine_tolerance and T_change < cfg.refine_tolerance:
            break
    t0_best = mid_best - T_best / 2.0

    value, solution = objective(t0_best, T_best)
    if solution is None:
        raise DegenerateEpisode("refined placement became singular")
    alpha, beta = solution["alpha"], solution["beta"]
    amplitude = beta - alpha  # signed lateral span
    sign = 1 if amplitude >= 0 else -1
    d_start = -alpha * sign
    d_end = beta * sign
    v_start, v_end = solution["v_start"], solution["v_end"]
    if d_start <= 0 or d_end <= 0 or v_start <= 0 or v_end <= 0:
        raise DegenerateEpisode(
            "fitted parameters outside the model domain "
            f"(d_start={d_start:.3g}, d_end={d_end:.3g}, "
            f"v_start={v_start:.3g}, v_end={v_end:.3g})"
        )
    params = LaneChangeParams(
        d_start=d_start,
        d_end=d_end,
        v_start=v_start,
        v_end=v_end,
        duration=T_best,
        side=Side.TO_LEFT if sign > 0 else Side.TO_RIGHT,
    )
    n = t.size
    converged = converged_by_tol and abs(amplitude) >= cfg.min_amplitude
    return LaneChangeFitResult(
        params=params,
        t0=t0_best,
        lateral_rmse=math.sqrt(solution["lateral_sse"] / n),
        longitudinal_rmse=math.sqrt(solution["longitudinal_sse"] / n),
        converged=converged,
        iterations=iterations,
        objective=value,
        objective_trace=tuple(trace),
    )


def fit_episode(
    track: Track,
    episode: ManeuverEpisode,
    meta: RecordingMeta,
    cfg: FitConfig = FitConfig(),
) -> LaneChangeFitResult:
    """Fit one detected lane-change episode of a track.

    Samples the episode's frame span, projects x onto the travel direction,
    and anchors the lateral model at the crossed marking (the boundary
    between the episode's from/to lanes).
    """
    if episode.kind is not ManeuverKind.LANE_CHANGE:
        raise ContractViolation("fit_episode needs a lane-change episode")
    boundaries = meta.boundaries(track.direction)
    marking_index = max(episode.from_lane, episode.to_lane) - 1
    marking_y = boundaries[marking_index]
    dt = 1.0 / meta.frame_rate
    i0 = episode.start_frame - track.initial_frame
    i1 = episode.end_frame - track.initial_frame
    states = track.states[i0 : i1 + 1]
    sign = track.direction.travel_sign
    times = [s.frame * dt for s in states]
    xs = [s.x * sign for s in states]
    ys = [s.y for s in states]
    return fit_lane_change(times, xs, ys, marking_y, cfg)


# ---------------------------------------------------------------------------
# Cut-in scenarios


@dataclass(frozen=True)
class CutInScenario:
    """A lane change seen from the tailing vehicle on the target lane."""

    track_id: int          # the lane changer
    tailing_id: int
    preceding_id: int      # new-lane preceding vehicle, 0 if none
    crossing_frame: int
    entry_thw: float       # tailing vehicle's THW to the lane changer at entry
    tail_speed_at_entry: float
    min_dhw: float
    min_thw: float
    min_ttc: float
    gap_size: float        # bumper gap between new-lane preceding and tailing
    side: CutInSide


def extract_cut_ins(
    episodes: Sequence[ManeuverEpisode],
    tracks: Sequence[Track],
    surround: Mapping[int, Sequence[SurroundFrame]],
    meta: RecordingMeta,
) -> List[CutInScenario]:
    """One scenario per lane change with a tailing vehicle on the new lane.

    At the crossing frame the lane changer is already on the new lane, so
    its own following/preceding neighbors are the tailing and new-lane
    preceding vehicles. The entry THW is the bumper gap from the tailing
    vehicle to the lane changer over the tailing speed; min dhw/thw/ttc are
    minima of the tailing vehicle's metrics over the episode frames where
    its preceding vehicle is the lane changer.
    """
    by_id = {t.track_id: t for t in tracks}
    scenarios: List[CutInScenario] = []
    for episode in episodes:
        if episode.kind is not ManeuverKind.LANE_CHANGE:
            continue
        changer = by_id[episode.track_id]
        frames = surround[episode.track_id]
        sf = frames[episode.crossing_frame - changer.initial_frame]
        tailing_id = sf.following_id
        if tailing_id == NO_VEHICLE:
            continue
        tail = by_id[tailing_id]
        tail_state = tail.state_at(episode.crossing_frame)
        changer_state = changer.state_at(episode.crossing_frame)

        gap = max(
            abs(changer_state.x - tail_state.x) - (changer.length + tail.length) / 2.0,
            0.0,
        )
        tail_speed = abs(tail_state.vx)
        entry_thw = gap / tail_speed if tail_speed > SPEED_FLOOR else UNDEFINED

        min_dhw = min_thw = min_ttc = UNDEFINED
        for tail_sf in surround[tailing_id]:
            if not episode.start_frame <= tail_sf.frame <= episode.end_frame:
                continue
            if tail_sf.preceding_id != episode.track_id:
                continue
            for name, value in (("dhw", tail_sf.dhw), ("thw", tail_sf.thw),
                                ("ttc", tail_sf.ttc)):
                if value == UNDEFINED:
                    continue
                current = {"dhw": min_dhw, "thw": min_thw, "ttc": min_ttc}[name]
                if current == UNDEFINED or value < current:
                    if name == "dhw":
                        min_dhw = value
                    elif name == "thw":
                        min_thw = value
                    else:
                        min_ttc = value

        preceding_id = sf.preceding_id
        gap_between = UNDEFINED
        if preceding_id != NO_VEHICLE:
            lead = by_id[preceding_id]
            lead_state = lead.state_at(episode.crossing_frame)
            gap_between = max(
                abs(lead_state.x - tail_state.x) - (lead.length + tail.length) / 2.0,
                0.0,
            )

        side = (
            CutInSide.FROM_LEFT
            if episode.from_lane == left_lane_id(episode.to_lane, tail.direction)
            else CutInSide.FROM_RIGHT
        )
        scenarios.append(
            CutInScenario(
                track_id=episode.track_id,
                tailing_id=tailing_id,
                preceding_id=preceding_id,
                crossing_frame=episode.crossing_frame,
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


# ---------------------------------------------------------------------------
# Export (canonical CSV and JSON)

FIT_COLUMNS = [
    "recordingId",
    "trackId",
    "crossingFrame",
    "t0",
    "duration",
    "dStart",
    "dEnd",
    "vStart",
    "vEnd",
    "side",
    "lateralRmse",
    "longitudinalRmse",
    "converged",
    "iterations",
]

CUT_IN_COLUMNS = [
    "recordingId",
    "trackId",
    "tailingId",
    "precedingId",
    "crossingFrame",
    "entryThw",
    "tailSpeedAtEntry",
    "minDhw",
    "minThw",
    "minTtc",
    "gapSize",
    "side",
]


def write_fits_csv(
    fits: Sequence[Tuple[ManeuverEpisode, LaneChangeFitResult]],
    recording_id: int,
    path: Path,
) -> None:
    from .dataset_io import format_float

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FIT_COLUMNS)
        for episode, fit in fits:
            p = fit.params
            writer.writerow(
                [
                    recording_id,
                    episode.track_id,
                    episode.crossing_frame,
                    format_float(fit.t0),
                    format_float(p.duration),
                    format_float(p.d_start),
                    format_float(p.d_end),
                    format_float(p.v_start),
                    format_float(p.v_end),
                    p.side.value,
                    format_float(fit.lateral_rmse),
                    format_float(fit.longitudinal_rmse),
                    1 if fit.converged else 0,
                    fit.iterations,
                ]
            )


def write_cut_ins_csv(
    scenarios: Sequence[CutInScenario], recording_id: int, path: Path
) -> None:
    from .dataset_io import format_float

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CUT_IN_COLUMNS)
        for s in scenarios:
            writer.writerow(
                [
                    recording_id,
                    s.track_id,
                    s.tailing_id,
                    s.preceding_id,
                    s.crossing_frame,
                    format_float(s.entry_thw),
                    format_float(s.tail_speed_at_entry),
                    format_float(s.min_dhw),
                    format_float(s.min_thw),
                    format_float(s.min_ttc),
                    format_float(s.gap_size),
                    s.side.value,
                ]
            )


def write_cut_ins_json(
    scenarios: Sequence[CutInScenario], recording_id: int, path: Path
) -> None:
    from .dataset_io import format_float

    def canon(x: float) -> float:
        return float(format_float(x))

    items = [
        {
            "recordingId": recording_id,
            "trackId": s.track_id,
            "tailingId": s.tailing_id,
            "precedingId": s.preceding_id,
            "crossingFrame": s.crossing_frame,
            "entryThw": canon(s.entry_thw),
            "tailSpeedAtEntry": canon(s.tail_speed_at_entry),
            "minDhw": canon(s.min_dhw),
            "minThw": canon(s.min_thw),
            "minTtc": canon(s.min_ttc),
            "gapSize": canon(s.gap_size),
            "side": s.side.value,
        }
        for s in scenarios
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(items, fh, indent=2)
        fh.write("\n")
