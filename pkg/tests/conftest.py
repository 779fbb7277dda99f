"""Shared builders for tests."""

import math

import pytest

from hwtracks import (
    DrivingDirection,
    KinematicState,
    RecordingMeta,
    Track,
    VehicleClass,
    compute_mean_speed,
)

UPPER = (0.0, 3.7, 7.4)
LOWER = (12.0, 15.7, 19.4)


def make_meta(**kwargs) -> RecordingMeta:
    defaults = dict(
        recording_id=1,
        location_id=1,
        frame_rate=25.0,
        duration=60.0,
        upper_lane_boundaries=UPPER,
        lower_lane_boundaries=LOWER,
        upper_speed_limits=(math.inf, math.inf),
        lower_speed_limits=(math.inf, math.inf),
    )
    defaults.update(kwargs)
    return RecordingMeta(**defaults)


def make_state(frame=0, x=0.0, y=13.85, vx=25.0, vy=0.0, ax=0.0, ay=0.0, lane_id=1):
    return KinematicState(frame=frame, x=x, y=y, vx=vx, vy=vy, ax=ax, ay=ay,
                          lane_id=lane_id)


def straight_track(
    track_id=1,
    direction=DrivingDirection.LOWER,
    x0=0.0,
    y=13.85,
    speed=25.0,
    n_frames=100,
    first_frame=0,
    lane_id=1,
    length=4.5,
    width=2.0,
    vehicle_class=VehicleClass.CAR,
    dt=0.04,
):
    sign = direction.travel_sign
    states = tuple(
        make_state(
            frame=first_frame + i,
            x=x0 + sign * speed * i * dt,
            y=y,
            vx=sign * speed,
            lane_id=lane_id,
        )
        for i in range(n_frames)
    )
    return Track(
        track_id=track_id,
        vehicle_class=vehicle_class,
        direction=direction,
        length=length,
        width=width,
        states=states,
        mean_speed=compute_mean_speed(states),
    )


@pytest.fixture
def meta():
    return make_meta()
