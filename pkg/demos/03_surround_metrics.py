"""Neighbor assignment and DHW/THW/TTC on a closing two-vehicle scene.

A faster car approaches a slower truck in the same lane while a third car
cruises alongside on the left. The per-frame surround data shows how the
neighbor slots fill and how the headway metrics evolve as the gap closes.
"""

from hwtracks import (
    DrivingDirection,
    ScenarioScript,
    VehicleClass,
    VehicleSpec,
    compute_surround,
    generate_truth,
)

script = ScenarioScript(
    seed=3,
    duration=12.0,  # the gap closes at ~11 m/s; stop before contact
    vehicles=(
        VehicleSpec(vehicle_class=VehicleClass.CAR,
                    direction=DrivingDirection.LOWER, entry_lane=1,
                    entry_x=0.0, initial_speed=33.0),            # ego, closing
        VehicleSpec(vehicle_class=VehicleClass.TRUCK,
                    direction=DrivingDirection.LOWER, entry_lane=1,
                    entry_x=150.0, initial_speed=22.0, length=14.0),
        VehicleSpec(vehicle_class=VehicleClass.CAR,
                    direction=DrivingDirection.LOWER, entry_lane=2,
                    entry_x=2.0, initial_speed=33.0),            # left neighbor
    ),
)
truth = generate_truth(script)
surround = compute_surround(truth.tracks, truth.meta)

ego = truth.tracks[0]
frames = surround[ego.track_id]
print("ego car (track 1) closing on the truck (track 2), "
      "car 3 running alongside on the left\n")
print(" time   preceding  leftAlongside      DHW       THW       TTC")
for sf in frames[:: 2 * int(truth.meta.frame_rate)]:  # every 2 s
    t = sf.frame / truth.meta.frame_rate

    def fmt(value, unit):
        return f"{value:7.2f} {unit}" if value >= 0 else "      n/a"

    print(f"{t:5.1f}s  {sf.preceding_id:>9}  {sf.left_alongside_id:>13}  "
          f"{fmt(sf.dhw, 'm')}  {fmt(sf.thw, 's')}  {fmt(sf.ttc, 's')}")

closing = [sf for sf in frames if 0 < sf.ttc]
if closing:
    worst = min(closing, key=lambda sf: sf.ttc)
    print(f"\nminimum TTC {worst.ttc:.2f} s at "
          f"t={worst.frame / truth.meta.frame_rate:.1f} s "
          f"(DHW {worst.dhw:.1f} m)")
print("THW = bumper gap / ego speed; TTC = bumper gap / closing speed; "
      "-1 marks undefined values")
