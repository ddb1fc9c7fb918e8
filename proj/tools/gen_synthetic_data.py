#!/usr/bin/env python3
"""Generate the bundled synthetic powertrain dataset and urban drive cycle.

The output is deterministic. Re-running this script reproduces the files under
data/ byte for byte.

Powertrain (heavy-duty diesel, 10-speed):
  * max torque: 1600 N*m plateau between 1200 and 1600 rpm, tapering to the
    2400 rpm governor.
  * fuel map: fuel power = w * (T + F(w) + k*T^2) / eta_i(w), divided by the
    lower heating value. F is a friction-equivalent torque rising with speed,
    k*T^2 a high-load loss term, eta_i an indicated efficiency bowl. The
    resulting brake efficiency peaks at ~0.40 near 1350-1400 rpm, ~70% load.
  * gear ratios geometric from 12.0 to 0.75, final drive 3.9, driveline
    efficiency 0.92.

Cycle: 1800 s stop-and-go urban trace sampled at 1 s, 0 to 60 mph.
"""

import hashlib
import math
import pathlib

import numpy as np

LHV_J_PER_G = 42800.0
ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "data"


def fuel_rate_gps(rpm, torque):
    w = rpm * math.pi / 30.0
    eta_i = 0.47 - 4e-8 * (rpm - 1500.0) ** 2
    friction = 50.0 + 0.034 * rpm
    k = 7.81e-5
    return w * (torque + friction + k * torque * torque) / (eta_i * LHV_J_PER_G)


def write_powertrain(out):
    out.mkdir(parents=True, exist_ok=True)
    speeds = list(range(600, 2401, 100))
    torques = list(range(0, 1601, 100))
    with open(out / "fuel_map.csv", "w") as f:
        f.write("rpm," + ",".join(str(t) for t in torques) + "\n")
        for rpm in speeds:
            row = [f"{fuel_rate_gps(rpm, t):.6f}" for t in torques]
            f.write(f"{rpm}," + ",".join(row) + "\n")

    curve = [(600, 700), (800, 950), (1000, 1300), (1200, 1600), (1600, 1600),
             (1800, 1480), (2000, 1320), (2200, 1100), (2300, 700), (2400, 0)]
    with open(out / "torque_curve.csv", "w") as f:
        for rpm, nm in curve:
            f.write(f"{rpm},{nm}\n")

    brake = [(600, -100), (1000, -120), (1400, -160), (1800, -210), (2400, -300)]
    with open(out / "engine_brake_curve.csv", "w") as f:
        for rpm, nm in brake:
            f.write(f"{rpm},{nm}\n")

    ratios = [12.0 * (0.75 / 12.0) ** (i / 9.0) for i in range(10)]
    with open(out / "gears.csv", "w") as f:
        for r in ratios:
            f.write(f"{r:.6f}\n")
        f.write("3.9\n")
        f.write("0.92\n")


def write_cycle(path, duration=1800, seed=2022):
    rng = np.random.default_rng(seed)
    vmax = 26.8224  # 60 mph

    def ramp(trace, v_target, rate):
        v = trace[-1]
        while abs(v - v_target) > 1e-9:
            step = min(rate, abs(v_target - v))
            v = v + step if v_target > v else v - step
            trace.append(v)

    speeds = [0.0]
    trip = 0
    while True:
        trace = [0.0]
        trace += [0.0] * int(rng.integers(8, 31))
        if trip == 3:
            cruise = vmax
        else:
            cruise = float(rng.choice([rng.uniform(5.0, 12.0), rng.uniform(12.0, 20.0),
                                       rng.uniform(20.0, vmax)], p=[0.35, 0.4, 0.25]))
        ramp(trace, cruise, float(rng.uniform(0.4, 0.9)))
        base = trace[-1]
        phase = rng.uniform(0, 2 * math.pi)
        for k in range(int(rng.integers(15, 91))):
            v = base + 0.8 * math.sin(phase + 2 * math.pi * k / 25.0) - 0.8 * math.sin(phase)
            trace.append(min(vmax, max(0.0, v)))
        ramp(trace, 0.0, float(rng.uniform(0.5, 1.0)))
        if len(speeds) + len(trace) - 1 > duration + 1 - 5:
            break
        speeds += trace[1:]
        trip += 1
    speeds += [0.0] * (duration + 1 - len(speeds))

    lines = ["# synthetic urban stop-and-go cycle: time_s,speed_mps"]
    lines += [f"{t},{v:.2f}" for t, v in enumerate(speeds)]
    text = "\n".join(lines) + "\n"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    values = [round(v, 2) for v in speeds]
    print(f"{path.name}: samples={len(values)} duration={len(values) - 1}s "
          f"mean={np.mean(values):.4f} m/s max={max(values):.2f} m/s "
          f"sha256={hashlib.sha256(text.encode()).hexdigest()}")


if __name__ == "__main__":
    write_powertrain(DATA / "powertrain")
    write_cycle(DATA / "cycles" / "synthetic_urban.csv")
