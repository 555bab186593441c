#!/usr/bin/env python3
"""Regenerates the bundled scenario files under scenarios/."""
import json
import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "scenarios")


def r(x):
    return round(x, 6)


def write(name, doc):
    path = os.path.join(OUT, name)
    with open(path, "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")
    print("wrote", path)


def desk16(start="reference", t0=0.0, tf=60.0, t_end=120.0):
    agents = []
    for k in range(6):
        a = math.radians(60 * k)
        agents.append({"id": k + 1, "pos": [r(10 * math.cos(a)), r(10 * math.sin(a))]})
    agents.append({"id": 7, "pos": [0.3, 0.2]})
    for k in range(6):
        a = math.radians(30 + 60 * k)
        agents.append({"id": 8 + k, "pos": [r(5.2 * math.cos(a)), r(5.2 * math.sin(a))]})
    for k, deg in enumerate((95, 215, 335)):
        a = math.radians(deg)
        agents.append({"id": 14 + k, "pos": [r(2.6 * math.cos(a)), r(2.6 * math.sin(a))]})

    targets = []
    for k in range(6):
        a = math.radians(60 * k + 10)
        targets.append({"id": k + 1, "pos": [r(3 + 13 * math.cos(a)), r(2 + 11 * math.sin(a))]})

    return {
        "name": "desk16" if start == "reference" else "desk16_equilibrium",
        "agents": agents,
        "applications": [
            {"id": 1, "alpha": 0.6,
             "targets": [{"pos": [8.0, 4.0], "cov": [[6.0, 1.0], [1.0, 4.0]]},
                         {"pos": [5.0, 9.0], "cov": [[4.0, 0.0], [0.0, 4.0]]}],
             "zones": [[[4, 1], [12, 1], [12, 11], [4, 11]]]},
            {"id": 2, "alpha": 0.4,
             "targets": [{"pos": [-4.0, -5.0], "cov": [[5.0, -1.5], [-1.5, 5.0]]}],
             "zones": [[[-9, -9], [1, -9], [-4, -1]]]},
        ],
        "boundary_targets": targets,
        "vehicle": {"mass": 1.0, "poles_translational": [-2.0, -2.5, -3.0, -3.5], "poles_yaw": [-3.0, -4.0]},
        "schedule": {"t0": t0, "tf": tf, "t_end": t_end, "dt": 0.01, "log_interval": 0.1, "start": start},
        "altitudes": {"base": 10.0},
        "layering": {"distinct_simplices": True},
        "output": {"dir": "out", "frame_times": [15, 35, 80] if t_end >= 80 else []},
    }


def fig5():
    agents = []
    nb = 24
    for k in range(nb):
        a = 2 * math.pi * k / nb + 0.1
        agents.append({"id": k + 1, "pos": [r(60 * math.cos(a)), r(60 * math.sin(a))]})
    # Hexagonal lattice, 8 m spacing, nearest 153 sites to a slightly offset centre.
    sites = []
    s = 8.0
    for j in range(-10, 11):
        for i in range(-10, 11):
            x = s * (i + 0.5 * (j % 2))
            y = s * j * math.sqrt(3) / 2
            sites.append((x + 0.37, y + 0.21))
    sites.sort(key=lambda p: (round(math.hypot(p[0], p[1]), 9), math.atan2(p[1], p[0])))
    for k, (x, y) in enumerate(sites[:165 - nb]):
        agents.append({"id": nb + 1 + k, "pos": [r(x), r(y)]})

    targets = []
    for k in range(nb):
        a = 2 * math.pi * k / nb + 0.1
        x, y = 66 * math.cos(a), 52 * math.sin(a)
        c, sn = math.cos(0.2), math.sin(0.2)
        targets.append({"id": k + 1, "pos": [r(c * x - sn * y + 4), r(sn * x + c * y - 2)]})

    rect = [[-48, 8], [-14, 8], [-14, 38], [-48, 38]]
    tri1 = [[14, 12], [52, 12], [32, 44]]
    tri2 = [[-20, -50], [28, -50], [4, -16]]
    return {
        "name": "fig5",
        "agents": agents,
        "applications": [
            {"id": 1, "alpha": 0.4,
             "targets": [{"pos": [-40, 16], "cov": [[30, 0], [0, 20]]},
                         {"pos": [-22, 30], "cov": [[30, 0], [0, 20]]},
                         {"pos": [-31, 23], "cov": [[40, 0], [0, 30]]}],
             "zones": [rect]},
            {"id": 2, "alpha": 0.3,
             "targets": [{"pos": [26, 18], "cov": [[20, 4], [4, 15]]},
                         {"pos": [40, 18], "cov": [[20, -4], [-4, 15]]},
                         {"pos": [32, 34], "cov": [[15, 0], [0, 20]]}],
             "zones": [tri1]},
            {"id": 3, "alpha": 0.3,
             "targets": [{"pos": [-8, -44], "cov": [[25, 0], [0, 12]]},
                         {"pos": [16, -44], "cov": [[25, 0], [0, 12]]},
                         {"pos": [4, -27], "cov": [[18, 0], [0, 25]]}],
             "zones": [tri2]},
        ],
        "boundary_targets": targets,
        "layering": {"neighborhood_radius": 20.0, "distinct_simplices": True},
        "vehicle": {"mass": 1.0, "poles_translational": [-2.0, -2.5, -3.0, -3.5], "poles_yaw": [-3.0, -4.0]},
        "schedule": {"t0": 0.0, "tf": 60.0, "t_end": 120.0, "dt": 0.01, "log_interval": 0.1},
        "altitudes": {"base": 10.0},
        "output": {"dir": "out", "frame_times": [15, 35, 80]},
    }


if __name__ == "__main__":
    os.makedirs(OUT, exist_ok=True)
    write("desk16.json", desk16())
    write("desk16_equilibrium.json", desk16(start="equilibrium", tf=5.0, t_end=10.0))
    write("fig5.json", fig5())
