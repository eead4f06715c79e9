#!/usr/bin/env python3
"""Regenerates the bundled scene files under scenes/.

Shadow patches are 2D polygons per view. For the shaded scenes they are the
projection of a flat 3D slab lying below the object, so the darkened region is
consistent across views the way a real cast shadow on a support would be.
"""
import json
import math
import pathlib

import numpy as np
from scipy.spatial import ConvexHull

ROOT = pathlib.Path(__file__).resolve().parent.parent
RIG_REL = "../rigs/paper4.json"


def load_rig():
    return json.loads((ROOT / "rigs" / "paper4.json").read_text())["cameras"]


def project(cam, pts):
    R = np.array(cam["rotation"], dtype=float).reshape(3, 3)
    t = np.array(cam["translation"], dtype=float)
    k = cam["intrinsics"]
    pc = pts @ R.T + t
    assert (pc[:, 2] > 0).all()
    u = k["fx"] * pc[:, 0] / pc[:, 2] + k["cx"]
    v = k["fy"] * pc[:, 1] / pc[:, 2] + k["cy"]
    return np.stack([u, v], axis=1)


def disc_slab(center, radius, z0, z1, n=72):
    a = np.linspace(0, 2 * math.pi, n, endpoint=False)
    ring = np.stack([center[0] + radius * np.cos(a), center[1] + radius * np.sin(a)], axis=1)
    lo = np.column_stack([ring, np.full(n, z0)])
    hi = np.column_stack([ring, np.full(n, z1)])
    return np.vstack([lo, hi])


def shadow_polygons(cams, pts, darkening):
    out = []
    for cam in cams:
        uv = project(cam, pts)
        hull = ConvexHull(uv)
        poly = [[round(float(uv[i, 0]), 3), round(float(uv[i, 1]), 3)] for i in hull.vertices]
        out.append({"view_id": cam["id"], "polygon": poly, "darkening": darkening})
    return out


def sphere(radius, translation, albedo, **extra):
    p = {"kind": "sphere", "radius": radius, "translation": translation, "albedo": albedo}
    p.update(extra)
    return p


def write(name, scene):
    path = ROOT / "scenes" / f"{name}.json"
    path.write_text(json.dumps(scene, indent=2) + "\n")
    print("wrote", path.relative_to(ROOT))


BV = {"min": [-100.0, -100.0, -100.0], "max": [100.0, 100.0, 100.0]}
DARK = [40, 40, 40]
MID = [150, 150, 150]


def main():
    cams = load_rig()

    # single dark textured sphere over a light background, with a cast shadow
    # below it that every view sees detached from the object
    slab = disc_slab((0.0, 0.0), 45.0, -82.0, -64.0)
    write("exp1_sphere_shadow", {
        "name": "exp1_sphere_shadow",
        "seed": 20240601,
        "background": [255, 255, 255],
        "bv": BV,
        "rig": RIG_REL,
        "primitives": [sphere(50.0, [0.0, 0.0, 0.0], DARK, texture_noise=4,
                              pattern={"kind": "checker", "albedo2": MID, "cell": 16.0})],
        "shadows": shadow_polygons(cams, slab, 0.5),
    })

    # two objects with a narrow gap between them
    write("exp2_two_objects", {
        "name": "exp2_two_objects",
        "seed": 20240602,
        "background": [255, 255, 255],
        "bv": BV,
        "rig": RIG_REL,
        "primitives": [
            sphere(35.0, [-38.0, 0.0, 0.0], DARK, texture_noise=4,
                   pattern={"kind": "checker", "albedo2": MID, "cell": 14.0}),
            {"kind": "box", "half_extents": [22.0, 22.0, 30.0], "translation": [44.0, 5.0, 0.0],
             "albedo": MID, "texture_noise": 4,
             "pattern": {"kind": "checker", "albedo2": DARK, "cell": 14.0}},
        ],
        "shadows": shadow_polygons(cams, disc_slab((0.0, 0.0), 55.0, -80.0, -62.0), 0.5),
    })

    # one large object partly hidden behind smaller clutter
    c = math.cos(math.radians(30.0))
    s = math.sin(math.radians(30.0))
    write("exp3_cluttered", {
        "name": "exp3_cluttered",
        "seed": 20240603,
        "background": [255, 255, 255],
        "bv": BV,
        "rig": RIG_REL,
        "primitives": [
            {"kind": "cylinder", "radius": 38.0, "height": 70.0, "translation": [0.0, 0.0, 0.0],
             "albedo": DARK, "texture_noise": 4,
             "pattern": {"kind": "checker", "albedo2": MID, "cell": 15.0}},
            sphere(14.0, [64.0, 8.0, -20.0], MID, texture_noise=4),
            {"kind": "box", "half_extents": [10.0, 12.0, 14.0],
             "rotation": [c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0],
             "translation": [-34.0, 64.0, -18.0], "albedo": [90, 90, 90], "texture_noise": 4},
        ],
        "shadows": [],
    })

    # sphere split into two flat tones along a horizontal plane
    write("two_tone_sphere", {
        "name": "two_tone_sphere",
        "seed": 7,
        "background": [255, 255, 255],
        "bv": BV,
        "rig": RIG_REL,
        "primitives": [sphere(50.0, [0.0, 0.0, 0.0], [200, 40, 40],
                              pattern={"kind": "split", "albedo2": [40, 40, 200],
                                       "axis": [1.0, 0.0, 0.0]})],
        "shadows": [],
    })

    # plain sphere with per-pixel texture noise, no shadow
    write("noisy_sphere", {
        "name": "noisy_sphere",
        "seed": 11,
        "background": [255, 255, 255],
        "bv": BV,
        "rig": RIG_REL,
        "primitives": [sphere(50.0, [0.0, 0.0, 0.0], [60, 60, 60], texture_noise=20)],
        "shadows": [],
    })


if __name__ == "__main__":
    main()
