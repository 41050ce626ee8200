"""CSV, JSON and OBJ writers for a workspace map.

Angles are written in degrees; the polar embedding coordinates x, y, z are
degrees too (x = tilt cos(azimuth), y = tilt sin(azimuth), z = torsion).
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .workspace import WorkspaceMap, embed_polar

CSV_HEADER = ["torsion_deg", "azimuth_deg", "tilt_deg", "x", "y", "z",
              "t1_deg", "t2_deg", "t3_deg"]


def fmt(v: float) -> str:
    """Fixed 9-significant-digit text, with negative zero folded to zero."""
    v = float(v)
    if v == 0.0:
        v = 0.0
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.9g}"


def round_floats(obj):
    """Recursively round floats to 9 significant digits for JSON output."""
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return str(obj)
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return round_floats(obj.tolist())
    if isinstance(obj, np.floating):
        return round_floats(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(round_floats(obj), indent=2, sort_keys=False) + "\n"


def _rows(wmap: WorkspaceMap):
    deg = math.degrees
    for s in sorted(wmap.slices, key=lambda s: -s.torsion):
        for (az, ti), q in zip(s.boundary, s.joint_at_boundary):
            yield [deg(s.torsion), deg(az), deg(ti),
                   deg(ti * math.cos(az)), deg(ti * math.sin(az)), deg(s.torsion),
                   deg(q[0]), deg(q[1]), deg(math.remainder(q[2] - wmap.neutral_yaw, 2 * math.pi))]


def to_csv(wmap: WorkspaceMap) -> str:
    """One row per boundary point; t3 is measured from the neutral yaw."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in _rows(wmap):
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def to_dict(wmap: WorkspaceMap) -> dict:
    deg = math.degrees
    p = wmap.params
    return {
        "format": 1,
        "units": "degrees",
        "params": {"n_psi": p.n_psi, "n_phi": p.n_phi, "tilt_step": deg(p.tilt_step),
                   "max_tilt": deg(p.max_tilt), "centroid_method": p.centroid_method},
        "torsion_extent": [deg(v) for v in wmap.torsion_extent],
        "joint_extents": {k: [deg(a), deg(b)] for k, (a, b) in wmap.joint_extents.items()},
        "star_violations": wmap.star_violations,
        "slices": [
            {
                "torsion": deg(s.torsion),
                "centroid": [deg(s.centroid[0]), deg(s.centroid[1])],
                "area_deg2": deg(1.0) ** 2 * s.area,
                "azimuth": [deg(v) for v in s.boundary[:, 0]],
                "tilt": [deg(v) for v in s.boundary[:, 1]],
                "joints": [[deg(q[0]), deg(q[1]), deg(math.remainder(q[2] - wmap.neutral_yaw,
                                                                      2 * math.pi))]
                           for q in s.joint_at_boundary],
            }
            for s in wmap.slices
        ],
    }


def to_json(wmap: WorkspaceMap) -> str:
    return dumps(to_dict(wmap))


def to_obj(wmap: WorkspaceMap) -> str:
    """Side surface joining consecutive slices ray by ray, two triangles per quad."""
    grid = np.degrees(embed_polar(wmap))
    S, n, _ = grid.shape
    lines = [f"# workspace side surface: {S} slices x {n} rays, degrees"]
    for row in grid:
        for x, y, z in row:
            lines.append(f"v {fmt(x)} {fmt(y)} {fmt(z)}")
    for i in range(S - 1):
        for j in range(n):
            a = i * n + j + 1
            b = i * n + (j + 1) % n + 1
            c = (i + 1) * n + (j + 1) % n + 1
            d = (i + 1) * n + j + 1
            lines.append(f"f {a} {b} {c}")
            lines.append(f"f {a} {c} {d}")
    return "\n".join(lines) + "\n"


def joint_cloud_csv(cloud) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t1_deg", "t2_deg", "t3_deg"])
    for q in cloud:
        w.writerow([fmt(math.degrees(v)) for v in q])
    return buf.getvalue()
