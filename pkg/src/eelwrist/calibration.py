"""Fit the cone half-angles and base depth to the published workspace ranges.

The published ranges are the torsion envelope and the extents of the three
actuated joints.  Each candidate (lima_b, lima_c, limd) is swept and ranked
by how many of the eight range ends land within tolerance, then by the summed
deviation of those ends, then by the summed deviation of all ends.  Remaining
ties go to the tightest limits (smaller cones, shallower base).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from .constraints import DEFAULT_CLEARANCE, ConstraintParams
from .errors import WristError
from .mechanism import MechanismGeometry, make_geometry
from .workspace import SweepParams, sweep_workspace

PUBLISHED = {
    "torsion": (-18.0, 18.0),
    "t1": (-17.0, 38.0),
    "t2": (-17.0, 38.0),
    "t3": (-35.0, 35.0),
}
TOLERANCE_DEG = 3.0


@dataclass(frozen=True)
class Candidate:
    lima_b: float
    lima_c: float
    limd: float
    ranges: dict  # name -> (min_deg, max_deg); None when the sweep failed
    hits: int
    hit_error: float
    total_error: float
    worst: float

    @property
    def params(self) -> ConstraintParams:
        return ConstraintParams(lima=self.lima_b, lima_c=self.lima_c, limd=self.limd,
                                clearance=DEFAULT_CLEARANCE)


def measured_ranges(g: MechanismGeometry, params: ConstraintParams,
                    sweep: SweepParams | None = None) -> dict:
    m = sweep_workspace(g, params, sweep)
    out = {"torsion": tuple(math.degrees(v) for v in m.torsion_extent)}
    for k, (lo, hi) in m.joint_extents.items():
        out[k] = (math.degrees(lo), math.degrees(hi))
    return out


def score(ranges: dict, tol: float = TOLERANCE_DEG) -> tuple[int, float, float, float]:
    """(ends within tol, their summed deviation, summed deviation of all ends, worst)."""
    dev = [abs(ranges[k][j] - PUBLISHED[k][j]) for k in PUBLISHED for j in (0, 1)]
    hit = [d for d in dev if d <= tol]
    return len(hit), sum(hit), sum(dev), max(dev)


def calibrate(g: MechanismGeometry | None = None,
              lima_b_deg=(26.0, 28.0, 30.0, 32.0, 34.0),
              lima_c_deg=(40.0, 45.0, 50.0, 55.0, 60.0),
              depth_deg=(15.0, 17.0, 19.0),
              sweep: SweepParams | None = None) -> list[Candidate]:
    """Grid search; returns candidates best first.

    ``depth_deg`` sets ``limd = L sin(depth)``, i.e. the lowest crank angle
    the base allows.
    """
    g = g or make_geometry()
    sweep = sweep or SweepParams(n_phi=36, tilt_step=math.radians(1.0))
    out = []
    for lb, lc, dd in product(lima_b_deg, lima_c_deg, depth_deg):
        limd = g.rod_length * math.sin(math.radians(dd))
        p = ConstraintParams(lima=math.radians(lb), lima_c=math.radians(lc), limd=limd,
                             clearance=DEFAULT_CLEARANCE)
        try:
            r = measured_ranges(g, p, sweep)
            hits, err, total, worst = score(r)
        except WristError:
            r, hits, err, total, worst = None, 0, math.inf, math.inf, math.inf
        out.append(Candidate(p.lima, p.lima_c, limd, r, hits, err, total, worst))
    # deviations are compared at 0.01 deg so float noise does not break ties
    out.sort(key=lambda c: (-c.hits, round(c.hit_error, 2), round(c.total_error, 2),
                            c.lima_b, c.lima_c, c.limd))
    return out

