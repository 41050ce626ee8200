"""Mechanical feasibility: joint cones, segment clearance, base clearance.

Leg 3 has no collision check: its three revolutes are coaxial through the
rotation centre and cannot meet the RUS legs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _pykernel
from .differential import jacobians
from .errors import ConfigError, DegenerateSegment, ModeVanished, Unreachable
from .kinematics import inverse_kinematics, leg_roots
from .mechanism import JointAngles, MechanismGeometry, crank_tip, leg_points

# Calibrated against the published joint and torsion ranges (see calibration.py).
DEFAULT_LIMA = math.radians(30.0)
DEFAULT_LIMA_C = math.radians(50.0)
DEFAULT_LIMD = math.sqrt(2.0) / 2.0 * math.sin(math.radians(17.0))
DEFAULT_CLEARANCE = 0.05


@dataclass(frozen=True)
class ConstraintParams:
    """Limits for the feasibility predicate.

    ``lima`` is the cone half-angle; ``lima_b`` / ``lima_c`` override it for
    the crank-side (B) or platform-side (C) cones.
    """

    lima: float = DEFAULT_LIMA
    limd: float = DEFAULT_LIMD
    clearance: float = DEFAULT_CLEARANCE
    samples_n: int = 64
    singularity_margin: float | None = None
    lima_b: float | None = None
    lima_c: float | None = DEFAULT_LIMA_C

    def __post_init__(self):
        for name in ("lima", "lima_b", "lima_c"):
            v = getattr(self, name)
            if v is not None and not (0.0 < v < math.pi / 2):
                raise ConfigError(f"{name} must lie in (0, pi/2)")
        if not self.limd >= 0.0:
            raise ConfigError("limd must be >= 0")
        if not self.clearance >= 0.0:
            raise ConfigError("clearance must be >= 0")
        if int(self.samples_n) < 2:
            raise ConfigError("samples_n must be >= 2")
        if self.singularity_margin is not None and self.singularity_margin < 0.0:
            raise ConfigError("singularity_margin must be >= 0")

    @property
    def cone_limits(self) -> tuple[float, float, float, float]:
        """Half-angles for the cones at B1, B2, C1, C2."""
        b = self.lima if self.lima_b is None else self.lima_b
        c = self.lima if self.lima_c is None else self.lima_c
        return (b, b, c, c)


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    cone_angles: tuple
    seg_distance: float
    base_margins: tuple
    failed: tuple = ()
    q: JointAngles | None = None
    dets: tuple | None = field(default=None, repr=False)


def _angle(a, b) -> float:
    return math.atan2(float(np.linalg.norm(np.cross(a, b))), float(np.dot(a, b)))


def cone_angles(state, o) -> tuple[float, float, float, float]:
    """Angles of the couplers to their cone axes at B1, B2, C1, C2.

    The B-cone axis is ``i_i x unit(l_i)`` (perpendicular to the crank, turning
    with it); the C-cone axis is the inward platform normal ``-z_m``.
    """
    o = np.asarray(o, dtype=float)
    zm = o[:, 2]
    out_b, out_c = [], []
    for k in (0, 1):
        l, r = state.l[k], state.r[k]
        axis = np.cross(state.i[k], l / np.linalg.norm(l))
        out_b.append(_angle(r, axis))
        out_c.append(_angle(-r, -zm))
    return (out_b[0], out_b[1], out_c[0], out_c[1])


def _check_segment(p, q):
    if float(np.linalg.norm(np.subtract(q, p))) < 1e-15:
        raise DegenerateSegment("segment has zero length")


def segment_distance_sampled(p1, p2, q1, q2, n: int = 64) -> float:
    """Sampled distance between segments [p1, p2] and [q1, q2].

    ``n`` points M1 are spread along [p1, p2]; each is projected orthogonally
    onto the line (q1, q2) giving M2, which is kept only when it lies on
    [q1, q2].  The result is the smallest kept |M1 M2|, or ``inf`` when no
    projection lands on the segment.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    p1, p2, q1, q2 = (np.asarray(v, dtype=float) for v in (p1, p2, q1, q2))
    _check_segment(p1, p2)
    _check_segment(q1, q2)
    s = np.linspace(0.0, 1.0, int(n))
    m1 = p1 + s[:, None] * (p2 - p1)
    d = q2 - q1
    seg = float(np.linalg.norm(d))
    t = (m1 - q1) @ d / (seg * seg)
    m2 = q1 + t[:, None] * d
    ok = (np.linalg.norm(m2 - q1, axis=1) <= seg) & (np.linalg.norm(m2 - q2, axis=1) <= seg)
    if not np.any(ok):
        return math.inf
    return float(np.min(np.linalg.norm(m1[ok] - m2[ok], axis=1)))


def segment_distance_exact(p1, p2, q1, q2) -> float:
    """Exact distance between segments [p1, p2] and [q1, q2]."""
    p1, p2, q1, q2 = (np.asarray(v, dtype=float) for v in (p1, p2, q1, q2))
    _check_segment(p1, p2)
    _check_segment(q1, q2)
    return _pykernel.segment_distance(p1, p2, q1, q2)


def base_clearance(q, g: MechanismGeometry, limd: float) -> tuple[float, float]:
    """Crank-tip height above the base plane, ``limd`` below the motor points.

    Equals ``sin(theta_i) L + limd`` for the parallel-axis variants; a margin
    above zero is feasible.
    """
    q = JointAngles(*q)
    out = []
    for k, th in ((1, q.t1), (2, q.t2)):
        a = g.leg(k)[0]
        out.append(float(crank_tip(g, k, th)[2] - a[2]) + limd)
    return (out[0], out[1])


def pose_feasible(g: MechanismGeometry, o, params: ConstraintParams | None = None,
                  mode=None) -> FeasibilityReport:
    """Run IK in the working mode and evaluate every constraint."""
    params = params or ConstraintParams()
    o = np.asarray(o, dtype=float)
    try:
        q = inverse_kinematics(g, o, mode)
    except (Unreachable, ModeVanished) as exc:
        # a vanished mode is a double root: the serial-singular reach limit
        if isinstance(exc, Unreachable):
            names = tuple(f"unreachable_leg{k}" for k in (1, 2) if not leg_roots(g, k, o))
        else:
            names = (f"mode_vanished_leg{exc.leg}",) if exc.leg else ("mode_vanished_leg1",
                                                                       "mode_vanished_leg2")
        return FeasibilityReport(False, (), math.inf, (), names)
    st = leg_points(g, q, o)
    failed = []
    angles = cone_angles(st, o)
    for name, ang, lim in zip(("cone_B1", "cone_B2", "cone_C1", "cone_C2"), angles,
                              params.cone_limits):
        if ang > lim:
            failed.append(name)
    dist = segment_distance_exact(st.b[0], st.c[0], st.b[1], st.c[1])
    if dist < params.clearance:
        failed.append("segments")
    margins = base_clearance(q, g, params.limd)
    for k, m in enumerate(margins):
        if m <= 0.0:
            failed.append(f"base{k + 1}")
    dets = None
    if params.singularity_margin is not None:
        jp = jacobians(st)
        dets = (jp.detA, jp.detB)
        if abs(dets[0]) < params.singularity_margin or abs(dets[1]) < params.singularity_margin:
            failed.append("singular")
    return FeasibilityReport(not failed, angles, dist, margins, tuple(failed), q, dets)
