"""Wrist geometry: motor points, crank axes, the three design variants.

Frames follow the usual convention for this wrist: the base frame has z
vertical and x from A2 to A1; the mobile frame has x_m towards C1 and
y_m towards C2, both frames sharing the rotation centre O.

Legs 1 and 2 are RUS chains.  The crank of leg i turns about ``i_i`` through
``A_i``; at joint angle theta the crank tip is::

    B_i = A_i + L * (cos(theta) * u_i + sin(theta) * (i_i x u_i))

where ``u_i`` is the crank direction at theta = 0.  Leg 3 is the serial
z / y' / x'' chain whose first joint is the yaw.

All lengths are dimensionless with the coupler ``|B_i C_i| = 1``.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InvalidGeometry, Unreachable
from .orientation import rot_z, wrap_angle

SQRT2_2 = math.sqrt(2.0) / 2.0

_X = (1.0, 0.0, 0.0)
_Y = (0.0, 1.0, 0.0)


class DesignVariant(str, enum.Enum):
    PARALLEL_AXES = "parallel_axes"
    ORTHOGONAL_AXES = "orthogonal_axes"
    PARALLEL_ACTUATORS = "parallel_actuators"

    @classmethod
    def parse(cls, name) -> "DesignVariant":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise InvalidGeometry(f"unknown design variant {name!r}") from None


class JointAngles(NamedTuple):
    t1: float
    t2: float
    t3: float


def _vec(v) -> np.ndarray:
    a = np.array(v, dtype=float).reshape(3)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MechanismGeometry:
    """Immutable wrist geometry.

    ``neutral_yaw`` is the yaw of the designed (centred) configuration; the
    workspace and the design-target checks measure orientations from it.
    """

    variant: DesignVariant
    a1: np.ndarray
    a2: np.ndarray
    i1: np.ndarray
    i2: np.ndarray
    rod_home_dir1: np.ndarray
    rod_home_dir2: np.ndarray
    rod_length: float
    coupler_length: float = 1.0
    c1_mobile: np.ndarray = field(default_factory=lambda: _vec(_X))
    c2_mobile: np.ndarray = field(default_factory=lambda: _vec(_Y))
    neutral_yaw: float = 0.0
    scale_mm: float = 100.0

    def __post_init__(self):
        for name in ("a1", "a2", "i1", "i2", "rod_home_dir1", "rod_home_dir2",
                     "c1_mobile", "c2_mobile"):
            v = _vec(getattr(self, name))
            if not np.all(np.isfinite(v)):
                raise InvalidGeometry(f"{name} must be finite")
            object.__setattr__(self, name, v)
        for name in ("i1", "i2", "rod_home_dir1", "rod_home_dir2"):
            n = float(np.linalg.norm(getattr(self, name)))
            if n < 1e-12:
                raise InvalidGeometry(f"{name} must be a nonzero axis")
            object.__setattr__(self, name, _vec(getattr(self, name) / n))
        for k in (1, 2):
            ax, u = getattr(self, f"i{k}"), getattr(self, f"rod_home_dir{k}")
            if abs(float(ax @ u)) > 1e-9:
                raise InvalidGeometry(f"rod_home_dir{k} must be perpendicular to i{k}")
        if not (self.rod_length > 0.0 and self.coupler_length > 0.0):
            raise InvalidGeometry("rod_length and coupler_length must be positive")
        if not self.scale_mm > 0.0:
            raise InvalidGeometry("scale_mm must be positive")
        object.__setattr__(self, "variant", DesignVariant.parse(self.variant))

    # crank plane: B = A + L (cos t u + sin t w)
    @property
    def w1(self) -> np.ndarray:
        return np.cross(self.i1, self.rod_home_dir1)

    @property
    def w2(self) -> np.ndarray:
        return np.cross(self.i2, self.rod_home_dir2)

    def leg(self, k: int):
        """(a, i, u, w, c_mobile) for leg k in {1, 2}."""
        if k == 1:
            return self.a1, self.i1, self.rod_home_dir1, self.w1, self.c1_mobile
        if k == 2:
            return self.a2, self.i2, self.rod_home_dir2, self.w2, self.c2_mobile
        raise ValueError("leg must be 1 or 2")

    @property
    def neutral_orientation(self) -> np.ndarray:
        return rot_z(self.neutral_yaw)

    @functools.cached_property
    def home(self):
        return _compute_home(self)

    def with_overrides(self, **kw) -> "MechanismGeometry":
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(kw)
        return MechanismGeometry(**data)


def make_geometry(variant="parallel_actuators", **overrides) -> MechanismGeometry:
    """Unit-mechanism geometry for one of the three design variants.

    Motor points follow ``A1 = [a, b, c]``, ``A2 = [-a, b, c]``.  Any
    dataclass field (or ``a``, ``b``, ``c``) may be overridden.

    >>> g = make_geometry("parallel_actuators")
    >>> g.a1.tolist() == [SQRT2_2, 0.0, -1.0]
    True
    """
    v = DesignVariant.parse(variant)
    if v is DesignVariant.PARALLEL_ACTUATORS:
        a, b, c = SQRT2_2, 0.0, -1.0
        base = dict(i1=_X, i2=_X, rod_home_dir1=_Y, rod_home_dir2=_Y,
                    rod_length=SQRT2_2, neutral_yaw=math.pi / 4)
    elif v is DesignVariant.PARALLEL_AXES:
        a, b, c = SQRT2_2, (math.sqrt(2.0) - 2.0) / 2.0, -1.0
        base = dict(i1=_X, i2=_X, rod_home_dir1=_Y, rod_home_dir2=_Y,
                    rod_length=1.0, neutral_yaw=math.pi / 4)
    else:
        # A1 = A2 = O, crank axes along x and y; cranks point down towards
        # the coupler feet of the centred pose (yaw = 90 deg).
        a, b, c = 0.0, 0.0, 0.0
        base = dict(i1=_X, i2=_Y,
                    rod_home_dir1=(0.0, SQRT2_2, -SQRT2_2),
                    rod_home_dir2=(-SQRT2_2, 0.0, -SQRT2_2),
                    rod_length=math.sqrt(2.0), neutral_yaw=math.pi / 2)
    a = overrides.pop("a", a)
    b = overrides.pop("b", b)
    c = overrides.pop("c", c)
    base.update(a1=(a, b, c), a2=(-a, b, c), variant=v)
    base.update(overrides)
    return MechanismGeometry(**base)


@dataclass(frozen=True, eq=False)
class LegStates:
    """Leg points and vectors of one pose, all in the base frame."""

    orientation: np.ndarray
    q: JointAngles
    b: tuple
    c: tuple
    l: tuple
    r: tuple
    p: tuple
    i: tuple


def crank_tip(g: MechanismGeometry, k: int, theta: float) -> np.ndarray:
    a, _, u, w, _ = g.leg(k)
    return a + g.rod_length * (math.cos(theta) * u + math.sin(theta) * w)


def leg_points(g: MechanismGeometry, q, o) -> LegStates:
    o = np.asarray(o, dtype=float)
    q = JointAngles(*q)
    bs, cs, ls, rs, ps = [], [], [], [], []
    for k, theta in ((1, q.t1), (2, q.t2)):
        a, _, _, _, cm = g.leg(k)
        b = crank_tip(g, k, theta)
        c = o @ cm
        bs.append(b)
        cs.append(c)
        ls.append(b - a)
        rs.append(c - b)
        ps.append(c)
    return LegStates(o, q, tuple(bs), tuple(cs), tuple(ls), tuple(rs), tuple(ps), (g.i1, g.i2))


def closure_residuals(g: MechanismGeometry, q, o) -> tuple[float, float]:
    """``|C_i - B_i|^2 - coupler^2`` for legs 1 and 2."""
    st = leg_points(g, q, o)
    k2 = g.coupler_length ** 2
    return (float(st.r[0] @ st.r[0] - k2), float(st.r[1] @ st.r[1] - k2))


class LegEquation(NamedTuple):
    """Leg closure as ``P cos(theta) + Q sin(theta) = E``."""

    P: float
    Q: float
    E: float


def leg_equation(g: MechanismGeometry, k: int, c) -> LegEquation:
    a, _, u, w, _ = g.leg(k)
    d = np.asarray(c, dtype=float) - a
    L = g.rod_length
    e = (float(d @ d) + L * L - g.coupler_length ** 2) / (2.0 * L)
    return LegEquation(float(d @ u), float(d @ w), e)


def crank_sign(g: MechanismGeometry, k: int, theta: float, c) -> float:
    """``(l_i x r_i) . i_i``; its sign separates the two crank solutions."""
    a, ax, _, _, _ = g.leg(k)
    b = crank_tip(g, k, theta)
    return float(np.cross(b - a, np.asarray(c) - b) @ ax)


class HomePose(NamedTuple):
    q: JointAngles
    orientation: np.ndarray
    mode: tuple
    coupler_sign: float


def _compute_home(g: MechanismGeometry) -> HomePose:
    # At the centred orientation pick, per leg, the crank root whose coupler
    # sits closest to the crank-perpendicular cone axis.
    o = g.neutral_orientation
    thetas, signs = [], []
    for k in (1, 2):
        a, ax, u, w, cm = g.leg(k)
        c = o @ cm
        P, Q, E = leg_equation(g, k, c)
        rho = math.hypot(P, Q)
        if rho < 1e-15 or abs(E) > rho * (1.0 + 1e-12):
            raise Unreachable(f"leg {k} cannot close at the neutral orientation", leg=k)
        beta = math.atan2(Q, P)
        gamma = math.acos(max(-1.0, min(1.0, E / rho)))
        best = None
        for th in (beta - gamma, beta + gamma):
            th = wrap_angle(th)
            b = crank_tip(g, k, th)
            r = c - b
            axis = np.cross(ax, (b - a) / g.rod_length)
            cosang = float(r @ axis) / float(np.linalg.norm(r))
            if best is None or cosang > best[0]:
                best = (cosang, th)
        th = best[1]
        thetas.append(th)
        s = crank_sign(g, k, th, c)
        signs.append(1 if s >= 0 else -1)
    q = JointAngles(thetas[0], thetas[1], g.neutral_yaw)
    from .kinematics import coupler_sign  # local: kinematics imports this module

    return HomePose(q, o, tuple(signs), coupler_sign(g, q, o))


def home_pose(g: MechanismGeometry) -> tuple[JointAngles, np.ndarray]:
    """Closure-consistent centred pose of the wrist (cached on ``g``)."""
    h = g.home
    return h.q, h.orientation.copy()


# --- JSON -------------------------------------------------------------------

def geometry_to_dict(g: MechanismGeometry) -> dict:
    return {
        "format": 1,
        "variant": g.variant.value,
        "a": float(g.a1[0]),
        "b": float(g.a1[1]),
        "c": float(g.a1[2]),
        "rod_length": g.rod_length,
        "coupler_length": g.coupler_length,
        "axes": {
            "i1": g.i1.tolist(),
            "i2": g.i2.tolist(),
            "home1": g.rod_home_dir1.tolist(),
            "home2": g.rod_home_dir2.tolist(),
        },
        "neutral_yaw": g.neutral_yaw,
        "scale_mm": g.scale_mm,
    }


def geometry_from_dict(d: dict) -> MechanismGeometry:
    if d.get("format", 1) != 1:
        raise InvalidGeometry(f"unsupported geometry format {d.get('format')!r}")
    kw = {}
    for key in ("a", "b", "c", "rod_length", "coupler_length", "neutral_yaw", "scale_mm"):
        if key in d:
            kw[key] = float(d[key])
    axes = d.get("axes") or {}
    for src, dst in (("i1", "i1"), ("i2", "i2"), ("home1", "rod_home_dir1"),
                     ("home2", "rod_home_dir2")):
        if src in axes:
            kw[dst] = tuple(axes[src])
    return make_geometry(d.get("variant", "parallel_actuators"), **kw)
