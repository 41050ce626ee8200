"""Velocity kinematics, singularities and isotropy.

Differentiating the leg closures ``|c_i - b_i|^2 = k^2`` with ``c_i' = w x c_i``
and ``b_i' = theta_i' (i_i x l_i)`` gives, per leg,

    (p_i x r_i) . w = ((l_i x r_i) . i_i) theta_i'

and leg 3 (serial z / y' / x'') adds ``n_3 . w = cos(pitch) theta_3'`` with
``n_3 = x'' x y'``.  Stacked: ``A w = B q'``.  At zero pitch the third rows are
``[0 0 1]`` and ``1``; they are kept exact here so the relation holds at any
attitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SerialSingular
from .mechanism import LegStates

DEFAULT_EPS = 1e-8


def _pitch_axis(o: np.ndarray) -> tuple[np.ndarray, float]:
    cp = math.hypot(o[0, 0], o[1, 0])
    sp = -o[2, 0]
    if cp > 1e-14:
        cy, sy = o[0, 0] / cp, o[1, 0] / cp
    else:
        cy, sy = 1.0, 0.0
    return np.array([cy * sp, sy * sp, cp]), cp


@dataclass(frozen=True)
class JacobianPair:
    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)

    @property
    def detA(self) -> float:
        return float(np.linalg.det(self.A))

    @property
    def detB(self) -> float:
        return float(np.prod(np.diag(self.B)))


def jacobians(state: LegStates) -> JacobianPair:
    """``A`` and ``B`` with ``A w = B q'``."""
    o = np.asarray(state.orientation, dtype=float)
    n3, cp = _pitch_axis(o)
    A = np.vstack([np.cross(state.p[0], state.r[0]), np.cross(state.p[1], state.r[1]), n3])
    B = np.diag([
        float(np.cross(state.l[0], state.r[0]) @ state.i[0]),
        float(np.cross(state.l[1], state.r[1]) @ state.i[1]),
        cp,
    ])
    return JacobianPair(A, B)


def inverse_jacobian(state: LegStates, eps: float = DEFAULT_EPS) -> np.ndarray:
    """``J^-1 = B^-1 A``, so that ``q' = J^-1 w``."""
    jp = jacobians(state)
    d = np.diag(jp.B)
    if abs(jp.detB) <= eps or np.any(np.abs(d) <= eps):
        raise SerialSingular(f"det B = {jp.detB:.3e} within {eps:g} of zero")
    return jp.A / d[:, None]


def joint_velocity(state: LegStates, omega, eps: float = DEFAULT_EPS) -> np.ndarray:
    return inverse_jacobian(state, eps) @ np.asarray(omega, dtype=float)


def angular_velocity(state: LegStates, qdot) -> np.ndarray:
    """Platform angular velocity (base frame) produced by joint rates ``qdot``."""
    jp = jacobians(state)
    return np.linalg.solve(jp.A, jp.B @ np.asarray(qdot, dtype=float))


def condition_number(m) -> float:
    """2-norm condition number; ``inf`` when the smallest singular value < 1e-15."""
    s = np.linalg.svd(np.asarray(m, dtype=float), compute_uv=False)
    if s[-1] < 1e-15:
        return math.inf
    return float(s[0] / s[-1])


# --- singularities -----------------------------------------------------------

@dataclass(frozen=True)
class SingularityReport:
    kind: str  # regular | parallel | serial | both
    detA: float
    detB: float
    witnesses: tuple = ()


def _unit_cross_norm(a, b) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < 1e-15 or nb < 1e-15:
        return 0.0
    return float(np.linalg.norm(np.cross(a, b)) / (na * nb))


def singularity_report(state: LegStates, eps: float = DEFAULT_EPS,
                       witness_tol: float = 1e-8) -> SingularityReport:
    """Classify by determinant thresholds and list the geometric witnesses.

    Witnesses are evaluated from the geometric conditions directly, not from
    the determinants, so the two can be cross-checked.
    """
    jp = jacobians(state)
    da, db = jp.detA, jp.detB
    par, ser = abs(da) <= eps, abs(db) <= eps
    kind = "both" if par and ser else "parallel" if par else "serial" if ser else "regular"

    w = []
    pts = np.vstack([state.b[0], state.b[1], state.c[0], state.c[1]])
    if np.linalg.svd(pts, compute_uv=False)[-1] <= witness_tol:
        w.append("coplanar (B1,B2,C1,C2,O)")
    n = [np.cross(state.p[k], state.r[k]) for k in (0, 1)]
    for k in (0, 1):
        if _unit_cross_norm(state.p[k], state.r[k]) <= witness_tol:
            w.append(f"alignment (B{k + 1},C{k + 1},O)")
    if _unit_cross_norm(n[0], n[1]) <= witness_tol:
        w.append("parallel normals (p1 x r1, p2 x r2)")
    else:
        m = np.cross(n[0], n[1])
        if abs(float(m @ jp.A[2])) <= witness_tol * np.linalg.norm(m):
            w.append("leg 3 axis in the span of (p1 x r1, p2 x r2)")
    for k in (0, 1):
        if _unit_cross_norm(state.l[k], state.r[k]) <= witness_tol:
            w.append(f"alignment (l{k + 1},r{k + 1})")
        if _unit_cross_norm(state.r[k], state.i[k]) <= witness_tol:
            w.append(f"alignment (r{k + 1},i{k + 1})")
        scale = np.linalg.norm(state.l[k]) * np.linalg.norm(state.r[k])
        if abs(jp.B[k, k]) <= witness_tol * scale:
            w.append(f"coplanar (i{k + 1},l{k + 1},r{k + 1})")
    if abs(jp.B[2, 2]) <= witness_tol:
        w.append("leg 3 gimbal (pitch = +-90 deg)")
    return SingularityReport(kind, da, db, tuple(w))


# --- isotropy ---------------------------------------------------------------

@dataclass(frozen=True)
class IsotropyReport:
    conditions: dict  # name -> (value, passed)
    kappa_A: float
    kappa_B: float

    @property
    def a_isotropic(self) -> bool:
        return all(ok for name, (_, ok) in self.conditions.items() if name.startswith("A:"))

    @property
    def b_isotropic(self) -> bool:
        return all(ok for name, (_, ok) in self.conditions.items() if name.startswith("B:"))


def isotropy_check(state: LegStates, tol: float = 1e-9) -> IsotropyReport:
    """Evaluate the geometric conditions under which A or B is isotropic.

    ``A`` is isotropic when its rows ``p_i x r_i`` are unit and mutually
    orthogonal (with the leg-3 row).  ``B`` is diagonal, so it is isotropic
    when each crank term ``(l_i x r_i) . i_i`` has the magnitude of the leg-3
    entry ``cos(pitch)``.  Unit ``l_i``, ``r_i`` with ``l_i . r_i = 0`` and
    ``l_i . i_i = 0`` is one way to get there; those dot products are listed
    under ``geom:`` for information and do not decide the verdict.
    """
    jp = jacobians(state)
    n = [jp.A[0], jp.A[1], jp.A[2]]
    cond = {}

    def put(name, value, target=0.0, magnitude=False):
        v = abs(float(value)) if magnitude else float(value)
        cond[name] = (float(value), abs(v - target) <= tol)

    for k in (0, 1):
        put(f"A: p{k + 1} . r{k + 1}", state.p[k] @ state.r[k])
        put(f"A: |p{k + 1} x r{k + 1}|", np.linalg.norm(n[k]), 1.0)
    put("A: (p1 x r1) . (p2 x r2)", n[0] @ n[1])
    put("A: (p1 x r1) . n3", n[0] @ n[2])
    put("A: (p2 x r2) . n3", n[1] @ n[2])
    b3 = abs(float(jp.B[2, 2]))
    for k in (0, 1):
        put(f"B: (l{k + 1} x r{k + 1}) . i{k + 1}", jp.B[k, k], b3, magnitude=True)
        put(f"geom: l{k + 1} . r{k + 1}", state.l[k] @ state.r[k])
        put(f"geom: l{k + 1} . i{k + 1}", state.l[k] @ state.i[k])
    return IsotropyReport(cond, condition_number(jp.A), condition_number(jp.B))
