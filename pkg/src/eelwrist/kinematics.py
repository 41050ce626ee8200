"""Inverse and direct kinematics of the wrist.

Each RUS leg closes when ``|C_i - B_i| = coupler``.  For a known platform
attitude this is ``P cos(theta_i) + Q sin(theta_i) = E`` in the crank angle,
solved as a quadratic in ``tan(theta_i / 2)``.  For known joints the leg-1
equation involves the pitch only and the leg-2 equation is then linear in
``(cos roll, sin roll)``, again solved through the half-angle tangent.

Working modes (inverse branches) are labelled by the sign of
``(l_i x r_i) . i_i``; assembly modes (direct branches) by the pitch branch
and the sign of ``r_2 . (x'' x p_2)``, where ``x''`` is the roll axis.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (AmbiguousSelection, IndeterminateLeg, InvalidGeometry, ModeVanished,
                     NoConvergence, Unreachable)
from .mechanism import (DesignVariant, JointAngles, MechanismGeometry,
                        closure_residuals, crank_sign, crank_tip, leg_equation,
                        leg_points)
from .orientation import (GimbalLockWarning, orientation_to_rpy, rot_x, rot_y,
                          rot_z, wrap_angle)

LEADING_EPS = 1e-12
SIGN_EPS = 1e-12

SPURIOUS = "spurious_q1"
PRINCIPAL = "principal"


@dataclass(frozen=True)
class TrigRoot:
    theta: float
    double: bool = False
    degenerate: bool = False  # leading coefficient vanished; solved linearly


def solve_trig(P: float, Q: float, E: float, polish: bool = True) -> list[TrigRoot]:
    """Real roots of ``P cos(t) + Q sin(t) = E`` in (-pi, pi].

    With ``T = tan(t/2)``: ``(E + P) T^2 - 2 Q T + (E - P) = 0``.  The
    substitution cannot represent ``t = pi``; that root appears when the
    leading coefficient vanishes and is tested directly.
    """
    scale = max(abs(P), abs(Q), abs(E), 1e-300)
    a2, a1, a0 = E + P, -2.0 * Q, E - P
    roots: list[TrigRoot] = []
    if abs(a2) <= LEADING_EPS * scale:
        roots.append(TrigRoot(math.pi, degenerate=True))
        if abs(a1) > LEADING_EPS * scale:
            roots.append(TrigRoot(2.0 * math.atan(-a0 / a1), degenerate=True))
    else:
        disc = a1 * a1 - 4.0 * a2 * a0  # = 4 (P^2 + Q^2 - E^2)
        if disc < -1e-12 * scale * scale:
            return []
        if disc <= 1e-12 * scale * scale:
            roots.append(TrigRoot(2.0 * math.atan(-a1 / (2.0 * a2)), double=True))
        else:
            sq = math.sqrt(disc)
            # numerically stable pair
            qq = -0.5 * (a1 + math.copysign(sq, a1))
            t_a = qq / a2
            t_b = a0 / qq if qq != 0.0 else -a1 / a2 - t_a
            roots.extend(TrigRoot(2.0 * math.atan(t)) for t in (t_a, t_b))
    out = []
    for r in roots:
        th = _newton_trig(P, Q, E, r.theta) if polish and not r.double else r.theta
        out.append(TrigRoot(wrap_angle(th), r.double, r.degenerate))
    out.sort(key=lambda r: r.theta)
    return out


def _newton_trig(P, Q, E, t, steps=1):
    for _ in range(steps):
        f = P * math.cos(t) + Q * math.sin(t) - E
        df = -P * math.sin(t) + Q * math.cos(t)
        if abs(df) < 1e-14:
            break
        t -= f / df
    return t


def _sign(v: float, scale: float = 1.0) -> int:
    if abs(v) <= SIGN_EPS * scale:
        return 0
    return 1 if v > 0 else -1


# --- inverse kinematics -----------------------------------------------------

@dataclass(frozen=True)
class IkSolution:
    q: JointAngles
    mode: tuple  # (s1, s2) in {+1, -1, 0}; 0 marks a double root
    crank_terms: tuple  # (l_i x r_i) . i_i
    lr_dots: tuple  # l_i . r_i
    residuals: tuple
    double: tuple = (False, False)
    degenerate: tuple = (False, False)


def yaw_of(o) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GimbalLockWarning)
        return orientation_to_rpy(o).yaw


def leg_roots(g: MechanismGeometry, k: int, o) -> list[TrigRoot]:
    _, _, _, _, cm = g.leg(k)
    return solve_trig(*leg_equation(g, k, np.asarray(o) @ cm))


def _no_roots(g: MechanismGeometry, k: int, o) -> Unreachable:
    P, Q, E = leg_equation(g, k, np.asarray(o) @ g.leg(k)[4])[:3]
    if max(abs(P), abs(Q), abs(E)) <= 1e-12 * max(1.0, g.rod_length):
        return IndeterminateLeg(f"leg {k} closes for every crank angle", leg=k)
    return Unreachable(f"leg {k} cannot reach this orientation", leg=k)


def inverse_kinematics_all(g: MechanismGeometry, o) -> list[IkSolution]:
    """Every joint solution of the attitude ``o`` (up to four).

    Raises :class:`Unreachable` naming the first leg that cannot close.
    """
    o = np.asarray(o, dtype=float)
    t3 = yaw_of(o)
    per_leg = []
    for k in (1, 2):
        roots = leg_roots(g, k, o)
        if not roots:
            raise _no_roots(g, k, o)
        c = o @ g.leg(k)[4]
        tagged = []
        for r in roots:
            s = crank_sign(g, k, r.theta, c)
            tagged.append((_sign(s, g.rod_length * g.coupler_length), s, r))
        tagged.sort(key=lambda x: -x[0])
        per_leg.append(tagged)
    sols = []
    for (s1, v1, r1), (s2, v2, r2) in itertools.product(*per_leg):
        q = JointAngles(r1.theta, r2.theta, t3)
        st = leg_points(g, q, o)
        sols.append(IkSolution(
            q=q,
            mode=(s1, s2),
            crank_terms=(v1, v2),
            lr_dots=(float(st.l[0] @ st.r[0]), float(st.l[1] @ st.r[1])),
            residuals=closure_residuals(g, q, o),
            double=(r1.double, r2.double),
            degenerate=(r1.degenerate, r2.degenerate),
        ))
    return sols


def parse_mode(mode) -> tuple:
    if isinstance(mode, str):
        if len(mode) != 2 or any(ch not in "+-" for ch in mode):
            raise ValueError(f"mode must look like '++' or '+-', got {mode!r}")
        return tuple(1 if ch == "+" else -1 for ch in mode)
    return tuple(int(s) for s in mode)


def inverse_kinematics(g: MechanismGeometry, o, mode=None) -> JointAngles:
    """Joint solution in working mode ``mode`` (defaults to the home mode)."""
    want = g.home.mode if mode is None else parse_mode(mode)
    o = np.asarray(o, dtype=float)
    q = []
    for k in (1, 2):
        roots = leg_roots(g, k, o)
        if not roots:
            raise _no_roots(g, k, o)
        c = o @ g.leg(k)[4]
        pick = None
        for r in roots:
            s = _sign(crank_sign(g, k, r.theta, c), g.rod_length * g.coupler_length)
            if s == 0:
                raise ModeVanished(f"leg {k} is at a double root (serial singularity)", leg=k)
            if s == want[k - 1]:
                pick = r.theta
        if pick is None:
            raise Unreachable(f"leg {k} has no root in mode {want[k - 1]:+d}", leg=k)
        q.append(pick)
    return JointAngles(q[0], q[1], yaw_of(o))


# --- direct kinematics ------------------------------------------------------

@dataclass(frozen=True)
class FkSolution:
    orientation: np.ndarray = field(repr=False)
    branch: str
    pitch: float
    roll: float
    coupler_term: float  # r2 . (x'' x p2)
    coupler_dot: float  # r2 . p2
    residuals: tuple
    degenerate: bool = False

    @property
    def roll_sign(self) -> int:
        return _sign(self.coupler_term)


def coupler_sign(g: MechanismGeometry, q, o) -> float:
    """``r2 . (x'' x p2)``: derivative sign of the leg-2 closure along roll."""
    st = leg_points(g, q, o)
    axis = np.asarray(o)[:, 0]
    return float(st.r[1] @ np.cross(axis, st.p[1]))


def pitch_branches(g: MechanismGeometry, q) -> list[tuple[float, str, bool]]:
    """Pitch roots of the leg-1 closure (``c1_mobile = x_m``).

    With ``Q = tan(pitch/2)`` the closure reads
    ``(E + hx) Q^2 + 2 hz Q + (E - hx) = 0`` where ``h = Rz(t3)^T B1``.  For
    the unit parallel-actuator wrist ``E = -hz`` so ``Q = 1`` is always a
    root, whatever the joints: the polynomial factors as
    ``(Q - 1) ((E + hx) Q - (E - hx))``.
    """
    q = JointAngles(*q)
    b1 = crank_tip(g, 1, q.t1)
    h = rot_z(q.t3).T @ b1
    cm = g.c1_mobile
    e1 = (float(cm @ cm) + float(b1 @ b1) - g.coupler_length ** 2) / 2.0
    scale = max(abs(e1), abs(h[0]), abs(h[2]), 1e-300)
    if abs(e1 + h[2]) <= 1e-12 * scale:
        lead, const = e1 + h[0], e1 - h[0]
        out = [(math.pi / 2, SPURIOUS, False)]
        if abs(lead) <= LEADING_EPS * scale:
            out.append((math.pi, PRINCIPAL, True))  # linear factor has no finite root
        else:
            phi = 2.0 * math.atan(const / lead)
            phi = _newton_trig(h[0], -h[2], e1, phi)
            out.append((wrap_angle(phi), PRINCIPAL, False))
        return out
    return [(r.theta, PRINCIPAL, r.degenerate) for r in solve_trig(h[0], -h[2], e1)]


def _roll_equation(g: MechanismGeometry, b2: np.ndarray, m: np.ndarray):
    # c2 = M Rx(roll) cm2; c2 . b2 = E2 is linear in (cos roll, sin roll)
    cm = g.c2_mobile
    e2 = (float(cm @ cm) + float(b2 @ b2) - g.coupler_length ** 2) / 2.0
    hb = m.T @ b2
    P = cm[1] * hb[1] + cm[2] * hb[2]
    Q = cm[1] * hb[2] - cm[2] * hb[1]
    return P, Q, e2 - cm[0] * hb[0]


def direct_kinematics_all(g: MechanismGeometry, q) -> list[FkSolution]:
    """All closure-consistent attitudes for the joints ``q`` (up to four)."""
    if g.variant is not DesignVariant.PARALLEL_ACTUATORS:
        raise InvalidGeometry("closed-form direct kinematics exists only for "
                              "parallel_actuators; use direct_kinematics_numeric")
    q = JointAngles(*q)
    b2 = crank_tip(g, 2, q.t2)
    sols = []
    for phi, branch, degenerate in pitch_branches(g, q):
        m = rot_z(q.t3) @ rot_y(phi)
        for r in solve_trig(*_roll_equation(g, b2, m)):
            o = m @ rot_x(r.theta)
            st = leg_points(g, q, o)
            sols.append(FkSolution(
                orientation=o,
                branch=branch,
                pitch=phi,
                roll=r.theta,
                coupler_term=float(st.r[1] @ np.cross(o[:, 0], st.p[1])),
                coupler_dot=float(st.r[1] @ st.p[1]),
                residuals=closure_residuals(g, q, o),
                degenerate=degenerate or r.degenerate,
            ))
    sols.sort(key=lambda s: (s.branch != SPURIOUS, -s.roll_sign, s.roll))
    return sols


def direct_kinematics(g: MechanismGeometry, q) -> np.ndarray:
    """The working assembly: principal pitch branch, roll root on the home side."""
    ref = _sign(g.home.coupler_sign)
    principal = [s for s in direct_kinematics_all(g, q) if s.branch == PRINCIPAL]
    if not principal:
        raise Unreachable("no principal direct-kinematic solution")
    if any(s.roll_sign == 0 for s in principal):
        raise ModeVanished("roll roots coincide (parallel singularity)")
    match = [s for s in principal if s.roll_sign == ref]
    if not match:
        raise Unreachable("no assembly on the home side of the coupler sign")
    if len(match) > 1:
        raise AmbiguousSelection("several assemblies share the home coupler sign",
                                 [s.orientation for s in match])
    return match[0].orientation


def _closure_and_jacobian(g, q, pitch, roll):
    m1 = rot_z(q.t3)
    m2 = m1 @ rot_y(pitch)
    o = m2 @ rot_x(roll)
    st = leg_points(g, q, o)
    y_axis = m1[:, 1]
    x_axis = m2[:, 0]
    k2 = g.coupler_length ** 2
    f = np.array([st.r[0] @ st.r[0] - k2, st.r[1] @ st.r[1] - k2])
    jac = np.array([
        [2.0 * st.r[k] @ np.cross(y_axis, st.c[k]), 2.0 * st.r[k] @ np.cross(x_axis, st.c[k])]
        for k in (0, 1)
    ])
    return o, f, jac


def direct_kinematics_numeric(g: MechanismGeometry, q, seed, tol: float = 1e-10,
                              max_iter: int = 100, full_output: bool = False):
    """Damped Newton on the two closure residuals over (pitch, roll).

    The yaw is the joint ``t3``; ``seed`` supplies the starting pitch/roll.
    """
    q = JointAngles(*q)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GimbalLockWarning)
        rpy = orientation_to_rpy(seed)
    x = np.array([rpy.pitch, rpy.roll])
    o, f, jac = _closure_and_jacobian(g, q, *x)
    for it in range(max_iter + 1):
        if np.max(np.abs(f)) <= tol:
            return (o, it) if full_output else o
        if it == max_iter:
            break
        step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        norm0 = float(f @ f)
        lam = 1.0
        for _ in range(40):
            o_n, f_n, jac_n = _closure_and_jacobian(g, q, *(x + lam * step))
            if float(f_n @ f_n) < norm0:
                break
            lam *= 0.5
        else:
            raise NoConvergence("line search exhausted; joints likely unreachable")
        x = x + lam * step
        o, f, jac = o_n, f_n, jac_n
    raise NoConvergence(f"no convergence after {max_iter} iterations")
