"""Rotation matrices and the two angle sets used throughout the package.

The rotation matrix (fixed frame <- mobile frame) is the canonical attitude;
roll-pitch-yaw and tilt-and-torsion are views computed from it.

* RPY: ``R = Rz(yaw) @ Ry(pitch) @ Rx(roll)`` (intrinsic z, y', x'').
  The yaw is the first actuated joint of the serial leg.
* Tilt-and-torsion: ``R = Rz(azimuth) @ Ry(tilt) @ Rz(torsion - azimuth)``.
"""

from __future__ import annotations

import math
import warnings
from typing import NamedTuple

import numpy as np

_DEGENERATE_SIN = 1e-12
_GIMBAL_TOL = 1e-9


class GimbalLockWarning(RuntimeWarning):
    """Pitch is at +/-pi/2; roll was set to zero and yaw absorbs the sum."""


class RpyAngles(NamedTuple):
    yaw: float
    pitch: float
    roll: float


class TiltTorsion(NamedTuple):
    azimuth: float
    tilt: float
    torsion: float


def wrap_angle(a: float) -> float:
    """Map an angle to (-pi, pi]."""
    w = math.remainder(a, 2.0 * math.pi)
    if w <= -math.pi:
        w += 2.0 * math.pi
    return w


def rot_x(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def is_rotation(r, tol: float = 1e-12) -> bool:
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3) or not np.all(np.isfinite(r)):
        return False
    if np.max(np.abs(r.T @ r - np.eye(3))) > tol:
        return False
    return abs(np.linalg.det(r) - 1.0) <= tol


def rpy_to_orientation(angles) -> np.ndarray:
    yaw, pitch, roll = angles
    return rot_z(yaw) @ rot_y(pitch) @ rot_x(roll)


def orientation_to_rpy(o) -> RpyAngles:
    """Extract (yaw, pitch, roll) with pitch in [-pi/2, pi/2].

    At gimbal lock a :class:`GimbalLockWarning` is emitted, roll is 0 and the
    yaw carries the free combination.
    """
    r = np.asarray(o, dtype=float)
    sp = -r[2, 0]
    cp = math.hypot(r[0, 0], r[1, 0])
    pitch = math.atan2(sp, cp)
    if cp < _GIMBAL_TOL:
        warnings.warn("pitch at +/-pi/2, roll fixed to 0", GimbalLockWarning, stacklevel=2)
        return RpyAngles(math.atan2(-r[0, 1], r[1, 1]), pitch, 0.0)
    return RpyAngles(math.atan2(r[1, 0], r[0, 0]), pitch, math.atan2(r[2, 1], r[2, 2]))


def tnt_to_orientation(t) -> np.ndarray:
    azimuth, tilt, torsion = t
    return rot_z(azimuth) @ rot_y(tilt) @ rot_z(torsion - azimuth)


def orientation_to_tnt(o) -> TiltTorsion:
    """Inverse of :func:`tnt_to_orientation` (a ZYZ extraction).

    Canonical ranges: tilt in [0, pi], azimuth and torsion in (-pi, pi].
    When the tilt is 0 or pi the azimuth is unobservable and set to 0.
    """
    r = np.asarray(o, dtype=float)
    st = math.hypot(r[0, 2], r[1, 2])
    tilt = math.atan2(st, r[2, 2])
    if st < _DEGENERATE_SIN:
        if r[2, 2] > 0.0:
            return TiltTorsion(0.0, 0.0, wrap_angle(math.atan2(r[1, 0], r[0, 0])))
        # tilt = pi: R = diag(-1, 1, -1) @ Rz(torsion)
        return TiltTorsion(0.0, math.pi, wrap_angle(math.atan2(r[1, 0], r[1, 1])))
    azimuth = math.atan2(r[1, 2], r[0, 2])
    third = math.atan2(r[2, 1], -r[2, 0])
    return TiltTorsion(wrap_angle(azimuth), tilt, wrap_angle(azimuth + third))
