"""Brute-force direct kinematics: vectorised Newton from a (pitch, roll) grid."""

import math

import numpy as np

from eelwrist.mechanism import crank_tip


def _frames(t3, ph, ps):
    c3, s3 = math.cos(t3), math.sin(t3)
    cp, sp = np.cos(ph), np.sin(ph)
    cr, sr = np.cos(ps), np.sin(ps)
    # columns of Rz(t3) Ry(ph) Rx(ps)
    x = np.stack([c3 * cp, s3 * cp, -sp], axis=-1)
    y = np.stack([c3 * sp * sr - s3 * cr, s3 * sp * sr + c3 * cr, cp * sr], axis=-1)
    return x, y


def brute_force_fk(g, q, n=36, iters=40, tol=1e-12):
    t1, t2, t3 = q
    b1, b2 = crank_tip(g, 1, t1), crank_tip(g, 2, t2)
    yaxis = np.array([-math.sin(t3), math.cos(t3), 0.0])
    g1 = np.linspace(-math.pi, math.pi, n, endpoint=False) + math.pi / n
    ph, ps = (a.ravel() for a in np.meshgrid(g1, g1))
    for _ in range(iters):
        c1, c2 = _frames(t3, ph, ps)
        r1, r2 = c1 - b1, c2 - b2
        f = np.stack([np.sum(r1 * r1, 1) - 1.0, np.sum(r2 * r2, 1) - 1.0], 1)
        xpp = c1  # roll axis x'' = first column
        J = np.empty((len(ph), 2, 2))
        J[:, 0, 0] = 2 * np.sum(r1 * np.cross(yaxis, c1), 1)
        J[:, 0, 1] = 0.0  # c1 is on the roll axis
        J[:, 1, 0] = 2 * np.sum(r2 * np.cross(yaxis, c2), 1)
        J[:, 1, 1] = 2 * np.sum(r2 * np.cross(xpp, c2), 1)
        det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
        det = np.where(np.abs(det) < 1e-14, np.nan, det)
        dph = (J[:, 1, 1] * f[:, 0] - J[:, 0, 1] * f[:, 1]) / det
        dps = (-J[:, 1, 0] * f[:, 0] + J[:, 0, 0] * f[:, 1]) / det
        step = np.clip(np.hypot(dph, dps), 0, 0.5) / np.maximum(np.hypot(dph, dps), 1e-300)
        ph = ph - step * dph
        ps = ps - step * dps
    c1, c2 = _frames(t3, ph, ps)
    res = np.maximum(np.abs(np.sum((c1 - b1) ** 2, 1) - 1), np.abs(np.sum((c2 - b2) ** 2, 1) - 1))
    ok = np.isfinite(res) & (res < tol)
    mats = []
    for a, b in zip(ph[ok], ps[ok]):
        cz, sz = math.cos(t3), math.sin(t3)
        rz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]])
        ry = np.array([[math.cos(a), 0, math.sin(a)], [0, 1, 0], [-math.sin(a), 0, math.cos(a)]])
        rx = np.array([[1, 0, 0], [0, math.cos(b), -math.sin(b)], [0, math.sin(b), math.cos(b)]])
        o = rz @ ry @ rx
        if not any(np.abs(o - m).max() < 1e-6 for m in mats):
            mats.append(o)
    return mats


def same_sets(a, b, tol=1e-8):
    if len(a) != len(b):
        return False
    used = set()
    for m in a:
        hit = [j for j, o in enumerate(b) if j not in used and np.abs(m - o).max() <= tol]
        if not hit:
            return False
        used.add(hit[0])
    return True
