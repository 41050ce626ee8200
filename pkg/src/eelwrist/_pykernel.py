"""Pure-Python feasibility kernel (fallback for the compiled ``_ckernel``).

Scalar ``math`` code only; the two implementations must stay line-for-line
equivalent.  Inputs are packed vectors built by :mod:`eelwrist.kernel`:

geometry (35 doubles)
    a1, a2, i1, i2, u1, u2, w1, w2, c1_mobile, c2_mobile (3 each),
    rod_length, coupler_length, neutral_yaw, mode1, mode2
constraints (7 doubles)
    cos(lima) for cones B1, B2, C1, C2, limd, clearance,
    singularity margin (negative disables the check)
"""

import math

UNREACH1 = 1
UNREACH2 = 2
CONE_B1 = 4
CONE_B2 = 8
CONE_C1 = 16
CONE_C2 = 32
SEGMENTS = 64
BASE1 = 128
BASE2 = 256
SINGULAR = 512

_EPS = 1e-14


def _clamp01(x):
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


def segment_distance(p1, q1, p2, q2):
    """Exact distance between segments [p1, q1] and [p2, q2] (3-tuples)."""
    d1 = (q1[0] - p1[0], q1[1] - p1[1], q1[2] - p1[2])
    d2 = (q2[0] - p2[0], q2[1] - p2[1], q2[2] - p2[2])
    r = (p1[0] - p2[0], p1[1] - p2[1], p1[2] - p2[2])
    a = d1[0] * d1[0] + d1[1] * d1[1] + d1[2] * d1[2]
    e = d2[0] * d2[0] + d2[1] * d2[1] + d2[2] * d2[2]
    f = d2[0] * r[0] + d2[1] * r[1] + d2[2] * r[2]
    if a <= _EPS and e <= _EPS:
        s = t = 0.0
    elif a <= _EPS:
        s = 0.0
        t = _clamp01(f / e)
    else:
        c = d1[0] * r[0] + d1[1] * r[1] + d1[2] * r[2]
        if e <= _EPS:
            t = 0.0
            s = _clamp01(-c / a)
        else:
            b = d1[0] * d2[0] + d1[1] * d2[1] + d1[2] * d2[2]
            denom = a * e - b * b
            s = _clamp01((b * f - c * e) / denom) if denom > _EPS * a * e else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t = 0.0
                s = _clamp01(-c / a)
            elif t > 1.0:
                t = 1.0
                s = _clamp01((b - c) / a)
    dx = p1[0] + d1[0] * s - p2[0] - d2[0] * t
    dy = p1[1] + d1[1] * s - p2[1] - d2[1] * t
    dz = p1[2] + d1[2] * s - p2[2] - d2[2] * t
    return math.sqrt(dx * dx + dy * dy + dz * dz)


class FeasibilityKernel:
    backend = "python"

    def __init__(self, geometry, constraints):
        g = [float(v) for v in geometry]
        c = [float(v) for v in constraints]
        if len(g) != 35 or len(c) != 7:
            raise ValueError("geometry needs 35 values and constraints 7")
        self.g = g
        self.c = c

    def _leg(self, k, R):
        g = self.g
        o = 3 * (k - 1)
        a = g[o:o + 3]
        ax = g[6 + o:9 + o]
        u = g[12 + o:15 + o]
        w = g[18 + o:21 + o]
        cm = g[24 + o:27 + o]
        L = g[30]
        kk = g[31]
        mode = g[33 + k - 1]
        c = (R[0] * cm[0] + R[1] * cm[1] + R[2] * cm[2],
             R[3] * cm[0] + R[4] * cm[1] + R[5] * cm[2],
             R[6] * cm[0] + R[7] * cm[1] + R[8] * cm[2])
        d = (c[0] - a[0], c[1] - a[1], c[2] - a[2])
        P = d[0] * u[0] + d[1] * u[1] + d[2] * u[2]
        Q = d[0] * w[0] + d[1] * w[1] + d[2] * w[2]
        E = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + L * L - kk * kk) / (2.0 * L)
        rho = math.hypot(P, Q)
        if rho < _EPS or abs(E) > rho:
            return None
        # roots beta -/+ gamma; the minus root has (l x r).i > 0
        theta = math.atan2(Q, P) - mode * math.acos(E / rho)
        theta = math.remainder(theta, 2.0 * math.pi)
        ct, st = math.cos(theta), math.sin(theta)
        l = (L * (ct * u[0] + st * w[0]), L * (ct * u[1] + st * w[1]), L * (ct * u[2] + st * w[2]))
        b = (a[0] + l[0], a[1] + l[1], a[2] + l[2])
        return theta, ax, b, c, l

    def check(self, R):
        """Failure bitmask for the row-major rotation ``R`` (0 = feasible)."""
        cs = self.c
        flags = 0
        legs = (self._leg(1, R), self._leg(2, R))
        if legs[0] is None:
            flags |= UNREACH1
        if legs[1] is None:
            flags |= UNREACH2
        if flags:
            return flags
        L = self.g[30]
        zm = (R[2], R[5], R[8])
        crank = [0.0, 0.0]
        n = [None, None]
        for k in (0, 1):
            theta, ax, b, c, l = legs[k]
            r = (c[0] - b[0], c[1] - b[1], c[2] - b[2])
            rn = math.sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2])
            # cone at B: axis i x l / L
            axb = ((ax[1] * l[2] - ax[2] * l[1]) / L,
                   (ax[2] * l[0] - ax[0] * l[2]) / L,
                   (ax[0] * l[1] - ax[1] * l[0]) / L)
            if (r[0] * axb[0] + r[1] * axb[1] + r[2] * axb[2]) < cs[k] * rn:
                flags |= CONE_B1 << k
            # cone at C: axis -z_m, coupler direction B - C
            if (r[0] * zm[0] + r[1] * zm[1] + r[2] * zm[2]) < cs[2 + k] * rn:
                flags |= CONE_C1 << k
            if l[2] + cs[4] <= 0.0:
                flags |= BASE1 << k
            crank[k] = (l[1] * r[2] - l[2] * r[1]) * ax[0] \
                + (l[2] * r[0] - l[0] * r[2]) * ax[1] \
                + (l[0] * r[1] - l[1] * r[0]) * ax[2]
            n[k] = (c[1] * r[2] - c[2] * r[1], c[2] * r[0] - c[0] * r[2], c[0] * r[1] - c[1] * r[0])
        if segment_distance(legs[0][2], legs[0][3], legs[1][2], legs[1][3]) < cs[5]:
            flags |= SEGMENTS
        if cs[6] >= 0.0:
            cp = math.hypot(R[0], R[3])
            sp = -R[6]
            if cp > _EPS:
                cy, sy = R[0] / cp, R[3] / cp
            else:
                cy, sy = 1.0, 0.0
            n3 = (cy * sp, sy * sp, cp)
            det_a = (n[0][0] * (n[1][1] * n3[2] - n[1][2] * n3[1])
                     - n[0][1] * (n[1][0] * n3[2] - n[1][2] * n3[0])
                     + n[0][2] * (n[1][0] * n3[1] - n[1][1] * n3[0]))
            det_b = crank[0] * crank[1] * cp
            if abs(det_a) < cs[6] or abs(det_b) < cs[6]:
                flags |= SINGULAR
        return flags

    def tnt_matrix(self, azimuth, tilt, torsion):
        a = azimuth + self.g[32]
        gz = torsion - azimuth
        ca, sa = math.cos(a), math.sin(a)
        ct, st = math.cos(tilt), math.sin(tilt)
        cg, sg = math.cos(gz), math.sin(gz)
        return (ca * ct * cg - sa * sg, -ca * ct * sg - sa * cg, ca * st,
                sa * ct * cg + ca * sg, -sa * ct * sg + ca * cg, sa * st,
                -st * cg, st * sg, ct)

    def check_tnt(self, azimuth, tilt, torsion):
        """Failure bitmask for tilt-and-torsion angles relative to neutral."""
        return self.check(self.tnt_matrix(azimuth, tilt, torsion))

    def _check_polar(self, torsion, x, y):
        return self.check(self.tnt_matrix(math.atan2(y, x), math.hypot(x, y), torsion))

    def ray_boundary(self, torsion, cx, cy, alpha, step, max_radius, tol):
        """March from (cx, cy) along ``alpha`` in the polar embedding.

        Returns ``(radius, flags)``: the last feasible radius (bisected to
        ``tol``) and the failure mask just beyond it.  ``radius`` is -1 when
        the centre itself is infeasible.
        """
        ca, sa = math.cos(alpha), math.sin(alpha)
        f0 = self._check_polar(torsion, cx, cy)
        if f0:
            return -1.0, f0
        lo = 0.0
        hi = -1.0
        fl = 0
        while lo + step <= max_radius + 1e-15:
            r = lo + step
            f = self._check_polar(torsion, cx + r * ca, cy + r * sa)
            if f:
                hi = r
                fl = f
                break
            lo = r
        if hi < 0.0:
            if lo < max_radius:
                f = self._check_polar(torsion, cx + max_radius * ca, cy + max_radius * sa)
                if f == 0:
                    return max_radius, 0
                hi = max_radius
                fl = f
            else:
                return lo, 0
        while hi - lo > tol:
            m = 0.5 * (lo + hi)
            f = self._check_polar(torsion, cx + m * ca, cy + m * sa)
            if f:
                hi = m
                fl = f
            else:
                lo = m
        return lo, fl

    def ray_boundaries(self, torsion, cx, cy, alphas, step, max_radius, tol):
        return [self.ray_boundary(torsion, cx, cy, a, step, max_radius, tol) for a in alphas]
