# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled feasibility kernel; mirrors ``_pykernel`` exactly."""

from libc.math cimport atan2, acos, cos, sin, sqrt, hypot, fabs, remainder, M_PI

DEF EPS = 1e-14

cdef int UNREACH1 = 1
cdef int UNREACH2 = 2
cdef int CONE_B1 = 4
cdef int CONE_C1 = 16
cdef int SEGMENTS = 64
cdef int BASE1 = 128
cdef int SINGULAR = 512


cdef inline double _clamp01(double x) noexcept nogil:
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


cdef double _segdist(const double* p1, const double* q1,
                     const double* p2, const double* q2) noexcept nogil:
    cdef double d1[3]
    cdef double d2[3]
    cdef double r[3]
    cdef int j
    for j in range(3):
        d1[j] = q1[j] - p1[j]
        d2[j] = q2[j] - p2[j]
        r[j] = p1[j] - p2[j]
    cdef double a = d1[0] * d1[0] + d1[1] * d1[1] + d1[2] * d1[2]
    cdef double e = d2[0] * d2[0] + d2[1] * d2[1] + d2[2] * d2[2]
    cdef double f = d2[0] * r[0] + d2[1] * r[1] + d2[2] * r[2]
    cdef double s, t, b, c, denom, dx, dy, dz
    if a <= EPS and e <= EPS:
        s = 0.0
        t = 0.0
    elif a <= EPS:
        s = 0.0
        t = _clamp01(f / e)
    else:
        c = d1[0] * r[0] + d1[1] * r[1] + d1[2] * r[2]
        if e <= EPS:
            t = 0.0
            s = _clamp01(-c / a)
        else:
            b = d1[0] * d2[0] + d1[1] * d2[1] + d1[2] * d2[2]
            denom = a * e - b * b
            if denom > EPS * a * e:
                s = _clamp01((b * f - c * e) / denom)
            else:
                s = 0.0
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
    return sqrt(dx * dx + dy * dy + dz * dz)


def segment_distance(p1, q1, p2, q2):
    cdef double a[3]
    cdef double b[3]
    cdef double c[3]
    cdef double d[3]
    cdef int j
    for j in range(3):
        a[j] = p1[j]
        b[j] = q1[j]
        c[j] = p2[j]
        d[j] = q2[j]
    return _segdist(a, b, c, d)


cdef class FeasibilityKernel:
    cdef double g[35]
    cdef double cs[7]
    cdef public str backend

    def __init__(self, geometry, constraints):
        gl = [float(v) for v in geometry]
        cl = [float(v) for v in constraints]
        if len(gl) != 35 or len(cl) != 7:
            raise ValueError("geometry needs 35 values and constraints 7")
        cdef int j
        for j in range(35):
            self.g[j] = gl[j]
        for j in range(7):
            self.cs[j] = cl[j]
        self.backend = "cython"

    cdef int _leg(self, int k, const double* R, double* theta, double* b,
                  double* c, double* l) noexcept nogil:
        cdef int o = 3 * (k - 1)
        cdef const double* a = &self.g[o]
        cdef const double* u = &self.g[12 + o]
        cdef const double* w = &self.g[18 + o]
        cdef const double* cm = &self.g[24 + o]
        cdef double L = self.g[30]
        cdef double kk = self.g[31]
        cdef double mode = self.g[33 + k - 1]
        cdef double d[3]
        cdef double P, Q, E, rho, th, ct, st
        cdef int j
        for j in range(3):
            c[j] = R[3 * j] * cm[0] + R[3 * j + 1] * cm[1] + R[3 * j + 2] * cm[2]
            d[j] = c[j] - a[j]
        P = d[0] * u[0] + d[1] * u[1] + d[2] * u[2]
        Q = d[0] * w[0] + d[1] * w[1] + d[2] * w[2]
        E = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + L * L - kk * kk) / (2.0 * L)
        rho = hypot(P, Q)
        if rho < EPS or fabs(E) > rho:
            return 0
        th = atan2(Q, P) - mode * acos(E / rho)
        th = remainder(th, 2.0 * M_PI)
        ct = cos(th)
        st = sin(th)
        for j in range(3):
            l[j] = L * (ct * u[j] + st * w[j])
            b[j] = a[j] + l[j]
        theta[0] = th
        return 1

    cdef int _check(self, const double* R) noexcept nogil:
        cdef double th[2]
        cdef double b[2][3]
        cdef double c[2][3]
        cdef double l[2][3]
        cdef double r[3]
        cdef double axb[3]
        cdef double n[2][3]
        cdef double crank[2]
        cdef double n3[3]
        cdef const double* ax
        cdef double L = self.g[30]
        cdef double rn, cp, sp, cy, sy, det_a, det_b
        cdef int flags = 0
        cdef int k
        if not self._leg(1, R, &th[0], b[0], c[0], l[0]):
            flags |= UNREACH1
        if not self._leg(2, R, &th[1], b[1], c[1], l[1]):
            flags |= UNREACH2
        if flags:
            return flags
        for k in range(2):
            ax = &self.g[6 + 3 * k]
            r[0] = c[k][0] - b[k][0]
            r[1] = c[k][1] - b[k][1]
            r[2] = c[k][2] - b[k][2]
            rn = sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2])
            axb[0] = (ax[1] * l[k][2] - ax[2] * l[k][1]) / L
            axb[1] = (ax[2] * l[k][0] - ax[0] * l[k][2]) / L
            axb[2] = (ax[0] * l[k][1] - ax[1] * l[k][0]) / L
            if (r[0] * axb[0] + r[1] * axb[1] + r[2] * axb[2]) < self.cs[k] * rn:
                flags |= CONE_B1 << k
            if (r[0] * R[2] + r[1] * R[5] + r[2] * R[8]) < self.cs[2 + k] * rn:
                flags |= CONE_C1 << k
            if l[k][2] + self.cs[4] <= 0.0:
                flags |= BASE1 << k
            crank[k] = (l[k][1] * r[2] - l[k][2] * r[1]) * ax[0] \
                + (l[k][2] * r[0] - l[k][0] * r[2]) * ax[1] \
                + (l[k][0] * r[1] - l[k][1] * r[0]) * ax[2]
            n[k][0] = c[k][1] * r[2] - c[k][2] * r[1]
            n[k][1] = c[k][2] * r[0] - c[k][0] * r[2]
            n[k][2] = c[k][0] * r[1] - c[k][1] * r[0]
        if _segdist(b[0], c[0], b[1], c[1]) < self.cs[5]:
            flags |= SEGMENTS
        if self.cs[6] >= 0.0:
            cp = hypot(R[0], R[3])
            sp = -R[6]
            if cp > EPS:
                cy = R[0] / cp
                sy = R[3] / cp
            else:
                cy = 1.0
                sy = 0.0
            n3[0] = cy * sp
            n3[1] = sy * sp
            n3[2] = cp
            det_a = (n[0][0] * (n[1][1] * n3[2] - n[1][2] * n3[1])
                     - n[0][1] * (n[1][0] * n3[2] - n[1][2] * n3[0])
                     + n[0][2] * (n[1][0] * n3[1] - n[1][1] * n3[0]))
            det_b = crank[0] * crank[1] * cp
            if fabs(det_a) < self.cs[6] or fabs(det_b) < self.cs[6]:
                flags |= SINGULAR
        return flags

    cdef void _tnt(self, double azimuth, double tilt, double torsion, double* R) noexcept nogil:
        cdef double a = azimuth + self.g[32]
        cdef double gz = torsion - azimuth
        cdef double ca = cos(a), sa = sin(a)
        cdef double ct = cos(tilt), st = sin(tilt)
        cdef double cg = cos(gz), sg = sin(gz)
        R[0] = ca * ct * cg - sa * sg
        R[1] = -ca * ct * sg - sa * cg
        R[2] = ca * st
        R[3] = sa * ct * cg + ca * sg
        R[4] = -sa * ct * sg + ca * cg
        R[5] = sa * st
        R[6] = -st * cg
        R[7] = st * sg
        R[8] = ct

    cdef int _check_polar(self, double torsion, double x, double y) noexcept nogil:
        cdef double R[9]
        self._tnt(atan2(y, x), hypot(x, y), torsion, R)
        return self._check(R)

    cdef double _ray(self, double torsion, double cx, double cy, double alpha,
                     double step, double max_radius, double tol, int* flags_out) noexcept nogil:
        cdef double ca = cos(alpha), sa = sin(alpha)
        cdef double lo = 0.0, hi = -1.0, r, m
        cdef int f, fl = 0
        f = self._check_polar(torsion, cx, cy)
        if f:
            flags_out[0] = f
            return -1.0
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
                    flags_out[0] = 0
                    return max_radius
                hi = max_radius
                fl = f
            else:
                flags_out[0] = 0
                return lo
        while hi - lo > tol:
            m = 0.5 * (lo + hi)
            f = self._check_polar(torsion, cx + m * ca, cy + m * sa)
            if f:
                hi = m
                fl = f
            else:
                lo = m
        flags_out[0] = fl
        return lo

    def check(self, R):
        cdef double Rc[9]
        cdef int j
        for j in range(9):
            Rc[j] = R[j]
        return self._check(Rc)

    def tnt_matrix(self, double azimuth, double tilt, double torsion):
        cdef double R[9]
        self._tnt(azimuth, tilt, torsion, R)
        return tuple([R[j] for j in range(9)])

    def check_tnt(self, double azimuth, double tilt, double torsion):
        cdef double R[9]
        self._tnt(azimuth, tilt, torsion, R)
        return self._check(R)

    def ray_boundary(self, double torsion, double cx, double cy, double alpha,
                     double step, double max_radius, double tol):
        cdef int fl = 0
        cdef double r
        with nogil:
            r = self._ray(torsion, cx, cy, alpha, step, max_radius, tol, &fl)
        return r, fl

    def ray_boundaries(self, double torsion, double cx, double cy, alphas,
                       double step, double max_radius, double tol):
        return [self.ray_boundary(torsion, cx, cy, a, step, max_radius, tol) for a in alphas]
