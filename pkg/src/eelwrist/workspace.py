"""Collision-free orientation workspace in tilt-and-torsion coordinates.

Each torsion slice is a region of the polar plane ``x = tilt cos(azimuth)``,
``y = tilt sin(azimuth)``.  Its boundary is found by marching rays outward
from the previous slice's centroid, then refining by bisection.  The upper
pass walks torsion upwards from zero, the lower pass downwards, each stopping
when the centre turns infeasible or the slice shrinks to a point.

Orientations are taken relative to the neutral attitude of the wrist:
``R = Rz(neutral_yaw) Rz(az) Ry(tilt) Rz(tor - az)``.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import kernel as _kernel
from .constraints import ConstraintParams, pose_feasible
from .errors import CenterInfeasible, ConfigError, DegenerateSlice, EmptyWorkspace
from .kinematics import inverse_kinematics
from .mechanism import JointAngles, MechanismGeometry
from .orientation import rot_z, rpy_to_orientation, tnt_to_orientation

log = logging.getLogger(__name__)

STAR_FRACTIONS = (0.25, 0.5, 0.75)


@dataclass(frozen=True)
class SweepParams:
    n_psi: int = 40
    n_phi: int = 72
    tilt_step: float = math.radians(0.5)
    max_tilt: float = math.radians(90.0)
    centroid_method: str = "area"
    validate: bool = True

    def __post_init__(self):
        if self.n_psi < 2 or self.n_psi % 2:
            raise ConfigError("n_psi must be an even integer >= 2")
        if self.n_phi < 3:
            raise ConfigError("n_phi must be >= 3")
        if not (0.0 < self.tilt_step <= self.max_tilt <= math.pi):
            raise ConfigError("need 0 < tilt_step <= max_tilt <= pi")
        if self.centroid_method not in ("area", "vertex"):
            raise ConfigError("centroid_method must be 'area' or 'vertex'")

    @property
    def psi_step(self) -> float:
        return 2.0 * math.pi / self.n_psi

    @property
    def tol(self) -> float:
        return self.tilt_step / 100.0


@dataclass
class WorkspaceSlice:
    torsion: float
    boundary: np.ndarray  # (n_phi, 2): azimuth, tilt
    centre: tuple  # ray origin (x, y)
    radii: np.ndarray  # ray lengths from the centre
    centroid: tuple  # (azimuth_c, tilt_c) of this slice
    joint_at_boundary: np.ndarray  # (n_phi, 3), absolute joint angles
    failed: list = field(default_factory=list)  # constraint names just past each ray
    star_violations: int = 0

    @property
    def xy(self) -> np.ndarray:
        az, ti = self.boundary[:, 0], self.boundary[:, 1]
        return np.column_stack([ti * np.cos(az), ti * np.sin(az)])

    @property
    def area(self) -> float:
        return polygon_area(self.xy)

    @property
    def max_radius(self) -> float:
        return float(np.max(self.radii))


@dataclass
class WorkspaceMap:
    upper: list
    lower: list
    params: SweepParams
    neutral_yaw: float = 0.0
    backend: str = "python"

    @property
    def slices(self) -> list:
        """All slices in increasing torsion."""
        return list(reversed(self.lower)) + list(self.upper)

    @property
    def torsion_extent(self) -> tuple[float, float]:
        t = [s.torsion for s in self.slices]
        return (min(t), max(t))

    @property
    def joint_extents(self) -> dict:
        """Min/max per joint over all boundary samples; t3 measured from neutral yaw."""
        q = np.vstack([s.joint_at_boundary for s in self.slices])
        q = q.copy()
        q[:, 2] = np.vectorize(_wrap)(q[:, 2] - self.neutral_yaw)
        return {f"t{k + 1}": (float(q[:, k].min()), float(q[:, k].max())) for k in range(3)}

    @property
    def star_violations(self) -> int:
        return sum(s.star_violations for s in self.slices)


def _wrap(a):
    return math.remainder(a, 2.0 * math.pi)


# --- geometry of the polar plane ---------------------------------------------

def polygon_area(xy) -> float:
    x, y = np.asarray(xy, dtype=float).T
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


def polygon_centroid(xy, method: str = "area") -> tuple[float, float]:
    pts = np.asarray(xy, dtype=float)
    if method == "vertex" or len(np.unique(np.round(pts, 12), axis=0)) < 3:
        c = pts.mean(axis=0)
        return float(c[0]), float(c[1])
    x, y = pts.T
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    a = 0.5 * cr.sum()
    if abs(a) < 1e-300:
        c = pts.mean(axis=0)
        return float(c[0]), float(c[1])
    return float(((x + xn) * cr).sum() / (6.0 * a)), float(((y + yn) * cr).sum() / (6.0 * a))


def slice_centroid(slice_or_boundary, method: str = "area") -> tuple[float, float]:
    """Centroid ``(azimuth_c, tilt_c)`` of a slice in the polar embedding."""
    b = slice_or_boundary.boundary if isinstance(slice_or_boundary, WorkspaceSlice) \
        else np.asarray(slice_or_boundary, dtype=float)
    xy = np.column_stack([b[:, 1] * np.cos(b[:, 0]), b[:, 1] * np.sin(b[:, 0])])
    uniq = np.unique(np.round(xy, 12), axis=0)
    if len(uniq) < 3:
        raise DegenerateSlice("fewer than three distinct boundary points")
    cx, cy = polygon_centroid(xy, method)
    return _polar(cx, cy)


def _polar(x, y) -> tuple[float, float]:
    t = math.hypot(x, y)
    return (math.atan2(y, x) if t > 0.0 else 0.0, t)


def relative_orientation(g: MechanismGeometry, azimuth, tilt, torsion) -> np.ndarray:
    return rot_z(g.neutral_yaw) @ tnt_to_orientation((azimuth, tilt, torsion))


# --- single ray (reference path) ---------------------------------------------

@dataclass(frozen=True)
class RayResult:
    azimuth: float
    tilt: float
    radius: float
    joints: JointAngles
    failed: tuple


def march(predicate, step: float, max_radius: float, tol: float) -> tuple[float, float | None]:
    """Largest feasible radius along a ray, and the first infeasible one.

    ``predicate(r)`` is true when the point at radius ``r`` is feasible.
    Marches in ``step`` increments then bisects to ``tol``.
    """
    lo, hi = 0.0, None
    while lo + step <= max_radius + 1e-15:
        if not predicate(lo + step):
            hi = lo + step
            break
        lo += step
    if hi is None:
        if lo >= max_radius or predicate(max_radius):
            return (max_radius if lo < max_radius else lo), None
        hi = max_radius
    while hi - lo > tol:
        m = 0.5 * (lo + hi)
        if predicate(m):
            lo = m
        else:
            hi = m
    return lo, hi


def boundary_ray(g: MechanismGeometry, params: ConstraintParams, torsion: float, centre,
                 azimuth_ray: float, sweep: SweepParams | None = None) -> RayResult:
    """Boundary along one ray, using :func:`pose_feasible` as the predicate.

    ``centre`` is ``(azimuth_c, tilt_c)``.  Slower than the kernel path used by
    :func:`sweep_workspace`, which it mirrors.
    """
    sweep = sweep or SweepParams()
    cx = centre[1] * math.cos(centre[0])
    cy = centre[1] * math.sin(centre[0])
    ca, sa = math.cos(azimuth_ray), math.sin(azimuth_ray)

    def at(r):
        az, ti = _polar(cx + r * ca, cy + r * sa)
        return az, ti, pose_feasible(g, relative_orientation(g, az, ti, torsion), params)

    if not at(0.0)[2].feasible:
        raise CenterInfeasible(f"centre infeasible at torsion {math.degrees(torsion):.3f} deg")
    lo, hi = march(lambda r: at(r)[2].feasible, sweep.tilt_step, sweep.max_tilt, sweep.tol)
    az, ti, rep = at(lo)
    failed = at(hi)[2].failed if hi is not None else ()
    return RayResult(az, ti, lo, rep.q, failed)


# --- sweep ---------------------------------------------------------------------

def _slice(g, kern, sweep, torsion, centre, pool) -> WorkspaceSlice | None:
    cx, cy = centre
    if kern.check_tnt(*_polar(cx, cy), torsion):
        return None
    alphas = [2.0 * math.pi * j / sweep.n_phi for j in range(sweep.n_phi)]

    def ray(a):
        return kern.ray_boundary(torsion, cx, cy, a, sweep.tilt_step, sweep.max_tilt, sweep.tol)

    res = list(pool.map(ray, alphas)) if pool is not None else [ray(a) for a in alphas]
    radii = np.array([r for r, _ in res])
    pts = np.column_stack([cx + radii * np.cos(alphas), cy + radii * np.sin(alphas)])
    boundary = np.array([_polar(x, y) for x, y in pts])
    joints = np.array([inverse_kinematics(g, relative_orientation(g, az, ti, torsion))
                       for az, ti in boundary])
    violations = 0
    if sweep.validate:
        for a, r in zip(alphas, radii):
            for f in STAR_FRACTIONS:
                x, y = cx + f * r * math.cos(a), cy + f * r * math.sin(a)
                if kern.check_tnt(*_polar(x, y), torsion):
                    violations += 1
        if violations:
            log.warning("torsion %.3f deg: %d interior samples infeasible (slice not star-shaped)",
                        math.degrees(torsion), violations)
    s = WorkspaceSlice(torsion, boundary, (cx, cy), radii, (0.0, 0.0), joints,
                       [_kernel.flag_names(f) for _, f in res], violations)
    try:
        s.centroid = slice_centroid(s, sweep.centroid_method)
    except DegenerateSlice:
        s.centroid = _polar(cx, cy)
    return s


def sweep_workspace(g: MechanismGeometry, cparams: ConstraintParams | None = None,
                    sparams: SweepParams | None = None, threads: int = 1,
                    backend: str | None = None) -> WorkspaceMap:
    """Torsion-sliced boundary sweep with centroid chaining.

    ``threads`` > 1 spreads the rays of each slice over a thread pool (the
    compiled kernel releases the GIL); results are merged by ray index, so
    the map does not depend on the thread count.
    """
    cparams = cparams or ConstraintParams()
    sparams = sparams or SweepParams()
    kern = _kernel.make_kernel(g, cparams, backend_name=backend)
    step = sparams.psi_step
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        first = _slice(g, kern, sparams, 0.0, (0.0, 0.0), pool)
        if first is None:
            raise CenterInfeasible("neutral orientation is infeasible")
        if first.max_radius <= 0.0:
            raise EmptyWorkspace("workspace reduces to the neutral orientation")

        def run(direction):
            out = []
            prev = first
            i = 1
            while True:
                tor = direction * i * step
                if abs(tor) > math.pi + 1e-12 or prev.max_radius < sparams.tilt_step:
                    break
                az, ti = prev.centroid
                s = _slice(g, kern, sparams, tor, (ti * math.cos(az), ti * math.sin(az)), pool)
                if s is None:
                    break
                out.append(s)
                prev = s
                i += 1
            return out

        upper = [first] + run(+1)
        lower = run(-1)
    finally:
        if pool is not None:
            pool.shutdown()
    return WorkspaceMap(upper, lower, sparams, g.neutral_yaw, kern.backend)


def torsion_limit(g, cparams=None, direction=1, tol=1e-6, kern=None) -> float:
    """Largest torsion (signed by ``direction``) with the neutral tilt feasible."""
    kern = kern or _kernel.make_kernel(g, cparams or ConstraintParams())
    lo, hi = march(lambda t: kern.check_tnt(0.0, 0.0, direction * t) == 0,
                   math.radians(0.5), math.pi, tol)
    return direction * lo


# --- exports of the map ------------------------------------------------------------

def embed_polar(wmap: WorkspaceMap) -> np.ndarray:
    """(n_slices, n_phi, 3) array of ``(tilt cos az, tilt sin az, z)``.

    Rows run from the highest torsion down, so ``z_i = psi_max - i * step``
    (``i`` from zero) reproduces each slice's torsion.
    """
    rows = sorted(wmap.slices, key=lambda s: -s.torsion)
    psi_max = rows[0].torsion
    out = np.empty((len(rows), wmap.params.n_phi, 3))
    for i, s in enumerate(rows):
        az, ti = s.boundary[:, 0], s.boundary[:, 1]
        out[i, :, 0] = ti * np.cos(az)
        out[i, :, 1] = ti * np.sin(az)
        out[i, :, 2] = psi_max - i * wmap.params.psi_step
    return out


def joint_space_cloud(wmap: WorkspaceMap, offset: float = 0.0) -> list[JointAngles]:
    """Boundary joint triples of every slice, optionally pulled inward.

    With ``offset`` each point moves by that distance (radians in joint
    space) against the outward normal estimated from its neighbours along
    the slice and across slices.
    """
    rows = wmap.slices
    grid = np.array([s.joint_at_boundary for s in rows])  # (S, n, 3)
    if offset == 0.0:
        return [JointAngles(*map(float, q)) for q in grid.reshape(-1, 3)]
    S, n, _ = grid.shape
    out = np.empty_like(grid)
    for i in range(S):
        centre = grid[i].mean(axis=0)
        for j in range(n):
            p = grid[i, j]
            t_ray = grid[i, (j + 1) % n] - grid[i, (j - 1) % n]
            t_sl = grid[min(i + 1, S - 1), j] - grid[max(i - 1, 0), j]
            nrm = np.cross(t_ray, t_sl)
            radial = p - centre
            if np.linalg.norm(nrm) < 1e-12:
                nrm = radial - (radial @ t_ray) / max(t_ray @ t_ray, 1e-300) * t_ray
            if nrm @ radial < 0.0:
                nrm = -nrm
            norm = np.linalg.norm(nrm)
            out[i, j] = p - offset * nrm / norm if norm > 1e-15 else p
    return [JointAngles(*map(float, q)) for q in out.reshape(-1, 3)]


# --- design targets ------------------------------------------------------------

@dataclass(frozen=True)
class TargetReport:
    targets: tuple
    n_samples: int
    n_feasible: int
    failure_counts: dict
    corners: tuple  # ((yaw, pitch, roll), failed) for each box corner
    worst: tuple | None  # ((yaw, pitch, roll), failed) or None

    @property
    def fraction(self) -> float:
        return self.n_feasible / self.n_samples


def check_design_targets(g: MechanismGeometry, cparams: ConstraintParams | None,
                         yaw: float, pitch: float, roll: float, n: int = 11) -> TargetReport:
    """Feasibility over the RPY box ``[-yaw, yaw] x [-pitch, pitch] x [-roll, roll]``.

    Angles are relative to the neutral attitude.  ``worst`` is the failing
    sample with the most violated constraints, ties broken by distance from
    the box centre.
    """
    if min(yaw, pitch, roll) < 0.0:
        raise ValueError("target half-ranges must be non-negative")
    cparams = cparams or ConstraintParams()
    axes = [np.unique(np.linspace(-h, h, n)) if h > 0.0 else np.array([0.0])
            for h in (yaw, pitch, roll)]
    half = np.array([max(yaw, 1e-300), max(pitch, 1e-300), max(roll, 1e-300)])
    neutral = rot_z(g.neutral_yaw)
    counts: dict = {}
    nfeas, total = 0, 0
    worst, worst_key = None, None
    for y, p, r in product(*axes):
        rep = pose_feasible(g, neutral @ rpy_to_orientation((y, p, r)), cparams)
        total += 1
        if rep.feasible:
            nfeas += 1
            continue
        for name in rep.failed:
            counts[name] = counts.get(name, 0) + 1
        key = (len(rep.failed), float(np.max(np.abs([y, p, r]) / half)))
        if worst_key is None or key > worst_key:
            worst_key, worst = key, ((float(y), float(p), float(r)), rep.failed)
    corners = []
    for sy, sp, sr in product((-1, 1), repeat=3):
        c = (sy * yaw, sp * pitch, sr * roll)
        corners.append((c, pose_feasible(g, neutral @ rpy_to_orientation(c), cparams).failed))
    return TargetReport((yaw, pitch, roll), total, nfeas, dict(sorted(counts.items())),
                        tuple(corners), worst)
