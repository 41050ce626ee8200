"""``eelwrist`` command line.

Angles are read and printed in degrees unless ``--radians`` is given.
Exit status: 0 success, 1 usage or configuration error, 2 domain error
(unreachable pose, singular configuration, and so on).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import warnings

from . import export
from .calibration import PUBLISHED, calibrate
from .config import RunConfig, load_config
from .constraints import pose_feasible
from .differential import condition_number, inverse_jacobian, jacobians, singularity_report
from .errors import ConfigError, SerialSingular, WristError
from .kinematics import (direct_kinematics, direct_kinematics_all, direct_kinematics_numeric,
                         inverse_kinematics, inverse_kinematics_all, parse_mode)
from .mechanism import DesignVariant, JointAngles, leg_points, make_geometry
from .orientation import GimbalLockWarning, orientation_to_rpy, rot_z, rpy_to_orientation
from .workspace import (SweepParams, check_design_targets, joint_space_cloud,
                        relative_orientation, sweep_workspace)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _triple(text: str) -> tuple[float, float, float]:
    try:
        vals = [eval_number(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return tuple(vals)


def _mode_text(text: str) -> str:
    """Working mode as two signs; ``p`` / ``m`` stand in for ``+`` / ``-``."""
    t = text.strip().lower().replace("p", "+").replace("m", "-")
    if len(t) != 2 or any(ch not in "+-" for ch in t):
        raise argparse.ArgumentTypeError(f"mode must be two of + - p m, got {text!r}")
    return t


class RadianValue(float):
    """A number written with ``pi``: always an angle in radians."""


def eval_number(text: str) -> float:
    """A float, optionally written with ``pi`` (``pi/4``, ``-pi``, ``2*pi/3``).

    Values containing ``pi`` come back as :class:`RadianValue`, so ``pi/4``
    means 45 degrees even when the command works in degrees.
    """
    t = text.strip().lower().replace("π", "pi")
    if "pi" not in t:
        return float(t)
    num, _, den = t.partition("/")
    coef = num.replace("pi", "").replace("*", "").strip()
    c = -1.0 if coef == "-" else (1.0 if coef in ("", "+") else float(coef))
    return RadianValue(c * math.pi / (float(den) if den else 1.0))


class _Units:
    def __init__(self, radians: bool):
        self.radians = radians

    def inp(self, v: float) -> float:
        if self.radians or isinstance(v, RadianValue):
            return float(v)
        return math.radians(v)

    def out(self, v: float) -> float:
        return float(v) if self.radians else math.degrees(v)

    @property
    def name(self) -> str:
        return "radians" if self.radians else "degrees"


def _cfg(args) -> RunConfig:
    cfg = load_config(args.config)
    if getattr(args, "variant", None):
        # stock geometry of the named variant replaces the configured one
        g = make_geometry(args.variant)
        cfg = RunConfig(g, cfg.constraints, cfg.sweep, cfg.units, cfg.output_format)
    return cfg


def _rpy_out(u: _Units, o) -> list[float]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GimbalLockWarning)
        return [u.out(v) for v in orientation_to_rpy(o)]


def _orientation_arg(args, u: _Units, g):
    rpy = [u.inp(v) for v in args.rpy]
    o = rpy_to_orientation(rpy)
    return rot_z(g.neutral_yaw) @ o if args.relative else o


def _emit(text: str, out_path=None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- subcommands -----------------------------------------------------------------

def cmd_fk(args, u):
    g = _cfg(args).geometry
    q = JointAngles(*[u.inp(v) for v in args.q])
    doc = {"command": "fk", "units": u.name, "variant": g.variant.value,
           "q": [u.out(v) for v in q]}
    if g.variant is not DesignVariant.PARALLEL_ACTUATORS:
        o = direct_kinematics_numeric(g, q, g.home.orientation)
        doc["solution"] = {"rpy": _rpy_out(u, o), "method": "numeric",
                           "matrix": o.tolist()}
    elif args.all:
        doc["solutions"] = [
            {"branch": s.branch, "roll_sign": s.roll_sign, "rpy": _rpy_out(u, s.orientation),
             "pitch": u.out(s.pitch), "roll": u.out(s.roll),
             "r2_dot_p2": s.coupler_dot, "selector": s.coupler_term,
             "residuals": list(s.residuals), "matrix": s.orientation.tolist()}
            for s in direct_kinematics_all(g, q)
        ]
        doc["count"] = len(doc["solutions"])
    else:
        o = direct_kinematics(g, q)
        doc["solution"] = {"rpy": _rpy_out(u, o), "matrix": o.tolist()}
    _emit(export.dumps(doc))


def cmd_ik(args, u):
    g = _cfg(args).geometry
    o = _orientation_arg(args, u, g)
    doc = {"command": "ik", "units": u.name, "variant": g.variant.value,
           "rpy": [u.out(u.inp(v)) for v in args.rpy]}
    if args.all:
        doc["solutions"] = [
            {"mode": "".join("+" if m > 0 else "-" if m < 0 else "0" for m in s.mode),
             "q": [u.out(v) for v in s.q], "crank_terms": list(s.crank_terms),
             "l_dot_r": list(s.lr_dots), "residuals": list(s.residuals),
             "double_root": list(s.double)}
            for s in inverse_kinematics_all(g, o)
        ]
        doc["count"] = len(doc["solutions"])
    else:
        if args.mode == []:  # argparse swallows a bare "--" value
            raise UsageError("eelwrist ik: error: write the mode -- as mm")
        mode = parse_mode(args.mode) if args.mode else None
        q = inverse_kinematics(g, o, mode)
        doc["q"] = [u.out(v) for v in q]
    _emit(export.dumps(doc))


def _state(args, u, g):
    if args.q is not None:
        q = JointAngles(*[u.inp(v) for v in args.q])
        if args.rpy is not None:
            o = _orientation_arg(args, u, g)
        elif g.variant is DesignVariant.PARALLEL_ACTUATORS:
            o = direct_kinematics(g, q)
        else:
            o = direct_kinematics_numeric(g, q, g.home.orientation)
    elif args.rpy is not None:
        o = _orientation_arg(args, u, g)
        q = inverse_kinematics(g, o)
    else:
        q, o = g.home.q, g.home.orientation
    return leg_points(g, q, o)


def cmd_jac(args, u):
    g = _cfg(args).geometry
    st = _state(args, u, g)
    jp = jacobians(st)
    rep = singularity_report(st, args.eps)
    try:
        jinv = inverse_jacobian(st, args.eps).tolist()
    except SerialSingular:
        jinv = None
    doc = {"command": "jac", "variant": g.variant.value, "q": [u.out(v) for v in st.q],
           "rpy": _rpy_out(u, st.orientation), "A": jp.A.tolist(), "B": jp.B.tolist(),
           "J_inv": jinv, "detA": jp.detA, "detB": jp.detB,
           "kappa_A": condition_number(jp.A), "kappa_B": condition_number(jp.B),
           "singularity": rep.kind, "witnesses": list(rep.witnesses)}
    _emit(export.dumps(doc))


def cmd_check(args, u):
    cfg = _cfg(args)
    g = cfg.geometry
    o = _orientation_arg(args, u, g)
    rep = pose_feasible(g, o, cfg.constraints)
    doc = {"command": "check", "rpy": [u.out(u.inp(v)) for v in args.rpy], "feasible": rep.feasible,
           "failed": list(rep.failed),
           "q": [u.out(v) for v in rep.q] if rep.q is not None else None,
           "cone_angles": {k: u.out(v) for k, v in zip(("B1", "B2", "C1", "C2"), rep.cone_angles)},
           "seg_distance": rep.seg_distance, "base_margins": list(rep.base_margins)}
    _emit(export.dumps(doc))


def cmd_singular_scan(args, u):
    g = _cfg(args).geometry
    tor = u.inp(args.torsion)
    tmax = u.inp(args.max_tilt)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["torsion", "azimuth", "tilt", "detA", "detB"])
    for i in range(args.n_az):
        az = -math.pi + 2.0 * math.pi * i / args.n_az
        for j in range(args.n_tilt + 1):
            ti = tmax * j / args.n_tilt
            o = relative_orientation(g, az, ti, tor)
            try:
                q = inverse_kinematics(g, o)
            except WristError:
                da = db = math.nan
            else:
                jp = jacobians(leg_points(g, q, o))
                da, db = jp.detA, jp.detB
            w.writerow([export.fmt(u.out(tor)), export.fmt(u.out(az)), export.fmt(u.out(ti)),
                        export.fmt(da), export.fmt(db)])
    _emit(buf.getvalue(), args.out)


def _sweep(args, cfg):
    sp = cfg.sweep
    over = {}
    for k in ("n_psi", "n_phi"):
        if getattr(args, k, None) is not None:
            over[k] = getattr(args, k)
    if over:
        sp = SweepParams(**{**sp.__dict__, **over})
    return sweep_workspace(cfg.geometry, cfg.constraints, sp, threads=args.threads)


def _summary(wmap, u) -> str:
    lo, hi = wmap.torsion_extent
    parts = [f"torsion extent: [{export.fmt(u.out(lo))}, {export.fmt(u.out(hi))}]"]
    for k, (a, b) in wmap.joint_extents.items():
        parts.append(f"{k} extent: [{export.fmt(u.out(a))}, {export.fmt(u.out(b))}]")
    parts.append(f"slices: {len(wmap.slices)}  star violations: {wmap.star_violations}")
    return "\n".join(parts) + "\n"


def cmd_workspace(args, u):
    cfg = _cfg(args)
    wmap = _sweep(args, cfg)
    fmt = args.format or cfg.output_format
    writers = {"csv": export.to_csv, "json": export.to_json, "obj": export.to_obj}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, f"workspace.{fmt}"), "w") as fh:
            fh.write(writers[fmt](wmap))
        if args.jointspace:
            with open(os.path.join(args.out, "jointspace.csv"), "w") as fh:
                fh.write(export.joint_cloud_csv(joint_space_cloud(wmap, args.offset)))
        sys.stdout.write(_summary(wmap, u))
    else:
        sys.stdout.write(writers[fmt](wmap))
        sys.stderr.write(_summary(wmap, u))


def cmd_jointspace(args, u):
    cfg = _cfg(args)
    wmap = _sweep(args, cfg)
    _emit(export.joint_cloud_csv(joint_space_cloud(wmap, args.offset)), args.out)


def cmd_targets(args, u):
    cfg = _cfg(args)
    rep = check_design_targets(cfg.geometry, cfg.constraints, u.inp(args.yaw),
                               u.inp(args.pitch), u.inp(args.roll), args.grid)
    doc = {
        "command": "targets",
        "targets": {"yaw": args.yaw, "pitch": args.pitch, "roll": args.roll},
        "samples": rep.n_samples, "feasible": rep.n_feasible,
        "fraction": rep.fraction, "percent": 100.0 * rep.fraction,
        "failure_counts": rep.failure_counts,
        "worst": None if rep.worst is None else
        {"rpy": [u.out(v) for v in rep.worst[0]], "failed": list(rep.worst[1])},
        "corners": [{"rpy": [u.out(v) for v in c], "failed": list(f)} for c, f in rep.corners],
    }
    _emit(export.dumps(doc))


def cmd_calibrate(args, u):
    cfg = _cfg(args)
    cands = calibrate(cfg.geometry)
    best = cands[0]
    doc = {
        "command": "calibrate",
        "published": {k: list(v) for k, v in PUBLISHED.items()},
        "best": {"lima": u.out(best.lima_b), "lima_c": u.out(best.lima_c), "limd": best.limd,
                 "ranges_deg": {k: list(v) for k, v in best.ranges.items()},
                 "ends_within_tolerance": best.hits, "worst_deviation_deg": best.worst},
        "ranking": [{"lima": u.out(c.lima_b), "lima_c": u.out(c.lima_c), "limd": c.limd,
                     "hits": c.hits, "hit_error_deg": c.hit_error,
                     "total_error_deg": c.total_error, "worst_deg": c.worst}
                    for c in cands[:args.top]],
    }
    _emit(export.dumps(doc))


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="run configuration JSON (default: shipped defaults)")
    common.add_argument("--variant", help="design variant (overrides the config)")
    common.add_argument("--radians", action="store_true", help="angles in radians, not degrees")
    pose = _Parser(add_help=False)
    pose.add_argument("--relative", action="store_true",
                      help="interpret --rpy relative to the neutral attitude")

    p = _Parser(prog="eelwrist", description="Kinematics of a 3-DOF spherical parallel wrist.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("fk", parents=[common], help="direct kinematics")
    s.add_argument("--q", type=_triple, required=True, help="t1,t2,t3")
    s.add_argument("--all", action="store_true", help="list every assembly branch")
    s.set_defaults(func=cmd_fk)

    s = sub.add_parser("ik", parents=[common, pose], help="inverse kinematics")
    s.add_argument("--rpy", type=_triple, required=True, help="yaw,pitch,roll")
    s.add_argument("--all", action="store_true", help="list every working mode")
    s.add_argument("--mode", type=_mode_text,
                   help="working mode such as ++, +- or pm (write -- as mm)")
    s.set_defaults(func=cmd_ik)

    s = sub.add_parser("jac", parents=[common, pose], help="Jacobians and singularity")
    s.add_argument("--q", type=_triple)
    s.add_argument("--rpy", type=_triple)
    s.add_argument("--eps", type=float, default=1e-8)
    s.set_defaults(func=cmd_jac)

    s = sub.add_parser("check", parents=[common, pose], help="constraint report for a pose")
    s.add_argument("--rpy", type=_triple, required=True)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("singular-scan", parents=[common], help="det A / det B over a slice (CSV)")
    s.add_argument("--torsion", type=float, default=0.0)
    s.add_argument("--max-tilt", type=float, default=60.0)
    s.add_argument("--n-az", type=int, default=36)
    s.add_argument("--n-tilt", type=int, default=30)
    s.add_argument("--out")
    s.set_defaults(func=cmd_singular_scan)

    sweep = _Parser(add_help=False)
    sweep.add_argument("--threads", type=int, default=1, help="ray threads (1 = serial)")
    sweep.add_argument("--n-psi", type=int)
    sweep.add_argument("--n-phi", type=int)
    sweep.add_argument("--offset", type=float, default=0.0,
                       help="inward offset of the joint-space cloud (radians)")

    s = sub.add_parser("workspace", parents=[common, sweep], help="sweep and export the workspace")
    s.add_argument("--out", help="output directory (default: stdout)")
    s.add_argument("--format", choices=["csv", "json", "obj"])
    s.add_argument("--jointspace", action="store_true", help="also write jointspace.csv")
    s.set_defaults(func=cmd_workspace)

    s = sub.add_parser("jointspace", parents=[common, sweep], help="joint-space boundary cloud")
    s.add_argument("--out")
    s.set_defaults(func=cmd_jointspace)

    s = sub.add_parser("targets", parents=[common], help="check the yaw/pitch/roll design box")
    s.add_argument("--yaw", type=float, default=30.0)
    s.add_argument("--pitch", type=float, default=15.0)
    s.add_argument("--roll", type=float, default=4.0)
    s.add_argument("--grid", type=int, default=11)
    s.set_defaults(func=cmd_targets)

    s = sub.add_parser("calibrate", parents=[common], help="refit lima / limd to published ranges")
    s.add_argument("--top", type=int, default=10)
    s.set_defaults(func=cmd_calibrate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "threads", 1) < 1:
            raise UsageError("eelwrist: error: --threads must be >= 1")
        u = _Units(args.radians)
        args.func(args, u)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    except ConfigError as exc:
        sys.stderr.write(f"eelwrist: config error: {exc}\n")
        return 1
    except WristError as exc:
        sys.stderr.write(f"eelwrist: {type(exc).__name__}: {exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
