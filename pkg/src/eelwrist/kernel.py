"""Selects the feasibility kernel backend.

The compiled ``_ckernel`` is used when it was built; otherwise the pure-Python
``_pykernel`` takes over.  Both expose ``FeasibilityKernel`` with the same
methods and return values.
"""

from __future__ import annotations

import math

from . import _pykernel

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

FLAG_NAMES = {
    _pykernel.UNREACH1: "unreachable_leg1",
    _pykernel.UNREACH2: "unreachable_leg2",
    _pykernel.CONE_B1: "cone_B1",
    _pykernel.CONE_B2: "cone_B2",
    _pykernel.CONE_C1: "cone_C1",
    _pykernel.CONE_C2: "cone_C2",
    _pykernel.SEGMENTS: "segments",
    _pykernel.BASE1: "base1",
    _pykernel.BASE2: "base2",
    _pykernel.SINGULAR: "singular",
}

_backend = "cython" if _ckernel is not None else "python"


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _ckernel is not None else [])


def backend() -> str:
    return _backend


def use_backend(name: str) -> None:
    global _backend
    if name not in available_backends():
        raise ValueError(f"kernel backend {name!r} is not available")
    _backend = name


def flag_names(flags: int) -> list[str]:
    return [name for bit, name in FLAG_NAMES.items() if flags & bit]


def pack_geometry(g, mode=None) -> list[float]:
    mode = g.home.mode if mode is None else mode
    vals = []
    for v in (g.a1, g.a2, g.i1, g.i2, g.rod_home_dir1, g.rod_home_dir2, g.w1, g.w2,
              g.c1_mobile, g.c2_mobile):
        vals.extend(float(x) for x in v)
    vals.extend([g.rod_length, g.coupler_length, g.neutral_yaw, float(mode[0]), float(mode[1])])
    return vals


def pack_constraints(p) -> list[float]:
    lb1, lb2, lc1, lc2 = p.cone_limits
    margin = -1.0 if p.singularity_margin is None else float(p.singularity_margin)
    return [math.cos(lb1), math.cos(lb2), math.cos(lc1), math.cos(lc2),
            float(p.limd), float(p.clearance), margin]


def make_kernel(g, params, mode=None, backend_name: str | None = None):
    name = backend_name or _backend
    mod = _ckernel if name == "cython" else _pykernel
    if mod is None:
        raise ValueError("compiled kernel is not available")
    return mod.FeasibilityKernel(pack_geometry(g, mode), pack_constraints(params))
