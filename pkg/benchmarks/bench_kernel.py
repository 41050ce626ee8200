"""Compare the compiled and pure-Python feasibility kernels.

    python3 benchmarks/bench_kernel.py [--n 20000] [--repeat 3]

Times single-pose checks, ray marching, and a full default workspace sweep
for each available backend.
"""

import argparse
import math
import time

import numpy as np

from eelwrist import kernel
from eelwrist.constraints import ConstraintParams
from eelwrist.mechanism import make_geometry
from eelwrist.workspace import SweepParams, sweep_workspace


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000, help="poses for the check benchmark")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    g = make_geometry()
    p = ConstraintParams()
    sp = SweepParams()
    rng = np.random.default_rng(1)
    poses = np.column_stack([rng.uniform(-math.pi, math.pi, args.n),
                             rng.uniform(0.0, 0.8, args.n),
                             rng.uniform(-0.5, 0.5, args.n)])
    alphas = np.linspace(0.0, 2.0 * math.pi, 72, endpoint=False)

    rows = []
    for name in kernel.available_backends():
        k = kernel.make_kernel(g, p, backend_name=name)
        mats = [k.tnt_matrix(*t) for t in poses]
        t_check = best_of(lambda: [k.check(m) for m in mats], args.repeat)
        t_ray = best_of(lambda: k.ray_boundaries(0.0, 0.0, 0.0, alphas, sp.tilt_step,
                                                 sp.max_tilt, sp.tol), args.repeat)
        t_sweep = best_of(lambda: sweep_workspace(g, p, sp, backend=name), args.repeat)
        rows.append((name, 1e6 * t_check / args.n, 1e3 * t_ray, t_sweep))

    print(f"{'backend':<8} {'check [us/pose]':>16} {'72 rays [ms]':>13} {'sweep [s]':>10}")
    for name, a, b, c in rows:
        print(f"{name:<8} {a:>16.2f} {b:>13.2f} {c:>10.3f}")
    if len(rows) == 2:
        py, cy = rows[0], rows[1]
        print(f"speed-up: check x{py[1] / cy[1]:.1f}, rays x{py[2] / cy[2]:.1f}, "
              f"sweep x{py[3] / cy[3]:.1f}")


if __name__ == "__main__":
    main()
