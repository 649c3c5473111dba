"""Time the compiled and pure-Python kernels on the three hot loops.

    python benchmarks/bench_kernels.py [--repeat 3] [--scale 1.0]

Both backends consume the same noise, so the outputs are also compared
bitwise; a mismatch is reported next to the timings.
"""

import argparse
import time

import numpy as np

from volspec._backend import get_kernels
from volspec.garch import GarchSpec, simulate_garch
from volspec.noise import NoiseSource
from volspec.sde import SdeSpec, simulate_sde


def _best(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(scale):
    n_noise = int(2_000_000 * scale)
    n_garch = int(1_000_000 * scale)
    n_sde = int(500_000 * scale)
    fig1 = SdeSpec(eta=2.0, lam=3.0, x_min=1.0, x_max=1e3)
    fig3 = GarchSpec("power_odd", a=1e-6, b=1e-3, c=1.0, mu=3)
    return [
        (f"normals x{n_noise}",
         lambda k: NoiseSource(1, _kernels=k).normals(n_noise)),
        (f"garch power_odd x{n_garch}",
         lambda k: simulate_garch(fig3, 1, n=n_garch, burn_in=0, backend=k).values),
        (f"sde fig1 x{n_sde} outputs",
         lambda k: simulate_sde(fig1, 1, n_out=n_sde, dt_out=2.0**-12, burn_in=0,
                                backend=k).values),
    ]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--scale", type=float, default=1.0, help="multiply problem sizes")
    args = parser.parse_args(argv)
    try:
        fast = get_kernels("cython")
    except ImportError:
        fast = None
        print("compiled extension not built; timing the Python kernels only")
    slow = get_kernels("python")
    print(f"{'case':32s} {'cython [s]':>11s} {'python [s]':>11s} {'speedup':>8s}  equal")
    for name, fn in cases(args.scale):
        t_py, out_py = _best(lambda: fn(slow), args.repeat)
        if fast is None:
            print(f"{name:32s} {'-':>11s} {t_py:11.4f}")
            continue
        t_c, out_c = _best(lambda: fn(fast), args.repeat)
        same = np.array_equal(out_c, out_py)
        print(f"{name:32s} {t_c:11.4f} {t_py:11.4f} {t_py / t_c:8.1f}x  {same}")


if __name__ == "__main__":
    main()
