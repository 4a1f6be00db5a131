"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 200] [--cases 100]

Prints per-kernel timings for both backends at several grid sizes, then the
wall time of the fuzz suite with each backend selected at import.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from stefbound._core import _pykernels

try:
    from stefbound._core import _ckernels
except ImportError:
    _ckernels = None


def kernel_calls(mod, n):
    x = np.linspace(0.0, 1.0, n + 1)
    y = np.sin(3 * x)
    ym = np.sin(3 * (x[:-1] + 0.5 / n))
    return {
        "simpson": lambda: mod.simpson(y, 1.0 / n),
        "trapezoid": lambda: mod.trapezoid(x, y),
        "cellwise_simpson": lambda: mod.cellwise_simpson(x, y, ym),
        "cumulative_simpson": lambda: mod.cumulative_simpson(x, y, ym),
        "rs_sum": lambda: mod.rs_sum(ym, y),
        "variation": lambda: mod.variation(y),
        "max_slope": lambda: mod.max_slope(x, y),
    }


def bench_kernels(repeat):
    print(f"{'kernel':<20}{'n':>8}{'python us':>12}{'cython us':>12}{'speedup':>9}")
    for n in (64, 1024, 16384, 65536):
        py = kernel_calls(_pykernels, n)
        cy = kernel_calls(_ckernels, n) if _ckernels else {}
        for name, call in py.items():
            t_py = min(timeit.repeat(call, number=1, repeat=repeat)) * 1e6
            if name in cy:
                t_cy = min(timeit.repeat(cy[name], number=1, repeat=repeat)) * 1e6
                print(f"{name:<20}{n:>8}{t_py:>12.1f}{t_cy:>12.1f}{t_py / t_cy:>9.2f}")
            else:
                print(f"{name:<20}{n:>8}{t_py:>12.1f}{'-':>12}{'-':>9}")


def bench_suite(cases):
    code = (
        "import time; from stefbound import BACKEND; from stefbound.suite import RunConfig, run_suite;"
        f"t = time.perf_counter(); s = run_suite(RunConfig(cases={cases}));"
        "print(BACKEND, round(time.perf_counter() - t, 2), s.passed)"
    )
    for pure in (False, True):
        env = dict(os.environ)
        env.pop("STEFBOUND_PURE_PYTHON", None)
        if pure:
            env["STEFBOUND_PURE_PYTHON"] = "1"
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
        backend, seconds, passed = out.stdout.split()
        print(f"suite ({cases} cases) backend={backend:<7} {seconds:>7} s  passed={passed}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--cases", type=int, default=100)
    args = ap.parse_args()
    bench_kernels(args.repeat)
    bench_suite(args.cases)
