"""Compiled kernels against the numpy fallback.

Times the hot kernels directly, then one end-to-end profile in two
subprocesses (``SHARPCONST_PURE_PYTHON`` unset / set), so the import-time
selection is exercised as well.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from sharpconst import _speedups_py as pure

try:
    from sharpconst import _speedups as compiled
except ImportError:
    compiled = None

END_TO_END = (
    "import time; from math import inf; from sharpconst.constants import A_profile;"
    "t=time.perf_counter(); A_profile(3, 2, inf, grid=21); A_profile(3, 1, 3, grid=21);"
    "print(time.perf_counter()-t)"
)


def kernel_cases(rng):
    c = rng.standard_normal(8)
    xs = rng.uniform(0, 1, 4096)
    w = rng.uniform(0, 1, 256)
    v = rng.standard_normal(256)
    x = rng.uniform(0, 1, 256)
    p = np.array([-0.3, 1.0, 0.0, 0.0, 0.0])  # root at 0.3
    return {
        "horner (4096 pts)": lambda m: m.horner(c, xs),
        "horner_scalar x 1000": lambda m: [m.horner_scalar(c, float(t)) for t in xs[:1000]],
        "bisect_root": lambda m: m.bisect_root(p, 0.0, 1.0, 1e-15),
        "power_moments (256 pts)": lambda m: m.power_moments(v, x, w, 6, 1.5, True),
    }


def end_to_end(pure_python: bool) -> float:
    env = dict(os.environ)
    env.pop("SHARPCONST_PURE_PYTHON", None)
    if pure_python:
        env["SHARPCONST_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", END_TO_END], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if compiled is None:
        print("compiled extension not built; only the fallback is available", file=sys.stderr)
    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} {'compiled':>12s} {'fallback':>12s} {'speedup':>8s}")
    for name, fn in kernel_cases(rng).items():
        tp = min(timeit.repeat(lambda: fn(pure), number=20, repeat=args.repeat)) / 20
        if compiled is not None:
            tc = min(timeit.repeat(lambda: fn(compiled), number=20, repeat=args.repeat)) / 20
            print(f"{name:28s} {tc * 1e6:10.1f}us {tp * 1e6:10.1f}us {tp / tc:7.1f}x")
        else:
            print(f"{name:28s} {'-':>12s} {tp * 1e6:10.1f}us")
    tc = end_to_end(False)
    tp = end_to_end(True)
    print(f"{'end-to-end profiles':28s} {tc:11.2f}s {tp:11.2f}s {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
