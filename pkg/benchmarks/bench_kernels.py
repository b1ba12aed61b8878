"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from fstruct import kernels
from fstruct.connection import cross_validate
from fstruct.library import builtin_f
from fstruct.registry import oriented_flags
from fstruct.scalars import MULT_TABLE


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(rng):
    A = rng.standard_normal((3, 3, 4))
    B = rng.standard_normal((3, 3, 4))
    T = rng.standard_normal((16, 16, 16))
    X = rng.standard_normal((200, 16))
    Y = rng.standard_normal((200, 16))

    def ring_small():
        for _ in range(2000):
            kernels.ring_matmul(A, B, MULT_TABLE["H"])

    def bilinear():
        for _ in range(200):
            kernels.bilinear_batch(T, X, Y)

    def sweep():
        # a fresh instance carries no cached structure constants
        cross_validate(builtin_f(oriented_flags(7), "f1"))

    return {"ring_matmul 3x3 H x2000": ring_small, "bilinear_batch 200x16 x200": bilinear,
            "cross_validate flags:7 f1 (cold)": sweep}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    available = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    if len(available) == 1:
        print("compiled extension not built; timing the numpy backend only")
    rng = np.random.default_rng(0)
    table = {}
    for name in available:
        prev = kernels.use_backend(name)
        try:
            for label, fn in cases(rng).items():
                table.setdefault(label, {})[name] = _time(fn, args.repeat)
        finally:
            kernels.use_backend(prev)
    print(f"{'case':36s}" + "".join(f"{b:>12s}" for b in available) + ("     speedup" if len(available) > 1 else ""))
    for label, row in table.items():
        line = f"{label:36s}" + "".join(f"{row[b] * 1e3:10.2f}ms" for b in available)
        if len(available) > 1:
            line += f"{row['python'] / row['cython']:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
