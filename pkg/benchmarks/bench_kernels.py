"""Compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--grid-n 512] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from ampshare import _purepy

try:
    from ampshare import _kernels
except ImportError:
    _kernels = None


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid-n", type=int, default=512)
    ap.add_argument("--points", type=int, default=1_000_000, help="budgets for classify_many")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    gains = (10.0, 1.0, 1.0, 10.0)
    budgets = 10.0 ** (rng.uniform(-20, 40, size=(4, args.points)) / 10.0)

    cases = [
        (f"grid_search n={args.grid_n}", lambda m: m.grid_search(*gains, 1.0, 1.0, 1.0, args.grid_n)),
        (f"classify_many n={args.points}", lambda m: m.classify_many(*budgets)),
    ]
    backends = [("python", _purepy)]
    if _kernels is not None:
        backends.append(("cython", _kernels))
    else:
        print("compiled extension not built; timing the fallback only")

    print(f"{'case':<28}{'backend':<10}{'best (ms)':>12}{'speedup':>10}")
    for name, fn in cases:
        base = None
        for label, mod in backends:
            best = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)) * 1e3
            base = base or best
            print(f"{name:<28}{label:<10}{best:>12.2f}{base / best:>9.1f}x")


if __name__ == "__main__":
    main()
