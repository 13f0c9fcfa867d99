"""Compare the compiled wiring enumeration with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from losr.kernels import wiring_count
from losr.kernels._wiring_py import best_response_enumeration as py_enum

try:
    from losr.kernels._wiring import best_response_enumeration as cy_enum
except ImportError:
    cy_enum = None

# (target payoff shape, source box shape)
CASES = [
    ((2, 2, 2, 2), (2, 2, 2, 2)),
    ((2, 2, 3, 3), (2, 2, 2, 2)),
    ((2, 2, 2, 2), (3, 3, 3, 3)),
    ((3, 3, 2, 2), (3, 3, 2, 2)),
    ((2, 2, 4, 4), (2, 2, 2, 2)),
    ((3, 3, 3, 3), (2, 2, 2, 2)),
]


def bench(fn, F, P, repeat: int) -> float:
    return min(timeit.repeat(lambda: fn(F, P), number=1, repeat=repeat))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'payoff':>14} {'box':>14} {'wirings A':>10} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for fs, ps in CASES:
        F, P = rng.normal(size=fs), rng.random(ps)
        t_py = bench(py_enum, F, P, args.repeat)
        if cy_enum is None:
            t_cy, speed = float("nan"), "n/a"
        else:
            t_cy = bench(cy_enum, F, P, args.repeat)
            assert abs(cy_enum(F, P)[0] - py_enum(F, P)[0]) < 1e-9
            speed = f"{t_py / t_cy:.1f}x"
        print(f"{str(fs):>14} {str(ps):>14} {wiring_count(fs, ps)[0]:>10} {t_py:>10.4f} {t_cy:>10.4f} {speed:>8}")


if __name__ == "__main__":
    main()
