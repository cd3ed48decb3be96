"""Compare the compiled kernels with their pure-Python fallbacks.

Run with ``python3 benchmarks/bench_kernels.py``. Each kernel is timed on
the same inputs under both backends and the results are checked for
agreement before any timing is reported.
"""
from __future__ import annotations

import argparse
import timeit
from itertools import permutations

import numpy as np

from flowknot import _fallback

try:
    from flowknot import _kernels
except ImportError:  # extension not built
    _kernels = None


def _cases(rng: np.random.Generator):
    mats = [rng.integers(0, 2, size=(k, k), dtype=np.uint8) for k in (64, 128, 256)]
    for m in mats:
        yield f"gf2_rank {m.shape[0]}x{m.shape[1]}", "gf2_rank", (m,)
    for n in (4, 5, 6):
        perms = np.array(list(permutations(range(n))), dtype=np.int64)
        O = np.array([(i + 1) % n for i in range(n)], dtype=np.int64)
        X = np.arange(n, dtype=np.int64)
        yield f"empty_rectangles n={n}", "empty_rectangles", (perms, O, X, True)
    perm = list(rng.permutation(9))
    yield "perm_rank n=9", "perm_rank", (perm,)


def _same(a, b) -> bool:
    if isinstance(a, np.ndarray):
        return a.shape == b.shape and bool((a == b).all())
    return a == b


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if _kernels is None:
        print("compiled extension not available; only the fallback can run")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'case':<28}{'python (s)':>12}{'cython (s)':>12}{'speedup':>10}")
    for label, name, inputs in _cases(rng):
        slow, fast = getattr(_fallback, name), getattr(_kernels, name)
        if not _same(slow(*inputs), fast(*inputs)):
            print(f"{label}: backends disagree")
            return 1
        t_slow = min(timeit.repeat(lambda: slow(*inputs), number=1, repeat=args.repeat))
        t_fast = min(timeit.repeat(lambda: fast(*inputs), number=1, repeat=args.repeat))
        print(f"{label:<28}{t_slow:>12.4f}{t_fast:>12.4f}{t_slow / max(t_fast, 1e-9):>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
