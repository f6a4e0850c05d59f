"""Compare the numba and pure-numpy GF(p) kernels.

Run with ``python3 benchmarks/bench_kernels.py``. Both backends are imported
directly from ``motkit._kernels``, so ``MOTKIT_NO_NUMBA`` does not matter here.
Each row also checks that the two backends agree bit for bit.
"""

import argparse
import time

import numpy as np

from motkit import _kernels as K


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 64, 128, 256])
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not K._HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(args.seed)
    warm = rng.integers(0, args.p, (4, 4))
    K.matmul_numba(warm, warm, args.p)
    K.rref_numba(warm, args.p)

    print(f"{'kernel':<8}{'n':>6}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}  agree")
    for n in args.sizes:
        a = rng.integers(0, args.p, (n, n))
        b = rng.integers(0, args.p, (n, n))
        rows = [
            ("matmul", lambda: K.matmul_numpy(a, b, args.p), lambda: K.matmul_numba(a, b, args.p)),
            ("rref", lambda: K.rref_numpy(a, args.p), lambda: K.rref_numba(a, args.p)),
        ]
        for name, slow, fast in rows:
            ref, got = slow(), fast()
            if isinstance(ref, tuple):
                agree = all(np.array_equal(x, y) for x, y in zip(ref, got))
            else:
                agree = np.array_equal(ref, got)
            t_np = best_of(slow, args.repeat) * 1e3
            t_nb = best_of(fast, args.repeat) * 1e3
            print(f"{name:<8}{n:>6}{t_np:>12.3f}{t_nb:>12.3f}{t_np / t_nb:>10.1f}  {agree}")


if __name__ == "__main__":
    main()
