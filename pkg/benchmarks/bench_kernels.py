"""Time the packed GF(2) kernels: numba path vs the numpy reference.

    python3 benchmarks/bench_kernels.py [--sizes 128 512 1024] [--repeat 3]
"""
import argparse
import time

import numpy as np

from tameblocks import _accel


def random_packed(rng, rows, cols):
    words = (cols + 63) // 64
    a = rng.integers(0, 2**63, size=(rows, words), dtype=np.uint64) << np.uint64(1)
    a ^= rng.integers(0, 2, size=(rows, words), dtype=np.uint64)
    tail = cols & 63
    if tail:
        a[:, -1] &= (np.uint64(1) << np.uint64(tail)) - np.uint64(1)
    return a


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[128, 512, 1024])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    print(f"numba active: {_accel.USING_NUMBA}")
    if _accel.USING_NUMBA:
        # warm the JIT so compile time stays out of the table
        w = random_packed(rng, 8, 8)
        _accel.rref(w.copy(), 8)
        _accel.mul(w, w, 8)

    print(f"{'n':>6} {'kernel':>6} {'numpy s':>10} {'active s':>10} {'speedup':>8}")
    for n in args.sizes:
        a = random_packed(rng, n, n)
        b = random_packed(rng, n, n)

        r_ref, p_ref = _accel.rref_numpy(a.copy(), n)
        r_act, p_act = _accel.rref(a.copy(), n)
        assert r_ref == r_act and np.array_equal(p_ref, p_act)
        assert np.array_equal(_accel.mul_numpy(a, b, n), _accel.mul(a, b, n))

        for name, ref, act in (
            ("rref", lambda: _accel.rref_numpy(a.copy(), n), lambda: _accel.rref(a.copy(), n)),
            ("mul", lambda: _accel.mul_numpy(a, b, n), lambda: _accel.mul(a, b, n)),
        ):
            t_ref = best_of(ref, args.repeat)
            t_act = best_of(act, args.repeat)
            print(f"{n:>6} {name:>6} {t_ref:>10.4f} {t_act:>10.4f} {t_ref / t_act:>7.1f}x")


if __name__ == "__main__":
    main()
