"""Time the numba and pure-numpy flavours of every kernel.

    python3 benchmarks/bench_kernels.py [--n 6] [--acts 2000] [--repeat 5]

Each numba kernel is called once before timing so compilation is excluded.
The reported figure is the best of ``--repeat`` runs.
"""

import argparse
import time

import numpy as np

from bicap import kernels
from bicap._accel import HAVE_NUMBA
from bicap.setfn import pair_masks, popcount_table, pow3_table, zero_offset
from bicap.transforms import interaction_weights


def best_time(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def cases(n, acts, rng):
    pos, neg = pair_masks(n)
    P, Z, pc = pow3_table(n), zero_offset(n), popcount_table(n)
    W = interaction_weights(n)
    pair_table = rng.normal(size=3 ** n)
    return {
        "bicap_choquet_batch": (pair_table, P, Z, rng.normal(size=(acts, n))),
        "capacity_interaction": (rng.normal(size=1 << n), n, pc, W),
        "biinteraction_direct": (pair_table, n, P, Z, pos, neg, pc, W),
        "interval_sum": (pair_table, n, P, Z, pos, neg, pc),
        "ternary_margins": (rng.normal(size=n), rng.normal(size=(n, n, 3))),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=6)
    parser.add_argument("--acts", type=int, default=2000)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(args.seed)
    print(f"n={args.n} acts={args.acts} best of {args.repeat}")
    print(f"{'kernel':<22} {'numba [ms]':>11} {'numpy [ms]':>11} {'speedup':>8} {'max |diff|':>11}")
    for name, call_args in cases(args.n, args.acts, rng).items():
        fast = getattr(kernels, name + "_numba")
        slow = getattr(kernels, name + "_numpy")
        diff = float(np.max(np.abs(fast(*call_args) - slow(*call_args))))
        t_fast = best_time(fast, call_args, args.repeat)
        t_slow = best_time(slow, call_args, args.repeat)
        print(f"{name:<22} {1e3 * t_fast:11.3f} {1e3 * t_slow:11.3f} {t_slow / t_fast:8.1f} {diff:11.2e}")


if __name__ == "__main__":
    main()
