"""Compare the numba and numpy row-reduction kernels.

Part 1 times both kernels on random dense matrices over GF(7) and
GF(2^31 - 1) and checks they agree.  Part 2 times an end-to-end workload
(Ext over the catalog) in two subprocesses, one with COGRADE_DISABLE_NUMBA=1;
the first kernel call is timed separately because it includes loading the
compiled numba code.

    python3 benchmarks/bench_rref.py [--sizes 40 80 160 320] [--repeat 3]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from cograde._kernels import rref_inplace_numba, rref_inplace_numpy

WORKLOAD = """
import time
import numpy as np
t0 = time.perf_counter()
from cograde.linalg import rank
rank(np.eye(3, dtype=np.int64), 7)
warm = time.perf_counter() - t0
from cograde.catalog import catalog
from cograde.homalg import ext_enriched
cat = catalog()
t = time.perf_counter()
for A, name, M in cat.pairs():
    for _, name2, N in cat.pairs():
        if N.algebra == M.algebra:
            for i in range(4):
                ext_enriched(M, N, i)
print(warm, time.perf_counter() - t)
"""


def best_of(fn, a, p, repeat):
    times = []
    for _ in range(repeat):
        b = a.copy()
        t = time.perf_counter()
        out = fn(b, p)
        times.append(time.perf_counter() - t)
    return min(times), out, b


def kernels(sizes, repeat, seed):
    rng = np.random.default_rng(seed)
    rref_inplace_numba(np.eye(2, dtype=np.int64), np.int64(7))  # compile outside the timing
    print(f"{'p':>11} {'size':>5} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    for p in (7, 2**31 - 1):
        for n in sizes:
            a = rng.integers(0, p, (n, n + n // 2), dtype=np.int64)
            tn, (rn, pn), bn = best_of(lambda x, q: rref_inplace_numba(x, np.int64(q)), a, p, repeat)
            tp, (rp, pp), bp = best_of(rref_inplace_numpy, a, p, repeat)
            if rn != rp or not np.array_equal(pn, pp) or not np.array_equal(bn, bp):
                raise SystemExit(f"kernels disagree at p={p}, n={n}")
            print(f"{p:>11} {n:>5} {tn:>10.4f} {tp:>10.4f} {tp / tn:>8.1f}")


def end_to_end():
    out = {}
    for label, flag in (("numba", ""), ("numpy", "1")):
        env = dict(os.environ, COGRADE_DISABLE_NUMBA=flag)
        r = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True, check=True)
        out[label] = [float(x) for x in r.stdout.split()]
    for label, (warm, sweep) in out.items():
        print(f"{label}: import and first call {warm:.3f} s, catalog Ext sweep {sweep:.3f} s")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[40, 80, 160, 320])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args()
    kernels(args.sizes, args.repeat, args.seed)
    if not args.skip_end_to_end:
        end_to_end()


if __name__ == "__main__":
    main()
