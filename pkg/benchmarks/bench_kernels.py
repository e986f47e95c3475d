"""Compare the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import timeit

from carnotcert import _pykernels
from carnotcert.liealg import free_step2

try:
    from carnotcert import _ckernels
except ImportError:
    _ckernels = None


def skew(n, rng, bound=100):
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            x = rng.randint(-bound, bound)
            a[i][j], a[j][i] = x, -x
    return a


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = random.Random(0)

    mats = [skew(10, rng) for _ in range(50)]
    big = [[rng.randint(-50, 50) for _ in range(30)] for _ in range(30)]
    F = free_step2(10)
    (tab, _), n2 = F.v1_int_table, F.layer_dims[1]
    vecs = [([rng.randint(-999, 999) for _ in range(10)], [rng.randint(-999, 999) for _ in range(10)]) for _ in range(200)]

    cases = {
        "rank_int 50x(10x10 skew)": lambda K: [K.rank_int(a) for a in mats],
        "rank_int 30x30 dense": lambda K: K.rank_int(big),
        "step2_bracket 200 pairs F(10)": lambda K: [K.step2_bracket(x, y, tab, n2) for x, y in vecs],
        "pfaffian_table 10 matrices": lambda K: [K.pfaffian_table(a, 10) for a in mats[:10]],
    }
    impls = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print("%-34s %12s %12s %8s" % ("kernel", "python [ms]", "cython [ms]", "speedup"))
    for name, fn in cases.items():
        times = {}
        for label, K in impls:
            times[label] = min(timeit.repeat(lambda: fn(K), number=1, repeat=args.repeat)) * 1e3
        c = times.get("cython")
        print("%-34s %12.2f %12s %8s" % (name, times["python"], "%.2f" % c if c else "n/a", "%.2fx" % (times["python"] / c) if c else "n/a"))


if __name__ == "__main__":
    main()
