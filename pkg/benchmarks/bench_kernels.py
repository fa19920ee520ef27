"""Cython kernels against their pure-Python fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints one line per kernel: best wall time for each backend and the speedup.
"""
import argparse
import random
import timeit

import numpy as np

from minskylab import _pykernels, finite

try:
    from minskylab import _ckernels
except ImportError:
    _ckernels = None


def _commute(n, rng):
    m = np.zeros((n, n), dtype=np.uint8)
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < 0.4:
                m[a, b] = m[b, a] = 1
    return m


def cases(rng):
    com = _commute(12, rng)
    words = [[rng.randrange(12) for _ in range(40)] for _ in range(50)]
    com_py = com.tolist()
    # a left-zero band x right-zero band: associative, so every triple is checked
    table = np.array([[(a // 18) * 18 + b % 18 for b in range(324)] for a in range(324)])
    s = finite.direct_product(finite.builtin("T"), finite.builtin("P1_left"))
    t2 = np.asarray(s.table)
    # both sides the same word, so all 16^4 assignments are evaluated
    ident = ([0, 1, 2, 3, 0, 2], [0, 1, 2, 3, 0, 2])
    return {
        "lex_normal": (lambda k: [k.lex_normal(w, com_py if k is _pykernels else com) for w in words]),
        "two_factors": (lambda k: [k.two_factors(w, com_py if k is _pykernels else com) for w in words]),
        "check_assoc": (lambda k: k.check_assoc(table.tolist() if k is _pykernels else table)),
        "find_counterexample": (lambda k: k.find_counterexample(
            t2.tolist() if k is _pykernels else t2, 4, [], ident, None)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("Cython extension not built; only the pure-Python timings are shown")
    print(f"{'kernel':22} {'python':>10} {'cython':>10} {'speedup':>8}")
    for name, fn in cases(random.Random(0)).items():
        tp = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{name:22} {tp:10.4f}")
            continue
        assert fn(_pykernels) == fn(_ckernels), name
        tc = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat))
        print(f"{name:22} {tp:10.4f} {tc:10.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
