"""Benchmark the compiled counting kernels against the pure-numpy
fallback.

Run:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from hyperdp import _kernels_py

try:
    from hyperdp import _kernels as _compiled
except ImportError:
    _compiled = None


def _case(rng, n, h, m, L):
    edges = np.array(
        [sorted(rng.choice(n, size=h, replace=False)) for _ in range(m)], dtype=np.int64
    )
    labels = np.ascontiguousarray(rng.choice(np.array([-1, 1], dtype=np.int8), size=(L, n)))
    return edges, labels


def _time(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    print(f"{'case':<38} {'python':>10} {'compiled':>10} {'speedup':>8}")
    cases = [
        ("cross_counts n=100 m=600 L=2500", 100, 3, 600, 2500),
        ("cross_counts n=20 m=120 L=92378", 20, 3, 120, 92378),
        ("cross_counts n=6 m=12 L=10", 6, 3, 12, 10),
    ]
    for name, n, h, m, L in cases:
        edges, labels = _case(rng, n, h, m, L)
        t_py = _time(_kernels_py.cross_counts, edges, labels)
        if _compiled is None:
            print(f"{name:<38} {t_py*1e3:>9.2f}ms {'n/a':>10}")
            continue
        t_c = _time(_compiled.cross_counts, edges, labels)
        assert (np.asarray(_compiled.cross_counts(edges, labels))
                == _kernels_py.cross_counts(edges, labels)).all()
        print(f"{name:<38} {t_py*1e3:>9.2f}ms {t_c*1e3:>8.2f}ms {t_py/t_c:>7.1f}x")

    for name, n, h, m in [("expansion_weights n=100 m=600", 100, 3, 600),
                          ("expansion_weights n=1000 m=20000", 1000, 3, 20000)]:
        edges, _ = _case(rng, n, h, m, 1)
        t_py = _time(_kernels_py.expansion_weights, edges, n)
        if _compiled is None:
            print(f"{name:<38} {t_py*1e3:>9.2f}ms {'n/a':>10}")
            continue
        t_c = _time(_compiled.expansion_weights, edges, n)
        assert (np.asarray(_compiled.expansion_weights(edges, n))
                == _kernels_py.expansion_weights(edges, n)).all()
        print(f"{name:<38} {t_py*1e3:>9.2f}ms {t_c*1e3:>8.2f}ms {t_py/t_c:>7.1f}x")


if __name__ == "__main__":
    main()
