"""Benchmark the compiled kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from annokit.engine.kernels import pure

try:
    from annokit.engine.kernels import _native as native
except ImportError:
    native = None


def bench(fn, *args, repeat=5, number=20):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(number):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / number)
    return best


def main():
    rng = np.random.default_rng(0)
    vocab = [f"token{i}" for i in range(500)]
    sentences = [
        [vocab[i] for i in rng.integers(0, len(vocab), size=rng.integers(4, 16))]
        for _ in range(200)
    ]
    n_buckets, dim = 2**15, 32
    table = rng.normal(size=(n_buckets, dim))

    def hash_all(impl):
        return [impl.token_feature_buckets(s, n_buckets, 7) for s in sentences]

    hashed = hash_all(pure)
    grads = [rng.normal(size=(len(s), dim)) for s in sentences]

    def gather_all(impl):
        for idx, off in hashed:
            impl.gather_mean(table, idx, off)

    def scatter_all(impl):
        out = np.zeros_like(table)
        for (idx, off), g in zip(hashed, grads):
            impl.scatter_add_mean(g, idx, off, out)

    rows = []
    for name, impl in (("pure", pure),) + ((("native", native),) if native else ()):
        rows.append((
            name,
            bench(lambda: hash_all(impl)),
            bench(lambda: gather_all(impl)),
            bench(lambda: scatter_all(impl)),
        ))

    print(f"{'impl':<8} {'hash (s)':>12} {'gather (s)':>12} {'scatter (s)':>12}")
    for name, h, g, s in rows:
        print(f"{name:<8} {h:>12.5f} {g:>12.5f} {s:>12.5f}")
    if len(rows) == 2:
        _, ph, pg, ps = rows[0]
        _, nh, ng, ns = rows[1]
        print(f"speedup  {ph / nh:>11.1f}x {pg / ng:>11.1f}x {ps / ns:>11.1f}x")


if __name__ == "__main__":
    main()
