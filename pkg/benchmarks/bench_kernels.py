#!/usr/bin/env python3
"""Time the hot kernels, compiled extension vs pure numpy fallback.

Run from the repo root after an editable install:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --repeat 9

Both backends are imported directly (this deliberately bypasses the
THUMBCAP_PURE switch in thumbcap.kernels), so one process times both.
Reported numbers are the best of --repeat runs; state-mutating kernels get
fresh buffers every run.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from thumbcap import _purekern
from thumbcap.kernels import compiled_available

VOCAB = [w.encode() for w in (
    "lofi chill beats piano rain night drive synthwave ambient texture "
    "guitar loop summer rooftop cafe warm tape dusty chord progression "
    "study session calm focus mellow groove vinyl crackle soft analog"
).split()]


def token_stream(n, rng):
    idx = rng.integers(0, len(VOCAB), size=n)
    return [VOCAB[i] for i in idx]


def bench_token_hash(impl, rng):
    tokens = token_stream(10_000, rng)

    def run():
        acc = 0
        for tok in tokens:
            acc ^= impl.token_hash(tok, 0x5EED)
        return acc

    return None, run


def bench_hash_scatter(impl, rng):
    tokens = token_stream(10_000, rng)
    weights = rng.random(len(tokens))

    def setup():
        return np.zeros(4096)

    def run(out):
        impl.hash_scatter(out, tokens, weights, 0x5EED)

    return setup, run


def bench_rank(impl, rng):
    sims = np.round(rng.normal(size=(512, 4096)), 2)  # rounding provokes ties
    positions = rng.integers(0, sims.shape[1], size=sims.shape[0])

    def run():
        total = 0
        for row, pos in zip(sims, positions):
            total += impl.rank_from_sims(row, int(pos))
        return total

    return None, run


def bench_adam(impl, rng):
    n = 1 << 18
    g = rng.normal(size=n)

    def setup():
        return rng.normal(size=n), np.zeros(n), np.zeros(n)

    def run(state):
        p, m, v = state
        for t in range(1, 51):
            impl.adam_update(p, g, m, v, 1e-3, 0.9, 0.999, 1e-8,
                             1.0 - 0.9 ** t, 1.0 - 0.999 ** t)

    return setup, run


WORKLOADS = [
    ("token_hash (10k tokens)", bench_token_hash),
    ("hash_scatter (10k -> 4096)", bench_hash_scatter),
    ("rank_from_sims (512 x 4096)", bench_rank),
    ("adam_update (262k params, 50 steps)", bench_adam),
]


def best_of(setup, run, repeat):
    best = float("inf")
    for _ in range(repeat):
        args = (setup(),) if setup else ()
        t0 = time.perf_counter()
        run(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5,
                        help="runs per kernel; best time wins (default 5)")
    args = parser.parse_args()

    backends = [("pure", _purekern)]
    if compiled_available():
        from thumbcap import _ckern
        backends.append(("cython", _ckern))
    else:
        print("compiled extension not available; timing the fallback only\n")

    names = [name for name, _ in backends]
    header = f"{'kernel':36s}" + "".join(f"{n:>12s}" for n in names)
    if len(backends) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    print("-" * len(header))

    for label, factory in WORKLOADS:
        times = []
        for _, impl in backends:
            setup, run = factory(impl, np.random.default_rng(0))
            times.append(best_of(setup, run, args.repeat))
        row = f"{label:36s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
