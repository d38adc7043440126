"""Benchmark the compiled superframe loop against the pure-Python fallback.

Run with ``python -m hopbound.benchmark``.  The channel draw is shared, so
the timing isolates the queue-update loop (the simulation hot path) and
then reports end-to-end ``sim.run`` times per backend for context.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import backend as _backend
from .phy import LinkModel
from .sim import SimConfig, _draw_success_matrix, run
from .snc import FlowSpec, PathModel


def _time_best(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--superframes", type=int, default=1_000_000)
    parser.add_argument("--hops", type=int, default=3)
    parser.add_argument("--snr-db", type=float, default=6.0, dest="snr_db")
    parser.add_argument("--r-a", type=int, default=80, dest="r_a")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args(argv)

    links = tuple(LinkModel.from_db(args.snr_db + j) for j in range(args.hops))
    config = SimConfig(
        path=PathModel(links),
        flow=FlowSpec(args.r_a),
        num_superframes=args.superframes,
        seed=args.seed,
        target_delays=(5, 10, 20),
    )

    success = _draw_success_matrix(config)
    k_a = np.array([link.frame.k_a for link in links], dtype=np.int64)
    slots = args.superframes * args.hops

    print(
        f"queue loop: {args.superframes} superframes x {args.hops} hops "
        f"(r_a={args.r_a}, seed={args.seed}, best of {args.repeats})"
    )
    loop_times = {}
    for name in _backend.available_backends():
        loop = _backend.get_loop(name)
        loop_times[name] = _time_best(
            lambda: loop(success, args.r_a, k_a, True), args.repeats
        )
        print(f"  {name:>7}: {loop_times[name]:8.4f} s  ({slots / loop_times[name]:.3g} slots/s)")
    if "cython" in loop_times and "python" in loop_times:
        print(f"  speedup: {loop_times['python'] / loop_times['cython']:.1f}x")
    if "cython" not in loop_times:
        print("  (compiled backend not built; showing pure Python only)")

    print("full run (channel draw + loop + statistics):")
    for name in _backend.available_backends():
        elapsed = _time_best(lambda: run(config, backend=name), args.repeats)
        print(f"  {name:>7}: {elapsed:8.4f} s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
