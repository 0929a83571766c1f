#!/usr/bin/env python3
"""Compare the pure-Python and compiled difference-logic kernels.

Two workloads per backend: raw assert/push/pop throughput on random
constraint systems, and the full cap search on a generated 30-job day.
Both are deterministic per seed, so the backends see identical work.
"""

import argparse
import dataclasses
import random
import time

from mpfjss.bounds import exponential_bound
from mpfjss.dl import AVAILABLE_BACKENDS, DLEngine
from mpfjss.generate import GenParams, generate


def engine_throughput(backend: str, rounds: int, seed: int) -> float:
    rng = random.Random(seed)
    ops = 0
    t0 = time.perf_counter()
    for _ in range(rounds):
        nv = rng.randint(10, 40)
        eng = DLEngine(backend=backend)
        vars_ = [eng.new_var(i) for i in range(nv)]
        for v in vars_:
            eng.assert_upper(eng.zero, v, 0)
        ops += nv
        for _ in range(300):
            act = rng.random()
            if act < 0.2:
                eng.push()
            elif act < 0.35 and eng.level() > 0:
                eng.pop()
            else:
                x, y = rng.sample(range(nv), 2)
                eng.assert_upper(vars_[x], vars_[y], rng.randint(-8, 8))
            ops += 1
    return ops / (time.perf_counter() - t0)


def day_bound_search(backend: str, seed: int):
    inst = generate(dataclasses.replace(GenParams(), jobs=(30, 30)), seed)
    t0 = time.perf_counter()
    result = exponential_bound(inst, backend=backend)
    return time.perf_counter() - t0, result.cap


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rounds", type=int, default=50,
                        help="random systems per backend")
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    print(f"{'backend':<10} {'engine ops/s':>14} {'day search s':>14} {'cap':>5}")
    for backend in AVAILABLE_BACKENDS:
        rate = engine_throughput(backend, args.rounds, args.seed)
        secs, cap = day_bound_search(backend, args.seed)
        print(f"{backend:<10} {rate:>14,.0f} {secs:>14.3f} {cap:>5}")


if __name__ == "__main__":
    main()
