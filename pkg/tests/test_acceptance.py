"""End-to-end acceptance gate: one test per shipping criterion.

Each test prints a single summary line on success; a failing criterion
fails its test and shows the offending values.
"""

import dataclasses
import random
import time

import pytest

from mpfjss.bounds import (
    StrategyConfig,
    exponential_bound,
    incremental_bound,
    single_shot_bound,
    solve_with_strategy,
)
from mpfjss.dl import AVAILABLE_BACKENDS, DLEngine
from mpfjss.generate import GenParams, generate
from mpfjss.oracle import brute_force_optimal
from mpfjss.schedule import build_schedule
from mpfjss.solver import decide, optimize
from mpfjss.validate import check_schedule

from test_dl import bellman_ford_feasible, build_engine, random_system
from test_validator import ALLOC, STARTS_A, kinds, moved


def note(criterion: int, detail: str) -> None:
    print(f"criterion {criterion}: PASS ({detail})")


def test_criterion_1_worked_example(example_instance):
    configs = [
        StrategyConfig(strategy="single"),
        StrategyConfig(strategy="inc", window=1),
        StrategyConfig(strategy="inc", window=2),
        StrategyConfig(strategy="inc", window=20),
        StrategyConfig(strategy="exp"),
    ]
    for cfg in configs:
        t0 = time.monotonic()
        report = solve_with_strategy(example_instance, cfg)
        elapsed = time.monotonic() - t0
        label = f"{cfg.strategy}/w{cfg.window}"
        assert report.total_tardiness == 1, label
        assert report.proven_optimal, label
        assert check_schedule(example_instance, report.schedule) == [], label
        assert elapsed < 1.0, label
    note(1, "single, inc w=1/2/20, exp all reach T=1, clean, < 1 s each")


def test_criterion_2_exponential_minimality(example_instance, tiny_factory):
    t0 = time.monotonic()
    res = exponential_bound(example_instance)
    assert res.cap == 1
    assert (0, False) in [(p.bound, p.sat) for p in res.probes]
    rng = random.Random(20260823)
    for round_ in range(50):
        inst = tiny_factory(rng)
        cap = exponential_bound(inst).cap
        assert decide(inst, cap) is not None, round_
        assert cap == 0 or decide(inst, cap - 1) is None, round_
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    note(2, f"minimal caps on example + 50 random instances in {elapsed:.1f} s")


def test_criterion_3_oracle_equivalence(tiny_factory):
    rng = random.Random(33)
    slowest = 0.0
    for round_ in range(50):
        inst = tiny_factory(rng)
        t0 = time.monotonic()
        want, _ = brute_force_optimal(inst)
        res = optimize(inst, single_shot_bound(inst))
        elapsed = time.monotonic() - t0
        slowest = max(slowest, elapsed)
        assert elapsed < 10.0, round_
        assert res.proven_optimal, round_
        assert res.schedule.total_tardiness == want, round_
        assert check_schedule(inst, res.schedule) == [], round_
    note(3, f"50/50 brute-force matches, slowest instance {slowest:.2f} s")


@pytest.mark.parametrize("backend", AVAILABLE_BACKENDS)
def test_criterion_4_dl_engine_oracle(backend):
    rng = random.Random(44)
    for round_ in range(1000):
        nv, cons = random_system(rng)
        eng, vars_, accepted = build_engine(backend, nv, cons)
        verdict = len(accepted) == len(cons)
        assert verdict == bellman_ford_feasible(nv, cons), round_
        sol = eng.solution()

        def val(i):
            return 0 if i == -1 else sol[vars_[i]]

        for x, y, k in accepted:
            assert val(x) - val(y) <= k, round_

    for round_ in range(100):
        nv = rng.randint(2, 8)
        eng = DLEngine(backend=backend)
        vars_ = [eng.new_var(i) for i in range(nv)]
        surviving = [[]]
        for _ in range(60):
            act = rng.random()
            if act < 0.25:
                eng.push()
                surviving.append([])
            elif act < 0.4 and eng.level() > 0:
                eng.pop()
                surviving.pop()
            else:
                x, y = rng.randrange(-1, nv), rng.randrange(-1, nv)
                k = rng.randint(-10, 10)
                xv = eng.zero if x == -1 else vars_[x]
                yv = eng.zero if y == -1 else vars_[y]
                if eng.assert_upper(xv, yv, k) is None:
                    surviving[-1].append((x, y, k))
        while eng.level() > 0:
            eng.pop()
            surviving.pop()
        replay = DLEngine(backend=backend)
        rvars = [replay.new_var(i) for i in range(nv)]
        for x, y, k in surviving[0]:
            rx = replay.zero if x == -1 else rvars[x]
            ry = replay.zero if y == -1 else rvars[y]
            assert replay.assert_upper(rx, ry, k) is None, round_
        assert [eng.lower_bound(v) for v in vars_] == [
            replay.lower_bound(v) for v in rvars
        ], round_
    note(4, f"{backend}: 1000/1000 verdicts, models check, replays agree")


def test_criterion_5_validator_mutations(example_instance):
    inst = example_instance
    base = build_schedule(inst, STARTS_A, ALLOC)
    late = build_schedule(inst, {t: s + 1 for t, s in STARTS_A.items()}, ALLOC)
    assert check_schedule(inst, base) == []
    assert check_schedule(inst, late) == []

    stripped = {t: dict(r) for t, r in ALLOC.items()}
    del stripped[("j2", "o3")]["m"]
    cases = [
        ("demand-unmet", build_schedule(inst, STARTS_A, stripped)),
        ("resource-overlap", moved(inst, base, ("j2", "o3"), 2)),
        ("same-job-overlap", moved(inst, base, ("j1", "o4"), 2)),
        ("precedence-order", moved(inst, late, ("j1", "o4"), 0)),
        ("preemption-or-negative-time", moved(inst, base, ("j2", "o3"), -1)),
        ("tardiness-miscomputed", dataclasses.replace(base, total_tardiness=0)),
    ]
    for expected, mutant in cases:
        assert kinds(inst, mutant) == {expected}
    note(5, "6/6 targeted mutations flagged with exactly the expected kind")


def test_criterion_6_strategy_monotonicity(tiny_factory):
    rng = random.Random(66)
    for round_ in range(30):
        inst = tiny_factory(rng)
        window = rng.randint(1, 5)
        inc = incremental_bound(inst, window)
        exp = exponential_bound(inst)
        assert inc.cap >= exp.cap, round_
        t_inc = optimize(inst, inc.cap).schedule.total_tardiness
        t_exp = optimize(inst, exp.cap).schedule.total_tardiness
        assert t_inc <= t_exp, round_
    note(6, "30/30 instances: T under the inc cap never exceeds T under exp")


def test_criterion_7_desk_scale_throughput():
    inst = generate(dataclasses.replace(GenParams(), jobs=(30, 30)), 42)
    assert len(inst.jobs) == 30
    t0 = time.monotonic()
    report = solve_with_strategy(
        inst, StrategyConfig(strategy="exp", timeout=45.0)
    )
    elapsed = time.monotonic() - t0
    assert elapsed < 300.0
    assert report.bound.cap is not None
    assert report.verdict() in ("optimal", "incumbent")
    assert check_schedule(inst, report.schedule) == []
    note(7, f"30-job day: cap {report.bound.cap} found in "
            f"{report.bound.search_seconds:.2f} s, clean incumbent, "
            f"total {elapsed:.0f} s")


def test_criterion_8_determinism(example_instance):
    params = GenParams(op_types=6, machines=4, workers=5, jobs=(3, 4),
                       ops_per_job=(2, 4), durations=(2, 6), shift=40)
    assert generate(params, 7) == generate(params, 7)
    day = generate(params, 7)
    for inst in (example_instance, day):
        for cfg in (StrategyConfig(strategy="exp"),
                    StrategyConfig(strategy="inc", window=20, seed=5)):
            first = solve_with_strategy(inst, cfg)
            second = solve_with_strategy(inst, cfg)
            assert first.bound.cap == second.bound.cap
            assert first.total_tardiness == second.total_tardiness
            assert first.schedule == second.schedule
            assert [(p.bound, p.sat) for p in first.bound.probes] == [
                (p.bound, p.sat) for p in second.bound.probes
            ]
    note(8, "identical caps, tardiness and schedules across repeated runs")
