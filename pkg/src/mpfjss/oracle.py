"""Exhaustive optimal-tardiness search for tiny instances.

Ground truth for the solver tests.  Enumerates every placement sequence that
respects job precedence, every choice of capable instances, and appends each
task at its earliest feasible time.  Appending loses no optimality: replaying
any feasible schedule in start-time order can only move tasks earlier, and
total tardiness never increases when completions decrease.

Deliberately shares nothing with the solver: no difference constraints, just
per-instance and per-job availability clocks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .model import Instance, Task, tasks
from .schedule import Schedule, build_schedule


@dataclass(frozen=True)
class OracleBudget:
    """Hard limits; beyond them the oracle refuses instead of degrading."""

    max_jobs: int = 4
    max_tasks: int = 10
    horizon: int = 128
    node_limit: int = 2_000_000


class BudgetExceeded(RuntimeError):
    pass


def brute_force_optimal(
    inst: Instance, budget: OracleBudget | None = None
) -> tuple[int, Schedule]:
    """Exact minimum total tardiness and one witness schedule."""
    return _exhaust(inst, budget, total=True)


def brute_force_min_cap(inst: Instance, budget: OracleBudget | None = None) -> int:
    """Smallest uniform per-job tardiness bound any schedule can obey.

    Same enumeration as :func:`brute_force_optimal` with the maximum instead
    of the sum of per-job tardiness as the objective.
    """
    value, _ = _exhaust(inst, budget, total=False)
    return value


def _exhaust(
    inst: Instance, budget: OracleBudget | None, total: bool
) -> tuple[int, Schedule]:
    budget = budget or OracleBudget()
    all_tasks = tasks(inst)
    if len(inst.jobs) > budget.max_jobs:
        raise BudgetExceeded(f"{len(inst.jobs)} jobs exceed the budget of {budget.max_jobs}")
    if len(all_tasks) > budget.max_tasks:
        raise BudgetExceeded(f"{len(all_tasks)} tasks exceed the budget of {budget.max_tasks}")
    reach = sum(inst.duration(op) for _, op in all_tasks) + max(
        (j.deadline for j in inst.jobs), default=0
    )
    if budget.horizon < reach:
        raise BudgetExceeded(f"horizon {budget.horizon} < serial reach {reach}")

    options: dict[Task, list[tuple[tuple[str, int], ...]]] = {}
    for job, op in all_tasks:
        per_class = []
        for cls in sorted(inst.demanded(op)):
            idxs = inst.capable(cls, op)
            if not idxs:
                raise ValueError(f"no instance of class {cls} can execute {op}")
            per_class.append([(cls, i) for i in idxs])
        options[(job, op)] = [tuple(combo) for combo in itertools.product(*per_class)]

    preds: dict[Task, list[Task]] = {t: [] for t in all_tasks}
    deadline = {}
    for j in inst.jobs:
        deadline[j.name] = j.deadline
        for a, b in j.precedence:
            preds[(j.name, b)].append((j.name, a))

    res_avail: dict[tuple[str, int], int] = {r.key: 0 for r in inst.resources}
    job_end: dict[str, int] = {j.name: 0 for j in inst.jobs}
    task_end: dict[Task, int] = {}
    starts: dict[Task, int] = {}
    alloc: dict[Task, dict[str, int]] = {}
    n = len(all_tasks)
    nodes = 0
    best_t: int | None = None
    best: tuple[dict[Task, int], dict[Task, dict[str, int]]] | None = None

    def partial_tardiness() -> int:
        late = (max(0, end - deadline[j]) for j, end in job_end.items())
        return sum(late) if total else max(late, default=0)

    def descend() -> None:
        nonlocal nodes, best_t, best
        if best_t == 0:
            return
        if len(task_end) == n:
            t = partial_tardiness()
            if best_t is None or t < best_t:
                best_t = t
                best = (dict(starts), {k: dict(v) for k, v in alloc.items()})
            return
        for task in all_tasks:
            if task in task_end:
                continue
            if any(p not in task_end for p in preds[task]):
                continue
            job, op = task
            dur = inst.duration(op)
            floor = max(job_end[job], max((task_end[p] for p in preds[task]), default=0))
            for combo in options[task]:
                nodes += 1
                if nodes > budget.node_limit:
                    raise BudgetExceeded(f"node limit {budget.node_limit} exhausted")
                start = max(floor, max(res_avail[r] for r in combo))
                end = start + dur
                saved_res = [(r, res_avail[r]) for r in combo]
                saved_job = job_end[job]
                for r in combo:
                    res_avail[r] = end
                job_end[job] = max(saved_job, end)
                task_end[task] = end
                starts[task] = start
                alloc[task] = dict(combo)
                if best_t is None or partial_tardiness() < best_t:
                    descend()
                del alloc[task], starts[task], task_end[task]
                job_end[job] = saved_job
                for r, avail in saved_res:
                    res_avail[r] = avail

    descend()
    if best is None:
        # only possible with zero tasks: the empty schedule
        return 0, build_schedule(inst, {}, {})
    return best_t, build_schedule(inst, best[0], best[1])
