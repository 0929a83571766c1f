"""Independent schedule checker.

Re-derives every feasibility condition and the tardiness arithmetic straight
from the definitions, on purpose sharing nothing with the solver: overlap is
tested interval against interval, not via difference constraints.  Intervals
are half-open, so back-to-back tasks are legal.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Instance
from .schedule import Schedule

KINDS = (
    "structure",
    "demand-unmet",
    "preemption-or-negative-time",
    "same-job-overlap",
    "resource-overlap",
    "precedence-order",
    "tardiness-miscomputed",
)


@dataclass(frozen=True)
class Violation:
    kind: str
    entities: tuple
    message: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "entities": list(self.entities), "message": self.message}


def _overlap(s1: int, e1: int, s2: int, e2: int) -> bool:
    return s1 < e2 and s2 < e1


def check_schedule(inst: Instance, sched: Schedule) -> list[Violation]:
    """All violations of the schedule, empty iff it is valid.

    Structural problems (unknown tasks or resources, duplicate or missing
    assignments) are reported alone, since the remaining checks are not
    meaningful on an alien schedule.
    """
    out: list[Violation] = []
    bad = out.append

    structural: list[Violation] = []
    seen: set[tuple[str, str]] = set()
    for a in sched.assignments:
        job = inst.job_map.get(a.job)
        if job is None:
            structural.append(Violation("structure", (a.job, a.op), f"unknown job {a.job}"))
            continue
        if a.op not in job.operations:
            structural.append(
                Violation("structure", (a.job, a.op), f"operation {a.op} is not part of job {a.job}")
            )
            continue
        if a.task in seen:
            structural.append(
                Violation("structure", (a.job, a.op), f"task ({a.job},{a.op}) assigned twice")
            )
        seen.add(a.task)
        for key in a.resources:
            if key not in inst.resource_map:
                structural.append(
                    Violation("structure", (a.job, a.op, key), f"unknown resource {key[0]}{key[1]}")
                )
    for job in inst.jobs:
        for op in sorted(job.operations):
            if (job.name, op) not in seen:
                structural.append(
                    Violation("structure", (job.name, op), f"task ({job.name},{op}) is not scheduled")
                )
    if structural:
        return structural

    for a in sched.assignments:
        if a.start < 0 or a.end != a.start + inst.duration(a.op):
            bad(
                Violation(
                    "preemption-or-negative-time",
                    (a.job, a.op),
                    f"interval [{a.start},{a.end}) is not the contiguous "
                    f"{inst.duration(a.op)}-minute block from a non-negative start",
                )
            )

    for a in sched.assignments:
        by_class: dict[str, list[int]] = {}
        for cls, idx in a.resources:
            by_class.setdefault(cls, []).append(idx)
        for cls in sorted(inst.demanded(a.op)):
            picked = by_class.pop(cls, [])
            if len(picked) != 1:
                bad(
                    Violation(
                        "demand-unmet",
                        (a.job, a.op, cls),
                        f"demand for class {cls} filled by {len(picked)} instances, want exactly 1",
                    )
                )
                continue
            res = inst.resource_map[(cls, picked[0])]
            if a.op not in res.capabilities:
                bad(
                    Violation(
                        "demand-unmet",
                        (a.job, a.op, cls),
                        f"{cls}{picked[0]} cannot execute {a.op}",
                    )
                )
        for cls in sorted(by_class):
            bad(
                Violation(
                    "demand-unmet",
                    (a.job, a.op, cls),
                    f"class {cls} is allocated but not demanded by {a.op}",
                )
            )

    by_job: dict[str, list] = {}
    for a in sched.assignments:
        by_job.setdefault(a.job, []).append(a)
    for job, items in sorted(by_job.items()):
        items.sort(key=lambda a: (a.start, a.op))
        for i, a in enumerate(items):
            for b in items[i + 1:]:
                if _overlap(a.start, a.end, b.start, b.end):
                    bad(
                        Violation(
                            "same-job-overlap",
                            (job, a.op, b.op),
                            f"({job},{a.op}) [{a.start},{a.end}) overlaps ({job},{b.op}) [{b.start},{b.end})",
                        )
                    )

    by_res: dict[tuple[str, int], list] = {}
    for a in sched.assignments:
        for key in a.resources:
            by_res.setdefault(key, []).append(a)
    for key, items in sorted(by_res.items()):
        items.sort(key=lambda a: (a.start, a.job, a.op))
        for i, a in enumerate(items):
            for b in items[i + 1:]:
                if a.task != b.task and _overlap(a.start, a.end, b.start, b.end):
                    bad(
                        Violation(
                            "resource-overlap",
                            (key, a.task, b.task),
                            f"{key[0]}{key[1]} serves ({a.job},{a.op}) and ({b.job},{b.op}) at once",
                        )
                    )

    starts = {a.task: a for a in sched.assignments}
    for job in inst.jobs:
        for before, after in sorted(job.precedence):
            a, b = starts[(job.name, before)], starts[(job.name, after)]
            if b.start < a.end:
                bad(
                    Violation(
                        "precedence-order",
                        (job.name, before, after),
                        f"{after} starts at {b.start} before {before} completes at {a.end}",
                    )
                )

    completion = sched.completion()
    expect = {j.name: max(0, completion.get(j.name, 0) - j.deadline) for j in inst.jobs}
    for name in sorted(set(expect) | set(sched.tardiness)):
        got = sched.tardiness.get(name)
        want = expect.get(name)
        if got != want:
            bad(
                Violation(
                    "tardiness-miscomputed",
                    (name,),
                    f"job {name} tardiness recorded as {got}, expected {want}",
                )
            )
    if sched.total_tardiness != sum(expect.values()):
        bad(
            Violation(
                "tardiness-miscomputed",
                ("total",),
                f"total tardiness recorded as {sched.total_tardiness}, expected {sum(expect.values())}",
            )
        )
    return out


def total_tardiness(inst: Instance, sched: Schedule) -> int:
    """Tardiness sum recomputed from the assignment intervals alone."""
    completion = sched.completion()
    return sum(max(0, completion.get(j.name, 0) - j.deadline) for j in inst.jobs)
