"""Seeded synthetic instance generator shaped like a specialized lab.

Operations draw from a shared catalogue of op types; workers are trained on
a few types each, machines on one or two.  Jobs pick a random sequence of
distinct op types, ordered by default as a strict chain.  The optional
``partial_order`` parameter relaxes the chain into a genuine partial order.
"""

from __future__ import annotations

import dataclasses
import random
from dataclasses import dataclass

from .model import Instance, parse_instance


@dataclass(frozen=True)
class GenParams:
    op_types: int = 50
    machines: int = 75
    workers: int = 45
    jobs: tuple[int, int] = (30, 50)
    ops_per_job: tuple[int, int] = (3, 6)
    durations: tuple[int, int] = (10, 45)
    shift: int = 480
    deadline_factor: float = 2.0
    tight_fraction: float = 0.25
    machine_fraction: float = 0.6
    worker_skills: tuple[int, int] = (2, 5)
    machine_skills: tuple[int, int] = (1, 2)
    partial_order: float = 0.0

    def __post_init__(self) -> None:
        for name in ("op_types", "machines", "workers", "shift"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        for name in ("jobs", "ops_per_job", "durations", "worker_skills",
                     "machine_skills"):
            lo, hi = getattr(self, name)
            if not 1 <= lo <= hi:
                raise ValueError(f"{name} must be a range 1 <= lo <= hi")
        for name in ("tight_fraction", "machine_fraction", "partial_order"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be within [0, 1]")
        if self.deadline_factor <= 0:
            raise ValueError("deadline_factor must be positive")


def _order_facts(job: str, seq: list[str], drop: float, rng: random.Random):
    """Precedence facts for an op sequence: the chain, or a thinned-out order.

    With drop > 0 each pair of the underlying total order is discarded with
    that probability; what survives is closed transitively and emitted as a
    transitive reduction, so the result is an acyclic partial order that
    degenerates to the plain chain at drop = 0.
    """
    n = len(seq)
    kept = set()
    for i in range(n):
        for k in range(i + 1, n):
            if drop == 0.0 or rng.random() >= drop:
                kept.add((i, k))
    closure = {p: {k for (i, k) in kept if i == p} for p in range(n)}
    for p in sorted(closure, reverse=True):
        for child in list(closure[p]):
            closure[p] |= closure[child]
    facts = []
    for i in range(n):
        for k in sorted(closure[i]):
            if any(mid in closure[i] and k in closure[mid] for mid in closure[i]):
                continue
            facts.append(f"prec({job},{seq[i]},{seq[k]}).")
    return facts


def generate(params: GenParams, seed: int) -> Instance:
    """Deterministically produce a valid instance from (params, seed)."""
    rng = random.Random(seed)
    opw = len(str(params.op_types))
    ops = [f"o{i:0{opw}d}" for i in range(1, params.op_types + 1)]
    dur = {o: rng.randint(*params.durations) for o in ops}
    machine_ops = set(rng.sample(ops, round(params.machine_fraction * len(ops))))

    worker_caps = []
    for _ in range(params.workers):
        k = min(rng.randint(*params.worker_skills), len(ops))
        worker_caps.append(set(rng.sample(ops, k)))
    machine_pool = sorted(machine_ops)
    machine_caps = []
    for _ in range(params.machines):
        k = min(rng.randint(*params.machine_skills), len(machine_pool))
        machine_caps.append(set(rng.sample(machine_pool, k)) if k else set())

    # every op type must stay executable after the random draws
    for o in ops:
        if not any(o in caps for caps in worker_caps):
            worker_caps[rng.randrange(params.workers)].add(o)
    for o in machine_pool:
        if not any(o in caps for caps in machine_caps):
            machine_caps[rng.randrange(params.machines)].add(o)

    lines = [f"op({o},{dur[o]})." for o in ops]
    for o in ops:
        lines.append(f"needs({o},w).")
        if o in machine_ops:
            lines.append(f"needs({o},m).")
    for i, caps in enumerate(worker_caps, start=1):
        lines.extend(f"res(w,{i},{o})." for o in sorted(caps))
    for i, caps in enumerate(machine_caps, start=1):
        lines.extend(f"res(m,{i},{o})." for o in sorted(caps))

    n_jobs = rng.randint(*params.jobs)
    jw = len(str(params.jobs[1]))
    latest = int(params.deadline_factor * params.shift)
    for j in range(1, n_jobs + 1):
        name = f"j{j:0{jw}d}"
        k = min(rng.randint(*params.ops_per_job), len(ops))
        seq = rng.sample(ops, k)
        serial = sum(dur[o] for o in seq)
        if rng.random() < params.tight_fraction:
            deadline = rng.randint(serial // 2, max(serial - 1, serial // 2))
        else:
            deadline = rng.randint(min(serial, latest), latest)
        deadline = min(deadline, latest)
        lines.append(f"job({name},{deadline}).")
        lines.extend(f"recipe({name},{o})." for o in seq)
        lines.extend(_order_facts(name, seq, params.partial_order, rng))

    return parse_instance("\n".join(lines))


def split_day(inst: Instance, step: int = 5) -> list[Instance]:
    """Prefixes of the job list in increasing multiples of ``step``.

    Every sub-instance keeps the complete op catalogue and resource pool;
    the last element is the full instance.
    """
    if step < 1:
        raise ValueError("step must be positive")
    total = len(inst.jobs)
    sizes = list(range(step, total + 1, step))
    if total and (not sizes or sizes[-1] != total):
        sizes.append(total)
    return [dataclasses.replace(inst, jobs=inst.jobs[:k]) for k in sizes]
