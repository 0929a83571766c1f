"""Complete schedule search under a per-job tardiness cap.

``decide`` answers whether a schedule exists in which every job finishes at
most ``cap`` minutes after its deadline; ``optimize`` minimizes total
tardiness among such schedules by branch and bound.  The search branches on
two kinds of decisions:

* an instance of every demanded resource class for every task, filtered so
  that interchangeable instances (same class, identical capabilities) are
  introduced in index order, and
* a direction for every conflict pair, i.e. two tasks that may not overlap
  because they belong to the same job or share a chosen instance.

Start times themselves are never enumerated: once every pair is directed,
the difference-constraint system either admits a unique earliest schedule or
proves the directions contradictory.  Both searches are iterative, so deep
instances cannot exhaust the interpreter stack.
"""

from __future__ import annotations

import time
from typing import Iterable, NamedTuple

from .dl import DLEngine
from .model import Instance, Task, tasks, validate_instance
from .schedule import Allocation, Schedule, build_schedule


class UnsolvableInstanceError(Exception):
    """Some task demands a class with no capable instance; no cap helps."""

    def __init__(self, violations):
        self.violations = list(violations)
        detail = "; ".join(v.message for v in self.violations)
        super().__init__(f"instance is unsolvable by construction: {detail}")


class SolveTimeout(Exception):
    pass


class OptimizeResult(NamedTuple):
    schedule: Schedule | None
    proven_optimal: bool


class _ProvenOptimal(Exception):
    """Internal: the incumbent matched the root lower bound; stop searching."""


def _ensure_solvable_structure(inst: Instance) -> None:
    violations = validate_instance(inst)
    if not violations:
        return
    used = {o for j in inst.jobs for o in j.operations}
    blocking = [
        v
        for v in violations
        if v.rule == "demand-uncovered"
        or (v.rule == "demand-class-empty" and v.entity[0] in used)
    ]
    others = [v for v in violations if v not in blocking]
    if others:
        raise ValueError(f"invalid instance: {others[0].message}")
    raise UnsolvableInstanceError(blocking)


def _closure(precedence: Iterable[tuple[str, str]]) -> set[tuple[str, str]]:
    succ: dict[str, set[str]] = {}
    for a, b in precedence:
        succ.setdefault(a, set()).add(b)
    out: set[tuple[str, str]] = set()

    def reach(n: str) -> set[str]:
        seen: set[str] = set()
        todo = list(succ.get(n, ()))
        while todo:
            m = todo.pop()
            if m not in seen:
                seen.add(m)
                todo.extend(succ.get(m, ()))
        return seen

    for a in succ:
        for b in reach(a):
            out.add((a, b))
    return out


def _same_job_pairs(inst: Instance) -> list[tuple[Task, Task]]:
    """Same-job task pairs left unordered by the precedence closure."""
    out = []
    for j in inst.jobs:
        rel = _closure(j.precedence)
        ops = sorted(j.operations)
        for i, a in enumerate(ops):
            for b in ops[i + 1:]:
                if (a, b) not in rel and (b, a) not in rel:
                    out.append(((j.name, a), (j.name, b)))
    return sorted(out)


def _shared_instance_pairs(alloc: Allocation) -> list[tuple[Task, Task]]:
    """Cross-job task pairs that compete for at least one chosen instance."""
    users: dict[tuple[str, int], list[Task]] = {}
    for task in sorted(alloc):
        for cls, idx in alloc[task].items():
            users.setdefault((cls, idx), []).append(task)
    pairs: set[tuple[Task, Task]] = set()
    for ts in users.values():
        for i, a in enumerate(ts):
            for b in ts[i + 1:]:
                if a[0] != b[0]:
                    pairs.add((a, b) if a < b else (b, a))
    return sorted(pairs)


def conflict_pairs(inst: Instance, alloc: Allocation) -> set[tuple[Task, Task]]:
    """Every task pair whose order the solver must decide under ``alloc``."""
    return set(_same_job_pairs(inst)) | set(_shared_instance_pairs(alloc))


def _definitely_unsat(inst: Instance, cap: int) -> bool:
    """Cheap necessary conditions: serial job length and class capacity."""
    for j in inst.jobs:
        if sum(inst.duration(o) for o in j.operations) > j.deadline + cap:
            return True
    work: dict[str, list[tuple[int, int]]] = {}
    for j in inst.jobs:
        window = j.deadline + cap
        for o in j.operations:
            for c in inst.demanded(o):
                work.setdefault(c, []).append((window, inst.duration(o)))
    for c, items in work.items():
        count = len(inst.classes.get(c, ()))
        items.sort()
        acc = 0
        for window, dur in items:
            acc += dur
            # everything due within `window` shares `count` instances
            if acc > count * window:
                return True
    return False


class _Search:
    def __init__(
        self,
        inst: Instance,
        cap: int,
        *,
        symmetry_breaking: bool = True,
        deadline: float | None = None,
        backend: str | None = None,
        optimizing: bool = False,
    ):
        self.inst = inst
        self.cap = cap
        self.deadline = deadline
        self.optimizing = optimizing
        self.sym = symmetry_breaking
        self._ticks = 0

        self.all_tasks = tasks(inst)
        self.dur = {t: inst.duration(t[1]) for t in self.all_tasks}
        self.due = {j.name: j.deadline for j in inst.jobs}

        self.eng = DLEngine(backend=backend)
        self.var = {t: self.eng.new_var(t) for t in self.all_tasks}
        self.base_ok = self._assert_base()
        self.root_lb = self._lb() if self.base_ok else 0

        self.same_pairs = _same_job_pairs(inst)
        self._build_groups()
        self.slots = self._build_slots()
        self.alloc: dict[Task, dict[str, int]] = {t: {} for t in self.all_tasks}
        self.load = {r.key: 0 for r in inst.resources}
        self.on_key: dict[tuple[str, int], list[Task]] = {r.key: [] for r in inst.resources}
        # earliest starts implied by precedence alone, for the packing check
        self.release = (
            {t: self.eng.lower_bound(self.var[t]) for t in self.all_tasks}
            if self.base_ok else {}
        )

        self.best_t: int | None = None
        self.best: tuple[dict[Task, int], Allocation] | None = None

    # -- setup ----------------------------------------------------------

    def _assert_base(self) -> bool:
        """Start bounds, per-task caps and precedence; False if contradictory."""
        zero = self.eng.zero
        for t in self.all_tasks:
            if self.eng.assert_upper(zero, self.var[t], 0) is not None:
                return False
            latest = self.due[t[0]] + self.cap - self.dur[t]
            if self.eng.assert_upper(self.var[t], zero, latest) is not None:
                return False
        for j in self.inst.jobs:
            for a, b in sorted(j.precedence):
                va, vb = self.var[(j.name, a)], self.var[(j.name, b)]
                if self.eng.assert_upper(va, vb, -self.inst.duration(a)) is not None:
                    return False
        return True

    def _build_groups(self) -> None:
        """Interchangeable instances: same class and identical capabilities."""
        bykey: dict[tuple[str, tuple[str, ...]], list[int]] = {}
        for r in self.inst.resources:
            bykey.setdefault((r.cls, tuple(sorted(r.capabilities))), []).append(r.index)
        self.groups: list[dict] = []
        self.class_groups: dict[str, list[int]] = {}
        self.group_pos: dict[tuple[str, int], tuple[int, int]] = {}
        for (cls, caps), idxs in sorted(bykey.items()):
            gid = len(self.groups)
            idxs = sorted(idxs)
            self.groups.append({"caps": set(caps), "indices": idxs, "cnt": [0] * len(idxs)})
            self.class_groups.setdefault(cls, []).append(gid)
            for pos, idx in enumerate(idxs):
                self.group_pos[(cls, idx)] = (gid, pos)

    def _build_slots(self) -> list[tuple[Task, str]]:
        """One decision slot per (task, demanded class), hardest jobs first."""

        def key(t: Task) -> tuple:
            branch = 1
            for c in sorted(self.inst.demanded(t[1])):
                branch *= max(1, len(self.inst.capable(c, t[1])))
            return (self.due[t[0]], t[0], branch, t[1])

        slots = []
        for t in sorted(self.all_tasks, key=key):
            for c in sorted(self.inst.demanded(t[1])):
                slots.append((t, c))
        return slots

    # -- shared machinery -----------------------------------------------

    def _tick(self) -> None:
        self._ticks += 1
        if (
            self.deadline is not None
            and (self._ticks & 255) == 0
            and time.monotonic() > self.deadline
        ):
            raise SolveTimeout(f"search deadline exceeded after {self._ticks} steps")

    def _lb(self) -> int:
        """Tardiness lower bound from the earliest starts proven so far."""
        done: dict[str, int] = {}
        for t in self.all_tasks:
            end = self.eng.lower_bound(self.var[t]) + self.dur[t]
            if done.get(t[0], 0) < end:
                done[t[0]] = end
        return sum(max(0, end - self.due[j]) for j, end in done.items())

    # -- allocation search ----------------------------------------------

    def _candidates(self, slot: tuple[Task, str]) -> list[int]:
        (job, op), cls = slot
        if self.sym:
            allowed = []
            for gid in self.class_groups.get(cls, ()):
                g = self.groups[gid]
                if op not in g["caps"]:
                    continue
                open_prefix = sum(1 for c in g["cnt"] if c > 0)
                allowed.extend(g["indices"][: min(open_prefix + 1, len(g["indices"]))])
        else:
            allowed = list(self.inst.capable(cls, op))
        allowed.sort(key=lambda i: (self.load[(cls, i)], i))
        return allowed

    def _apply(self, slot: tuple[Task, str], idx: int) -> None:
        task, cls = slot
        self.alloc[task][cls] = idx
        self.load[(cls, idx)] += self.dur[task]
        self.on_key[(cls, idx)].append(task)
        gid, pos = self.group_pos[(cls, idx)]
        self.groups[gid]["cnt"][pos] += 1

    def _unapply(self, slot: tuple[Task, str], idx: int) -> None:
        task, cls = slot
        del self.alloc[task][cls]
        self.load[(cls, idx)] -= self.dur[task]
        self.on_key[(cls, idx)].pop()
        gid, pos = self.group_pos[(cls, idx)]
        self.groups[gid]["cnt"][pos] -= 1

    def _overloaded(self, key: tuple[str, int]) -> bool:
        """Can the tasks put on one instance still be packed sequentially?

        Tasks sorted by latest finish must fit one after another starting
        from the smallest release seen so far; failing that, no ordering
        search below this allocation can succeed.
        """
        tasks_here = self.on_key[key]
        if len(tasks_here) < 2:
            return False
        windows = sorted(
            (self.due[t[0]] + self.cap, self.release[t], self.dur[t])
            for t in tasks_here
        )
        total = 0
        floor = windows[0][1]
        for latest, rel, dur in windows:
            floor = min(floor, rel)
            total += dur
            if floor + total > latest:
                return True
        return False

    def run(self) -> Schedule | None:
        """Iterate over allocations; each complete one runs the order search."""
        if not self.base_ok or _definitely_unsat(self.inst, self.cap):
            return None
        slots = self.slots
        frames: list[list] = []  # per open slot: [remaining indices, applied index]
        while True:
            if len(frames) == len(slots):
                res = self._alloc_leaf()
                if res is not None:
                    return res
            else:
                frames.append([self._candidates(slots[len(frames)]), None])
            while frames:
                self._tick()
                remaining, applied = frames[-1]
                slot = slots[len(frames) - 1]
                if applied is not None:
                    self._unapply(slot, applied)
                    frames[-1][1] = None
                if remaining:
                    idx = remaining.pop(0)
                    self._apply(slot, idx)
                    if self._overloaded((slot[1], idx)):
                        self._unapply(slot, idx)
                        continue
                    frames[-1][1] = idx
                    break
                frames.pop()
            else:
                return None

    # -- ordering search -------------------------------------------------

    def _alloc_leaf(self) -> Schedule | None:
        pairs = self.same_pairs + _shared_instance_pairs(self.alloc)
        return self._order_dfs(pairs)

    def _earliest(self, t: Task) -> int:
        return self.eng.lower_bound(self.var[t])

    def _pick_pair(self, remaining: set) -> tuple[Task, Task]:
        lows: dict[Task, int] = {}
        for a, b in remaining:
            if a not in lows:
                lows[a] = self._earliest(a)
            if b not in lows:
                lows[b] = self._earliest(b)

        def key(pair):
            a, b = pair
            la, lb = lows[a], lows[b]
            return (min(la, lb), max(la, lb), pair)

        return min(remaining, key=key)

    def _directions(self, pair: tuple[Task, Task]) -> list[tuple[Task, Task]]:
        a, b = pair
        if (self._earliest(a), a) <= (self._earliest(b), b):
            return [(a, b), (b, a)]
        return [(b, a), (a, b)]

    def _assert_before(self, a: Task, b: Task) -> bool:
        return self.eng.assert_upper(self.var[a], self.var[b], -self.dur[a]) is None

    def _promising(self) -> bool:
        if not self.optimizing or self.best_t is None:
            return True
        return self._lb() < self.best_t

    def _order_dfs(self, pairs: list[tuple[Task, Task]]) -> Schedule | None:
        eng = self.eng
        base = eng.level()
        remaining = set(pairs)
        frames: list[list] = []  # per directed pair: [pair, directions left]
        while True:
            if len(frames) == len(pairs):
                res = self._order_leaf()
                if res is not None:
                    while eng.level() > base:
                        eng.pop()
                    return res
                if not frames:
                    return None
                eng.pop()
            else:
                pair = self._pick_pair(remaining)
                remaining.discard(pair)
                frames.append([pair, self._directions(pair)])
            while True:
                self._tick()
                pair, dirs = frames[-1]
                advanced = False
                while dirs:
                    a, b = dirs.pop(0)
                    eng.push()
                    if self._assert_before(a, b) and self._promising():
                        advanced = True
                        break
                    eng.pop()
                if advanced:
                    break
                remaining.add(frames.pop()[0])
                if not frames:
                    return None
                eng.pop()

    def _order_leaf(self) -> Schedule | None:
        sol = self.eng.solution()
        starts = {t: sol[self.var[t]] for t in self.all_tasks}
        if not self.optimizing:
            return build_schedule(self.inst, starts, self.alloc)
        done: dict[str, int] = {}
        for t, s in starts.items():
            end = s + self.dur[t]
            if done.get(t[0], 0) < end:
                done[t[0]] = end
        total = sum(max(0, end - self.due[j]) for j, end in done.items())
        if self.best_t is None or total < self.best_t:
            self.best_t = total
            self.best = (starts, {t: dict(cs) for t, cs in self.alloc.items()})
            if total <= self.root_lb:
                raise _ProvenOptimal
        return None


def decide(
    inst: Instance,
    cap: int,
    *,
    symmetry_breaking: bool = True,
    deadline: float | None = None,
    backend: str | None = None,
) -> Schedule | None:
    """A schedule with every job at most ``cap`` minutes late, or None.

    ``deadline`` is an absolute ``time.monotonic`` value; crossing it raises
    :class:`SolveTimeout`.  None is a proof of exhaustion, not a give-up.
    """
    if cap < 0:
        raise ValueError(f"tardiness cap must be non-negative, got {cap}")
    _ensure_solvable_structure(inst)
    search = _Search(
        inst, cap, symmetry_breaking=symmetry_breaking, deadline=deadline, backend=backend
    )
    return search.run()


def optimize(
    inst: Instance,
    cap: int,
    *,
    symmetry_breaking: bool = True,
    deadline: float | None = None,
    backend: str | None = None,
) -> OptimizeResult:
    """Minimal total tardiness among schedules obeying the per-job cap.

    Runs branch and bound to exhaustion unless ``deadline`` strikes first, in
    which case the best incumbent is returned unproven.
    """
    if cap < 0:
        raise ValueError(f"tardiness cap must be non-negative, got {cap}")
    _ensure_solvable_structure(inst)
    search = _Search(
        inst,
        cap,
        symmetry_breaking=symmetry_breaking,
        deadline=deadline,
        backend=backend,
        optimizing=True,
    )
    proven = True
    try:
        search.run()
    except _ProvenOptimal:
        pass
    except SolveTimeout:
        proven = False
    if search.best is None:
        return OptimizeResult(None, proven)
    starts, alloc = search.best
    return OptimizeResult(build_schedule(inst, starts, alloc), proven)


def start_times_from_order(
    inst: Instance,
    alloc: Allocation,
    before: Iterable[tuple[Task, Task]],
    backend: str | None = None,
) -> Schedule | None:
    """Earliest schedule for fully directed orderings, or None on a cycle.

    ``before`` lists directed pairs (first task completes before the second
    starts); job precedence is added automatically.
    """
    eng = DLEngine(backend=backend)
    var = {t: eng.new_var(t) for t in tasks(inst)}
    for v in var.values():
        eng.assert_upper(eng.zero, v, 0)
    edges: list[tuple[Task, Task]] = []
    for j in inst.jobs:
        for a, b in sorted(j.precedence):
            edges.append(((j.name, a), (j.name, b)))
    for a, b in before:
        if a not in var or b not in var:
            raise ValueError(f"unknown task in ordering: {a if a not in var else b}")
        edges.append((a, b))
    for a, b in edges:
        if eng.assert_upper(var[a], var[b], -inst.duration(a[1])) is not None:
            return None
    sol = eng.solution()
    return build_schedule(inst, {t: sol[v] for t, v in var.items()}, alloc)
