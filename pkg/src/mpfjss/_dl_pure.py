"""Pure-Python difference-logic kernel.

Maintains a set of constraints ``value(v) - value(u) <= w`` over integer
variables (node 0 is the fixed origin) and answers, incrementally, whether the
set is satisfiable.  Infeasible asserts are rejected: the constraint is not
recorded and the offending negative cycle is kept for inspection, so the
stored set is feasible at all times.

Two quantities are maintained across asserts:

* a feasible valuation ``pi`` used to detect negative cycles with a
  Dijkstra-like relaxation seeded at the new edge (each node's value only ever
  decreases, and reduced costs stay non-negative, so every node is finalised
  at most once per assert);
* the strongest derivable lower bound ``low`` of each variable relative to the
  origin, propagated along incoming edges.  ``low`` is exactly the earliest-
  start value in scheduling encodings and is restored on :meth:`pop`.

The compiled backend in ``_dl_core.pyx`` implements the same algorithm with
the same tie-breaking; the two must be observably identical.
"""

from __future__ import annotations

from heapq import heappop, heappush

MAX_WEIGHT = 1 << 40
MAX_EDGES = 1 << 21
_PI_FLOOR = -(1 << 60)
_NEW_EDGE = -1


class DiffKernel:
    __slots__ = (
        "_src", "_dst", "_w", "_out", "_in", "_pi", "_low",
        "_marks", "_lowmarks", "_lowtrail", "_conflict",
        "_gamma", "_gstamp", "_fstamp", "_parent", "_stamp",
    )

    def __init__(self):
        self._src: list[int] = []
        self._dst: list[int] = []
        self._w: list[int] = []
        self._out: list[list[int]] = [[]]
        self._in: list[list[int]] = [[]]
        self._pi: list[int] = [0]
        self._low: list[int | None] = [0]
        self._marks: list[int] = []
        self._lowmarks: list[int] = []
        self._lowtrail: list[tuple[int, int | None]] = []
        self._conflict: list[int] = []
        self._gamma: list[int] = [0]
        self._gstamp: list[int] = [0]
        self._fstamp: list[int] = [0]
        self._parent: list[int] = [0]
        self._stamp = 0

    # --- structure ---------------------------------------------------------

    def add_var(self) -> int:
        self._out.append([])
        self._in.append([])
        self._pi.append(0)
        self._low.append(None)
        self._gamma.append(0)
        self._gstamp.append(0)
        self._fstamp.append(0)
        self._parent.append(0)
        return len(self._pi) - 1

    def num_vars(self) -> int:
        return len(self._pi)

    def num_edges(self) -> int:
        return len(self._src)

    def edge(self, eid: int) -> tuple[int, int, int]:
        return (self._src[eid], self._dst[eid], self._w[eid])

    def level(self) -> int:
        return len(self._marks)

    def push(self) -> None:
        self._marks.append(len(self._src))
        self._lowmarks.append(len(self._lowtrail))

    def pop(self) -> None:
        if not self._marks:
            raise IndexError("pop without matching push")
        mark = self._marks.pop()
        lowmark = self._lowmarks.pop()
        for eid in range(len(self._src) - 1, mark - 1, -1):
            self._out[self._src[eid]].pop()
            self._in[self._dst[eid]].pop()
        del self._src[mark:], self._dst[mark:], self._w[mark:]
        low = self._low
        trail = self._lowtrail
        for i in range(len(trail) - 1, lowmark - 1, -1):
            node, old = trail[i]
            low[node] = old
        del trail[lowmark:]

    # --- queries -----------------------------------------------------------

    def earliest(self, v: int) -> int | None:
        """Strongest lower bound of ``v`` against the origin, or None."""
        return self._low[v]

    def earliest_all(self) -> list[int | None]:
        return list(self._low)

    def conflict(self) -> list[int]:
        """Edge ids of the last rejected assert's cycle, excluding the new edge."""
        return list(self._conflict)

    # --- asserting ---------------------------------------------------------

    def assert_edge(self, u: int, v: int, w: int) -> int:
        """Add ``value(v) - value(u) <= w``.  Returns 0, or 1 on a negative cycle.

        On 1 the kernel is unchanged apart from the recorded conflict.
        """
        n = len(self._pi)
        if not (0 <= u < n and 0 <= v < n):
            raise IndexError(f"unknown variable in edge ({u}, {v})")
        if not (-MAX_WEIGHT <= w <= MAX_WEIGHT):
            raise OverflowError(f"weight {w} outside +-{MAX_WEIGHT}")
        if len(self._src) >= MAX_EDGES:
            raise OverflowError(f"more than {MAX_EDGES} constraints")
        if u == v:
            if w < 0:
                self._conflict = []
                return 1
            self._commit(u, v, w)
            return 0
        pi = self._pi
        slack = pi[u] + w - pi[v]
        if slack < 0 and not self._relax(u, v, w, slack):
            return 1
        self._commit(u, v, w)
        self._raise_low(u, v, w)
        return 0

    def _relax(self, u: int, v: int, w: int, slack: int) -> bool:
        """Lower ``pi`` to absorb the new edge; False (and rollback) on a cycle."""
        self._stamp += 1
        stamp = self._stamp
        pi, out, dst, wts = self._pi, self._out, self._dst, self._w
        gamma, gstamp, fstamp, parent = self._gamma, self._gstamp, self._fstamp, self._parent
        gamma[v] = slack
        gstamp[v] = stamp
        parent[v] = _NEW_EDGE
        heap: list[tuple[int, int]] = [(slack, v)]
        changed: list[tuple[int, int]] = []
        while heap:
            g, s = heappop(heap)
            if fstamp[s] == stamp or gstamp[s] != stamp or gamma[s] != g:
                continue
            lowered = pi[s] + g
            if lowered < _PI_FLOOR:
                for node, old in reversed(changed):
                    pi[node] = old
                raise OverflowError("difference-logic potentials out of range")
            fstamp[s] = stamp
            changed.append((s, pi[s]))
            pi[s] = lowered
            for eid in out[s]:
                t = dst[eid]
                if fstamp[t] == stamp:
                    continue
                cand = pi[s] + wts[eid] - pi[t]
                if cand >= 0:
                    continue
                if t == u:
                    path = [eid]
                    cur = s
                    while cur != v:
                        pe = parent[cur]
                        path.append(pe)
                        cur = self._src[pe]
                    self._conflict = path[::-1]
                    for node, old in reversed(changed):
                        pi[node] = old
                    return False
                if gstamp[t] != stamp or cand < gamma[t]:
                    gamma[t] = cand
                    gstamp[t] = stamp
                    parent[t] = eid
                    heappush(heap, (cand, t))
        return True

    def _commit(self, u: int, v: int, w: int) -> None:
        eid = len(self._src)
        self._src.append(u)
        self._dst.append(v)
        self._w.append(w)
        self._out[u].append(eid)
        self._in[v].append(eid)

    def _raise_low(self, u: int, v: int, w: int) -> None:
        """Propagate origin-relative lower bounds along the new edge."""
        low = self._low
        lv = low[v]
        if lv is None:
            return
        cand = lv - w
        lu = low[u]
        if lu is not None and cand <= lu:
            return
        if u == 0:
            raise RuntimeError("origin lower bound moved; feasibility check missed a cycle")
        trail = self._lowtrail
        trail.append((u, lu))
        low[u] = cand
        todo = [u]
        src, in_, wts = self._src, self._in, self._w
        while todo:
            n = todo.pop()
            ln = low[n]
            for eid in in_[n]:
                t = src[eid]
                cand = ln - wts[eid]
                lt = low[t]
                if lt is None or cand > lt:
                    if t == 0:
                        raise RuntimeError(
                            "origin lower bound moved; feasibility check missed a cycle"
                        )
                    trail.append((t, lt))
                    low[t] = cand
                    todo.append(t)
