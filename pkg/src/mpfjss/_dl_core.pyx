# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False

"""Compiled difference-logic kernel.

Observable twin of ``mpfjss._dl_pure.DiffKernel``: same algorithm, same
tie-breaking, same exceptions.  See that module for the algorithm notes.
"""

from libcpp.pair cimport pair
from libcpp.queue cimport priority_queue
from libcpp.vector cimport vector

ctypedef long long i64

cdef i64 _MAX_WEIGHT = (<i64>1) << 40
cdef int _MAX_EDGES = 1 << 21
cdef i64 _PI_FLOOR = -((<i64>1) << 60)
cdef i64 _NEG_INF = -((<i64>1) << 62)

MAX_WEIGHT = _MAX_WEIGHT
MAX_EDGES = _MAX_EDGES


cdef class DiffKernel:
    cdef vector[int] _src
    cdef vector[int] _dst
    cdef vector[i64] _w
    cdef vector[vector[int]] _out
    cdef vector[vector[int]] _in
    cdef vector[i64] _pi
    cdef vector[i64] _low
    cdef vector[int] _marks
    cdef vector[int] _lowmarks
    cdef vector[pair[int, i64]] _lowtrail
    cdef vector[int] _conflict
    cdef vector[i64] _gamma
    cdef vector[int] _gstamp
    cdef vector[int] _fstamp
    cdef vector[int] _parent
    cdef int _stamp
    cdef vector[pair[int, i64]] _changed
    cdef vector[int] _todo

    def __cinit__(self):
        self._out.push_back(vector[int]())
        self._in.push_back(vector[int]())
        self._pi.push_back(0)
        self._low.push_back(0)
        self._gamma.push_back(0)
        self._gstamp.push_back(0)
        self._fstamp.push_back(0)
        self._parent.push_back(0)
        self._stamp = 0

    # --- structure ---------------------------------------------------------

    def add_var(self):
        self._out.push_back(vector[int]())
        self._in.push_back(vector[int]())
        self._pi.push_back(0)
        self._low.push_back(_NEG_INF)
        self._gamma.push_back(0)
        self._gstamp.push_back(0)
        self._fstamp.push_back(0)
        self._parent.push_back(0)
        return self._pi.size() - 1

    def num_vars(self):
        return self._pi.size()

    def num_edges(self):
        return self._src.size()

    def edge(self, eid):
        cdef Py_ssize_t i = eid
        if not 0 <= i < <Py_ssize_t>self._src.size():
            raise IndexError(f"no edge {eid}")
        return (self._src[i], self._dst[i], self._w[i])

    def level(self):
        return self._marks.size()

    def push(self):
        self._marks.push_back(self._src.size())
        self._lowmarks.push_back(self._lowtrail.size())

    def pop(self):
        if self._marks.empty():
            raise IndexError("pop without matching push")
        cdef int mark = self._marks.back()
        cdef int lowmark = self._lowmarks.back()
        self._marks.pop_back()
        self._lowmarks.pop_back()
        cdef int eid
        for eid in range(<int>self._src.size() - 1, mark - 1, -1):
            self._out[self._src[eid]].pop_back()
            self._in[self._dst[eid]].pop_back()
        self._src.resize(mark)
        self._dst.resize(mark)
        self._w.resize(mark)
        cdef int i
        for i in range(<int>self._lowtrail.size() - 1, lowmark - 1, -1):
            self._low[self._lowtrail[i].first] = self._lowtrail[i].second
        self._lowtrail.resize(lowmark)

    # --- queries -----------------------------------------------------------

    def earliest(self, v):
        cdef Py_ssize_t i = v
        if not 0 <= i < <Py_ssize_t>self._low.size():
            raise IndexError(f"unknown variable {v}")
        if self._low[i] == _NEG_INF:
            return None
        return self._low[i]

    def earliest_all(self):
        cdef list out = []
        cdef size_t i
        for i in range(self._low.size()):
            out.append(None if self._low[i] == _NEG_INF else self._low[i])
        return out

    def conflict(self):
        cdef list out = []
        cdef size_t i
        for i in range(self._conflict.size()):
            out.append(self._conflict[i])
        return out

    # --- asserting ---------------------------------------------------------

    def assert_edge(self, u, v, w):
        cdef int ui = u
        cdef int vi = v
        cdef i64 wi = w
        cdef int n = <int>self._pi.size()
        if not (0 <= ui < n and 0 <= vi < n):
            raise IndexError(f"unknown variable in edge ({u}, {v})")
        if not (-_MAX_WEIGHT <= wi <= _MAX_WEIGHT):
            raise OverflowError(f"weight {w} outside +-{_MAX_WEIGHT}")
        if <int>self._src.size() >= _MAX_EDGES:
            raise OverflowError(f"more than {_MAX_EDGES} constraints")
        if ui == vi:
            if wi < 0:
                self._conflict.clear()
                return 1
            self._commit(ui, vi, wi)
            return 0
        cdef i64 slack = self._pi[ui] + wi - self._pi[vi]
        if slack < 0 and not self._relax(ui, vi, wi, slack):
            return 1
        self._commit(ui, vi, wi)
        self._raise_low(ui, vi, wi)
        return 0

    cdef bint _relax(self, int u, int v, i64 w, i64 slack) except? 0:
        self._stamp += 1
        cdef int stamp = self._stamp
        cdef priority_queue[pair[i64, i64]] heap
        cdef pair[i64, i64] top
        cdef i64 g, cand, lowered
        cdef int s, t, eid, cur, pe
        cdef size_t k
        cdef Py_ssize_t back
        self._gamma[v] = slack
        self._gstamp[v] = stamp
        self._parent[v] = -1
        self._changed.clear()
        heap.push(pair[i64, i64](-slack, -<i64>v))
        while not heap.empty():
            top = heap.top()
            heap.pop()
            g = -top.first
            s = <int>(-top.second)
            if self._fstamp[s] == stamp or self._gstamp[s] != stamp or self._gamma[s] != g:
                continue
            lowered = self._pi[s] + g
            if lowered < _PI_FLOOR:
                back = <Py_ssize_t>self._changed.size() - 1
                while back >= 0:
                    self._pi[self._changed[back].first] = self._changed[back].second
                    back -= 1
                raise OverflowError("difference-logic potentials out of range")
            self._fstamp[s] = stamp
            self._changed.push_back(pair[int, i64](s, self._pi[s]))
            self._pi[s] = lowered
            for k in range(self._out[s].size()):
                eid = self._out[s][k]
                t = self._dst[eid]
                if self._fstamp[t] == stamp:
                    continue
                cand = self._pi[s] + self._w[eid] - self._pi[t]
                if cand >= 0:
                    continue
                if t == u:
                    self._conflict.clear()
                    self._conflict.push_back(eid)
                    cur = s
                    while cur != v:
                        pe = self._parent[cur]
                        self._conflict.push_back(pe)
                        cur = self._src[pe]
                    # stored root-first below by reversing in place
                    self._reverse_conflict()
                    back = <Py_ssize_t>self._changed.size() - 1
                    while back >= 0:
                        self._pi[self._changed[back].first] = self._changed[back].second
                        back -= 1
                    return 0
                if self._gstamp[t] != stamp or cand < self._gamma[t]:
                    self._gamma[t] = cand
                    self._gstamp[t] = stamp
                    self._parent[t] = eid
                    heap.push(pair[i64, i64](-cand, -<i64>t))
        return 1

    cdef void _reverse_conflict(self):
        cdef size_t i = 0
        cdef size_t j = self._conflict.size()
        cdef int tmp
        while j > i + 1:
            j -= 1
            tmp = self._conflict[i]
            self._conflict[i] = self._conflict[j]
            self._conflict[j] = tmp
            i += 1

    cdef void _commit(self, int u, int v, i64 w):
        cdef int eid = <int>self._src.size()
        self._src.push_back(u)
        self._dst.push_back(v)
        self._w.push_back(w)
        self._out[u].push_back(eid)
        self._in[v].push_back(eid)

    cdef int _raise_low(self, int u, int v, i64 w) except -1:
        cdef i64 lv = self._low[v]
        if lv == _NEG_INF:
            return 0
        cdef i64 cand = lv - w
        cdef i64 lu = self._low[u]
        if lu != _NEG_INF and cand <= lu:
            return 0
        if u == 0:
            raise RuntimeError("origin lower bound moved; feasibility check missed a cycle")
        self._lowtrail.push_back(pair[int, i64](u, lu))
        self._low[u] = cand
        self._todo.clear()
        self._todo.push_back(u)
        cdef int n, t, eid
        cdef i64 ln, lt
        cdef size_t k
        while not self._todo.empty():
            n = self._todo.back()
            self._todo.pop_back()
            ln = self._low[n]
            for k in range(self._in[n].size()):
                eid = self._in[n][k]
                t = self._src[eid]
                cand = ln - self._w[eid]
                lt = self._low[t]
                if lt == _NEG_INF or cand > lt:
                    if t == 0:
                        raise RuntimeError(
                            "origin lower bound moved; feasibility check missed a cycle"
                        )
                    self._lowtrail.push_back(pair[int, i64](t, lt))
                    self._low[t] = cand
                    self._todo.push_back(t)
        return 0
