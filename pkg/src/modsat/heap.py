"""Indexed binary max-heap over variables keyed by activity.

Ties go to the lower variable index so that branching is reproducible.
The heap reads the activity list by reference; callers that raise a key
must call :meth:`update` (uniform rescaling needs no update).
"""
from __future__ import annotations

from typing import Iterable


class VarOrderHeap:
    def __init__(self, activity: list[float], num_vars: int):
        self.activity = activity
        self.heap: list[int] = []
        self.indices = [-1] * num_vars

    def _before(self, a: int, b: int) -> bool:
        act = self.activity
        x, y = act[a], act[b]
        return x > y or (x == y and a < b)

    def __len__(self) -> int:
        return len(self.heap)

    def __contains__(self, v: int) -> bool:
        return self.indices[v] >= 0

    def __getitem__(self, i: int) -> int:
        return self.heap[i]

    def empty(self) -> bool:
        return not self.heap

    def top(self) -> int:
        return self.heap[0]

    def _up(self, i: int) -> None:
        heap, indices = self.heap, self.indices
        v = heap[i]
        while i > 0:
            parent = (i - 1) >> 1
            p = heap[parent]
            if not self._before(v, p):
                break
            heap[i] = p
            indices[p] = i
            i = parent
        heap[i] = v
        indices[v] = i

    def _down(self, i: int) -> None:
        heap, indices = self.heap, self.indices
        n = len(heap)
        v = heap[i]
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            right = child + 1
            if right < n and self._before(heap[right], heap[child]):
                child = right
            c = heap[child]
            if not self._before(c, v):
                break
            heap[i] = c
            indices[c] = i
            i = child
        heap[i] = v
        indices[v] = i

    def insert(self, v: int) -> None:
        if self.indices[v] >= 0:
            return
        self.heap.append(v)
        self.indices[v] = len(self.heap) - 1
        self._up(len(self.heap) - 1)

    def update(self, v: int) -> None:
        """Restore order after the key of ``v`` increased."""
        i = self.indices[v]
        if i >= 0:
            self._up(i)

    def remove_max(self) -> int:
        heap = self.heap
        top = heap[0]
        last = heap.pop()
        self.indices[top] = -1
        if heap:
            heap[0] = last
            self.indices[last] = 0
            self._down(0)
        return top

    def build(self, vars_: Iterable[int]) -> None:
        for v in self.heap:
            self.indices[v] = -1
        self.heap = list(vars_)
        for i, v in enumerate(self.heap):
            self.indices[v] = i
        for i in range(len(self.heap) // 2 - 1, -1, -1):
            self._down(i)

    def check(self) -> bool:
        for i in range(1, len(self.heap)):
            if self._before(self.heap[i], self.heap[(i - 1) >> 1]):
                return False
        return all(self.indices[v] == i for i, v in enumerate(self.heap))
