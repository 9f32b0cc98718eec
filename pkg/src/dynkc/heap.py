"""Binary min-heap with a reverse index, supporting removal by key."""

from __future__ import annotations


class IndexedMinHeap:
    """Min-heap of ``(priority, key)`` pairs.

    Keys are unique. Ties on priority are broken by the smaller key, so the
    minimum is deterministic.
    """

    __slots__ = ("_data", "_pos")

    def __init__(self):
        self._data: list[tuple[float, int]] = []
        self._pos: dict[int, int] = {}

    def __len__(self):
        return len(self._data)

    def __contains__(self, key):
        return key in self._pos

    def __iter__(self):
        return iter(self._data)

    def keys(self):
        return self._pos.keys()

    def priority(self, key: int) -> float:
        return self._data[self._pos[key]][0]

    def peek(self) -> tuple[float, int]:
        return self._data[0]

    def push(self, priority: float, key: int) -> None:
        if key in self._pos:
            raise KeyError(f"key {key} already in heap")
        self._data.append((priority, key))
        self._pos[key] = len(self._data) - 1
        self._sift_up(len(self._data) - 1)

    def remove(self, key: int) -> float:
        i = self._pos.pop(key)
        item = self._data[i]
        last = self._data.pop()
        if i < len(self._data):
            self._data[i] = last
            self._pos[last[1]] = i
            self._sift_up(i)
            self._sift_down(self._pos[last[1]])
        return item[0]

    def pop(self) -> tuple[float, int]:
        item = self._data[0]
        self.remove(item[1])
        return item

    def is_valid(self) -> bool:
        n = len(self._data)
        for i in range(n):
            if self._pos.get(self._data[i][1]) != i:
                return False
            for c in (2 * i + 1, 2 * i + 2):
                if c < n and self._data[c] < self._data[i]:
                    return False
        return len(self._pos) == n

    def _sift_up(self, i: int) -> None:
        data, pos = self._data, self._pos
        item = data[i]
        while i > 0:
            parent = (i - 1) >> 1
            if data[parent] <= item:
                break
            data[i] = data[parent]
            pos[data[i][1]] = i
            i = parent
        data[i] = item
        pos[item[1]] = i

    def _sift_down(self, i: int) -> None:
        data, pos = self._data, self._pos
        n = len(data)
        item = data[i]
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            if child + 1 < n and data[child + 1] < data[child]:
                child += 1
            if item <= data[child]:
                break
            data[i] = data[child]
            pos[data[i][1]] = i
            i = child
        data[i] = item
        pos[item[1]] = i
