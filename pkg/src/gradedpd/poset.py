"""Incidence-algebra primitives on the poset of half-open grid intervals.

The poset is ``{[a, b) : 0 <= a < b <= m + 1}`` ordered by inclusion.  A
function on it is stored as an :class:`IntervalFunction`; the Möbius and
zeta convolutions are the two inverse transforms used everywhere else in
the package (rank function <-> persistence diagram).
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping, NamedTuple

import numpy as np

__all__ = [
    "DENSE_LIMIT",
    "GridInterval",
    "IntervalFunction",
    "mobius_value",
    "mobius_convolve",
    "zeta_convolve",
]

#: Largest ``m`` for which interval functions are stored as dense tables.
DENSE_LIMIT = 4096


class GridInterval(NamedTuple):
    """The half-open interval ``[birth, death)`` on the grid ``0..m+1``."""

    birth: int
    death: int

    def contains(self, other: "GridInterval") -> bool:
        return self.birth <= other.birth and other.death <= self.death

    def check(self, m: int) -> "GridInterval":
        if not (0 <= self.birth < self.death <= m + 1):
            raise ValueError(f"[{self.birth}, {self.death}) is not an interval of [{m + 1}]^2_<")
        return self


class IntervalFunction:
    """An integer-valued function on ``[m+1]^2_<``, zero where unset.

    Values live in an ``(m + 2) x (m + 2)`` integer array indexed by
    ``[birth, death]`` when ``m <= DENSE_LIMIT``; larger grids fall back to
    a dict holding only the nonzero cells.  Cells with ``birth >= death``
    are not part of the domain and always read as 0.
    """

    __slots__ = ("m", "_dense", "_sparse")

    def __init__(self, m: int, values: np.ndarray | Mapping[tuple[int, int], int] | None = None):
        if m < 0:
            raise ValueError("grid size m must be non-negative")
        self.m = m
        self._dense: np.ndarray | None = None
        self._sparse: dict[tuple[int, int], int] | None = None
        n = m + 2
        if isinstance(values, np.ndarray):
            if values.shape != (n, n):
                raise ValueError(f"expected a {(n, n)} table, got {values.shape}")
            if m > DENSE_LIMIT:
                self._sparse = {
                    (int(a), int(b)): int(values[a, b])
                    for a, b in zip(*np.nonzero(np.triu(values, 1)))
                }
            else:
                table = np.triu(np.asarray(values, dtype=np.int64), 1)
                table.setflags(write=False)
                self._dense = table
            return
        items = {} if values is None else dict(values)
        for (a, b), v in items.items():
            GridInterval(a, b).check(m)
        if m > DENSE_LIMIT:
            self._sparse = {(int(a), int(b)): int(v) for (a, b), v in items.items() if v}
        else:
            table = np.zeros((n, n), dtype=np.int64)
            for (a, b), v in items.items():
                table[a, b] = v
            table.setflags(write=False)
            self._dense = table

    @classmethod
    def zeros(cls, m: int) -> "IntervalFunction":
        return cls(m)

    @property
    def is_dense(self) -> bool:
        return self._dense is not None

    def to_array(self) -> np.ndarray:
        """A writable dense copy of the table (upper triangle only)."""
        if self._dense is not None:
            return self._dense.copy()
        table = np.zeros((self.m + 2, self.m + 2), dtype=np.int64)
        for (a, b), v in self._sparse.items():
            table[a, b] = v
        return table

    def __getitem__(self, interval: tuple[int, int]) -> int:
        a, b = interval
        if not (0 <= a < b <= self.m + 1):
            return 0
        if self._dense is not None:
            return int(self._dense[a, b])
        return self._sparse.get((a, b), 0)

    def intervals(self) -> Iterator[GridInterval]:
        """Every interval of the domain, in (birth, death) order."""
        for a in range(self.m + 1):
            for b in range(a + 1, self.m + 2):
                yield GridInterval(a, b)

    def support(self) -> dict[GridInterval, int]:
        if self._dense is not None:
            rows, cols = np.nonzero(self._dense)
            return {GridInterval(int(a), int(b)): int(self._dense[a, b]) for a, b in zip(rows, cols)}
        return {GridInterval(a, b): v for (a, b), v in sorted(self._sparse.items())}

    def max(self) -> int:
        if self._dense is not None:
            return int(self._dense.max(initial=0))
        return max(self._sparse.values(), default=0)

    def min(self) -> int:
        if self._dense is not None:
            return int(self._dense[np.triu_indices(self.m + 2, 1)].min())
        vals = list(self._sparse.values())
        # an implicit zero exists unless every cell is set
        if len(vals) < (self.m + 1) * (self.m + 2) // 2:
            vals.append(0)
        return min(vals)

    def _binary(self, other: "IntervalFunction", op) -> "IntervalFunction":
        if other.m != self.m:
            raise ValueError("interval functions live on different grids")
        if self.is_dense and other.is_dense:
            return IntervalFunction(self.m, op(self._dense, other._dense))
        keys = set(self.support()) | set(other.support())
        return IntervalFunction(self.m, {k: int(op(self[k], other[k])) for k in keys})

    def __add__(self, other: "IntervalFunction") -> "IntervalFunction":
        return self._binary(other, lambda x, y: x + y)

    def __sub__(self, other: "IntervalFunction") -> "IntervalFunction":
        return self._binary(other, lambda x, y: x - y)

    def __neg__(self) -> "IntervalFunction":
        return IntervalFunction.zeros(self.m) - self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalFunction):
            return NotImplemented
        return self.m == other.m and self.support() == other.support()

    def __hash__(self) -> int:
        return hash((self.m, tuple(sorted(self.support().items()))))

    def __repr__(self) -> str:
        return f"IntervalFunction(m={self.m}, support={dict(self.support())})"

    def is_order_reversing(self) -> bool:
        return self.first_order_violation() is None

    def first_order_violation(self) -> GridInterval | None:
        """Return the first cell that is smaller than a cell containing it.

        Covering relations suffice: ``h[a, b) >= h[a-1, b)`` and
        ``h[a, b) >= h[a, b+1)``.  ``None`` means ``h`` is order-reversing.
        """
        for iv in self.intervals():
            v = self[iv]
            a, b = iv
            if (a > 0 and self[a - 1, b] > v) or (b <= self.m and self[a, b + 1] > v):
                return iv
        return None


def mobius_value(lower: tuple[int, int], upper: tuple[int, int]) -> int:
    """Möbius function ``mu(lower, upper)`` of the interval poset.

    Only four intervals ``upper`` containing ``lower = [x, y)`` carry a
    nonzero value: ``[x, y)`` and ``[x-1, y+1)`` give +1, ``[x-1, y)`` and
    ``[x, y+1)`` give -1.
    """
    x, y = lower
    u, v = upper
    if not (x < y and u < v):
        raise ValueError("both arguments must be half-open intervals with birth < death")
    if not (u <= x and y <= v):
        raise ValueError(f"[{x}, {y}) is not contained in [{u}, {v})")
    dx, dy = x - u, v - y
    if dx > 1 or dy > 1:
        return 0
    return 1 if dx == dy else -1


def mobius_convolve(h: IntervalFunction) -> IntervalFunction:
    """``(mu * h)[x, y) = h[x,y) - h[x-1,y) - h[x,y+1) + h[x-1,y+1)``.

    Neighbours outside the grid (``x - 1 < 0`` or ``y + 1 > m + 1``) read
    as 0, which reproduces the three boundary cases of the closed form.
    """
    m = h.m
    if not h.is_dense:
        out: dict[tuple[int, int], int] = {}
        cells = {(a + da, b - db) for (a, b) in h.support() for da in (0, 1) for db in (0, 1)}
        for x, y in cells:
            if 0 <= x < y <= m + 1:
                v = h[x, y] - h[x - 1, y] - h[x, y + 1] + h[x - 1, y + 1]
                if v:
                    out[(x, y)] = v
        return IntervalFunction(m, out)
    n = m + 2
    # padded[x + 1, y] == h[x, y); row 0 and column n stay zero
    padded = np.zeros((n + 1, n + 1), dtype=np.int64)
    padded[1:, :n] = h.to_array()
    left = padded[:n, :n]          # h[x-1, y)
    up = padded[1:, 1:]            # h[x, y+1)
    corner = padded[:n, 1:]        # h[x-1, y+1)
    return IntervalFunction(m, padded[1:, :n] - left - up + corner)


def zeta_convolve(g: IntervalFunction) -> IntervalFunction:
    """``(zeta * g)[x, y) = sum of g[x', y')`` over ``x' <= x`` and ``y' >= y``."""
    m = g.m
    if not g.is_dense:
        support = g.support()
        out: dict[tuple[int, int], int] = {}
        for (s, t), v in support.items():
            for x in range(s, t):
                for y in range(x + 1, t + 1):
                    out[(x, y)] = out.get((x, y), 0) + v
        return IntervalFunction(m, {k: v for k, v in out.items() if v})
    table = g.to_array()
    acc = np.cumsum(table, axis=0)
    acc = np.cumsum(acc[:, ::-1], axis=1)[:, ::-1]
    return IntervalFunction(m, acc)


def from_cells(m: int, cells: Iterable[tuple[tuple[int, int], int]]) -> IntervalFunction:
    """Build an interval function by accumulating ``(interval, value)`` pairs."""
    acc: dict[tuple[int, int], int] = {}
    for iv, v in cells:
        key = (int(iv[0]), int(iv[1]))
        acc[key] = acc.get(key, 0) + int(v)
    return IntervalFunction(m, {k: v for k, v in acc.items() if v})
