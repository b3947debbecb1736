"""Persistence modules, their rank functions and persistence diagrams.

Two input forms are supported: a :class:`Barcode` (multiset of half-open
grid intervals) and a :class:`MapChain` (explicit linear maps over a finite
field or the rationals).  Both produce a :class:`RankTable`, whose Möbius
inversion is the persistence diagram.  A :class:`Grid` places the discrete
indices ``0..m+1`` on the real line.
"""

from __future__ import annotations

import bisect
from collections import Counter
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from ._numbers import exact, is_exact, simplify
from .poset import GridInterval, IntervalFunction, mobius_convolve

__all__ = [
    "NotRealizableError",
    "Barcode",
    "MapChain",
    "RankTable",
    "Grid",
    "SignedDiagram",
    "ExtendedRank",
    "rank_from_barcode",
    "rank_from_mapchain",
    "diagram_from_rank",
    "extend_to_grid",
]


class NotRealizableError(ValueError):
    """A table or diagram that no persistence module can produce."""

    def __init__(self, message: str, cell=None):
        super().__init__(message)
        self.cell = cell


# ---------------------------------------------------------------------------
# Barcodes


@dataclass(frozen=True)
class Barcode:
    """A multiset of bars ``[birth, death)`` with ``0 <= birth < death <= m+1``."""

    m: int
    bars: tuple[tuple[GridInterval, int], ...] = ()

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("grid size m must be non-negative")
        merged: Counter = Counter()
        for iv, mult in self.bars:
            iv = GridInterval(int(iv[0]), int(iv[1])).check(self.m)
            if int(mult) < 1:
                raise ValueError(f"bar {tuple(iv)} has multiplicity {mult} < 1")
            merged[iv] += int(mult)
        object.__setattr__(self, "bars", tuple(sorted(merged.items())))

    @classmethod
    def from_bars(cls, bars: Iterable[Sequence[int]], m: int | None = None) -> "Barcode":
        """Build from ``(birth, death)`` or ``(birth, death, multiplicity)`` tuples.

        When ``m`` is omitted the smallest grid holding every bar is used.
        """
        items = []
        for bar in bars:
            if len(bar) == 2:
                items.append((GridInterval(int(bar[0]), int(bar[1])), 1))
            elif len(bar) == 3:
                items.append((GridInterval(int(bar[0]), int(bar[1])), int(bar[2])))
            else:
                raise ValueError(f"a bar has 2 or 3 fields, got {bar!r}")
        if m is None:
            m = max((iv.death for iv, _ in items), default=1) - 1
            m = max(m, 0)
        return cls(m, tuple(items))

    @classmethod
    def from_real(cls, bars: Iterable[Sequence]) -> tuple["Barcode", "Grid"]:
        """Index real-valued bars on the grid of their sorted distinct endpoints."""
        items = []
        for bar in bars:
            mult = int(bar[2]) if len(bar) == 3 else 1
            items.append((bar[0], bar[1], mult))
        for s, t, _ in items:
            if not s < t:
                raise ValueError(f"bar [{s}, {t}) is empty")
        values = sorted({simplify(exact(v)) for s, t, _ in items for v in (s, t)})
        if len(values) < 2:
            return cls(0, ()), Grid.identity(0)
        grid = Grid(tuple(values))
        idx = {v: i for i, v in enumerate(values)}
        return (
            cls(grid.m, tuple((GridInterval(idx[simplify(exact(s))], idx[simplify(exact(t))]), k) for s, t, k in items)),
            grid,
        )

    def __iter__(self) -> Iterator[tuple[GridInterval, int]]:
        return iter(self.bars)

    def __len__(self) -> int:
        return sum(k for _, k in self.bars)

    def with_grid(self, m: int) -> "Barcode":
        return Barcode(m, self.bars)

    def to_diagram(self) -> "SignedDiagram":
        return SignedDiagram({tuple(iv): k for iv, k in self.bars}, kind="persistence", m=self.m)


# ---------------------------------------------------------------------------
# Linear-map chains


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def _parse_field(spec) -> int | None:
    """``None`` for the rationals, otherwise the prime characteristic."""
    if spec is None:
        return 2
    if isinstance(spec, int):
        p = spec
    else:
        s = str(spec).strip().upper()
        if s in {"Q", "QQ", "RATIONAL", "RATIONALS"}:
            return None
        if s.startswith("GF(") and s.endswith(")"):
            s = s[3:-1]
        elif s.startswith("Z/"):
            s = s[2:]
        try:
            p = int(s)
        except ValueError:
            raise ValueError(f"unknown field {spec!r}") from None
    if not _is_prime(p):
        raise ValueError(f"GF({p}) is not a field")
    return p


def _matmul(A: list[list], B: list[list], p: int | None, inner: int) -> list[list]:
    rows, cols = len(A), (len(B[0]) if B else 0)
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        Ai = A[i]
        for k in range(inner):
            a = Ai[k]
            if a:
                Bk = B[k]
                row = out[i]
                for j in range(cols):
                    row[j] += a * Bk[j]
        if p is not None:
            out[i] = [x % p for x in out[i]]
    return out


def _rank(M: list[list], p: int | None) -> int:
    """Rank by Gaussian elimination over GF(p), or over Q when ``p`` is None."""
    rows = [list(r) for r in M]
    if not rows or not rows[0]:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        piv = rows[rank][col]
        inv = pow(piv, p - 2, p) if p is not None else 1 / Fraction(piv)
        for r in range(rank + 1, len(rows)):
            f = rows[r][col]
            if f:
                f = f * inv
                if p is not None:
                    rows[r] = [(x - f * y) % p for x, y in zip(rows[r], rows[rank])]
                else:
                    rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


@dataclass(frozen=True)
class MapChain:
    """A persistence module on ``[m]`` given by explicit matrices.

    ``maps[i]`` is the ``dims[i+1] x dims[i]`` matrix of ``M(i <= i+1)``.
    ``field`` is ``"GF(p)"`` for a prime ``p`` (default GF(2)) or ``"Q"``.
    """

    dims: tuple[int, ...]
    maps: tuple
    field: str = "GF(2)"
    _p: int | None = dc_field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        p = _parse_field(self.field)
        object.__setattr__(self, "_p", p)
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 0 for d in dims):
            raise ValueError("dims must be a non-empty sequence of non-negative integers")
        if len(self.maps) != len(dims) - 1:
            raise ValueError(f"expected {len(dims) - 1} maps for {len(dims)} spaces, got {len(self.maps)}")
        conv = (lambda x: int(x) % p) if p is not None else (lambda x: Fraction(x))
        maps = []
        for i, A in enumerate(self.maps):
            rows = [list(r) for r in A]
            if len(rows) != dims[i + 1] or any(len(r) != dims[i] for r in rows):
                raise ValueError(
                    f"map {i} must be {dims[i + 1]}x{dims[i]}, got "
                    f"{len(rows)}x{len(rows[0]) if rows else 0}"
                )
            maps.append(tuple(tuple(conv(x) for x in r) for r in rows))
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "maps", tuple(maps))

    @property
    def m(self) -> int:
        return len(self.dims) - 1

    @classmethod
    def from_barcode(cls, bc: Barcode, field: str = "GF(2)") -> "MapChain":
        """The direct sum of interval modules, one basis vector per bar copy."""
        bars = [iv for iv, k in bc for _ in range(k)]
        members = [[j for j, iv in enumerate(bars) if iv.birth <= i < iv.death] for i in range(bc.m + 1)]
        dims = tuple(len(s) for s in members)
        maps = []
        for i in range(bc.m):
            src, dst = members[i], members[i + 1]
            maps.append(tuple(tuple(1 if d == s else 0 for s in src) for d in dst))
        return cls(dims, tuple(maps), field)


# ---------------------------------------------------------------------------
# Rank tables


@dataclass(frozen=True)
class RankTable:
    """``Rank[a, b) = rank M(a <= b-1)`` on the half-open grid intervals."""

    table: IntervalFunction

    def __post_init__(self):
        if self.table.min() < 0:
            raise ValueError("rank values must be non-negative")

    @property
    def m(self) -> int:
        return self.table.m

    def __getitem__(self, interval: tuple[int, int]) -> int:
        return self.table[interval]

    def max(self) -> int:
        return self.table.max()

    def is_order_reversing(self) -> bool:
        return self.table.is_order_reversing()


def rank_from_barcode(bc: Barcode) -> RankTable:
    """Count, for each ``[a, b)``, the bars ``[s, t)`` with ``s <= a`` and ``t >= b``."""
    n = bc.m + 2
    table = np.zeros((n, n), dtype=np.int64)
    for iv, k in bc:
        table[iv.birth :, : iv.death + 1] += k
    return RankTable(IntervalFunction(bc.m, table))


def rank_from_mapchain(mc: MapChain) -> RankTable:
    """Ranks of all composites ``M(a <= b-1)`` by exact elimination.

    ``Rank[a, a+1)`` is ``dim M(a)``; the column ``b = m+1`` holds the rank
    of ``M(a <= m)``, which is how bars reaching the end of the grid show up.
    """
    m, p = mc.m, mc._p
    one = 1 if p is not None else Fraction(1)
    values: dict[tuple[int, int], int] = {}
    for a in range(m + 1):
        d = mc.dims[a]
        composite = [[one if i == j else 0 * one for j in range(d)] for i in range(d)]
        values[(a, a + 1)] = d
        for b in range(a + 2, m + 2):
            A = mc.maps[b - 2]
            composite = _matmul([list(r) for r in A], composite, p, mc.dims[b - 2])
            r = _rank(composite, p)
            values[(a, b)] = r
            if r == 0:
                break
    return RankTable(IntervalFunction(m, {k: v for k, v in values.items() if v}))


# ---------------------------------------------------------------------------
# Diagrams


class SignedDiagram:
    """A finitely supported integer-valued function on half-open intervals.

    Keys are ``(birth, death)`` pairs, either grid indices (``m`` is set) or
    real coordinates (``m`` is ``None``).  ``kind`` records what the values
    are supposed to be: ``"persistence"`` (non-negative), ``"graded"``
    (values in {-1, 0, 1}) or ``"signed"`` (any integers).
    """

    __slots__ = ("_points", "kind", "m")

    KINDS = ("persistence", "graded", "signed")

    def __init__(self, points: Mapping | Iterable = (), kind: str = "signed", m: int | None = None):
        if kind not in self.KINDS:
            raise ValueError(f"kind must be one of {self.KINDS}")
        acc: dict[tuple, int] = {}
        items = points.items() if isinstance(points, Mapping) else points
        for key, v in items:
            b, d = key
            if not b < d:
                raise ValueError(f"[{b}, {d}) is not a half-open interval with birth < death")
            if m is not None:
                GridInterval(int(b), int(d)).check(m)
                b, d = int(b), int(d)
            else:
                b, d = simplify(b), simplify(d)
            acc[(b, d)] = acc.get((b, d), 0) + int(v)
        self._points = {k: v for k, v in acc.items() if v}
        self.kind = kind
        self.m = m
        if kind == "persistence" and any(v < 0 for v in self._points.values()):
            raise ValueError("a persistence diagram has non-negative values")
        if kind == "graded" and any(v not in (-1, 1) for v in self._points.values()):
            raise ValueError("a graded diagram has values in {-1, 0, 1}")

    @classmethod
    def from_interval_function(cls, h: IntervalFunction, kind: str = "signed") -> "SignedDiagram":
        return cls({tuple(iv): v for iv, v in h.support().items()}, kind=kind, m=h.m)

    def to_interval_function(self) -> IntervalFunction:
        if self.m is None:
            raise ValueError("real-coordinate diagrams have no grid table")
        return IntervalFunction(self.m, self._points)

    def __getitem__(self, key) -> int:
        return self._points.get(tuple(key), 0)

    def __len__(self) -> int:
        return len(self._points)

    def __bool__(self) -> bool:
        return bool(self._points)

    def __iter__(self):
        return iter(sorted(self._points))

    def items(self) -> list[tuple[tuple, int]]:
        """Support points sorted by ``(birth, death)``."""
        return sorted(self._points.items())

    def mass(self) -> int:
        return sum(abs(v) for v in self._points.values())

    def _merge(self, other: "SignedDiagram", sign: int) -> "SignedDiagram":
        if not isinstance(other, SignedDiagram):
            return NotImplemented
        if self.m != other.m:
            raise ValueError("cannot combine diagrams on different grids")
        acc = dict(self._points)
        for k, v in other._points.items():
            acc[k] = acc.get(k, 0) + sign * v
        kind = "persistence" if self.kind == other.kind == "persistence" and sign > 0 else "signed"
        return SignedDiagram(acc, kind=kind, m=self.m)

    def __add__(self, other):
        return self._merge(other, 1)

    def __sub__(self, other):
        return self._merge(other, -1)

    def __neg__(self):
        return SignedDiagram({k: -v for k, v in self._points.items()}, m=self.m)

    def __rmul__(self, c: int):
        kind = self.kind if c > 0 and self.kind == "persistence" else "signed"
        return SignedDiagram({k: c * v for k, v in self._points.items()}, kind=kind, m=self.m)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SignedDiagram):
            return NotImplemented
        return self._points == other._points

    def __hash__(self):
        return hash(tuple(sorted(self._points.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"[{b}, {d}): {v}" for (b, d), v in self.items())
        return f"SignedDiagram({{{body}}}, kind={self.kind!r})"

    def positive(self) -> "SignedDiagram":
        return SignedDiagram({k: v for k, v in self._points.items() if v > 0}, kind="persistence", m=self.m)

    def negative(self) -> "SignedDiagram":
        return SignedDiagram({k: -v for k, v in self._points.items() if v < 0}, kind="persistence", m=self.m)

    def is_nonnegative(self) -> bool:
        return all(v > 0 for v in self._points.values())

    def as_kind(self, kind: str) -> "SignedDiagram":
        return SignedDiagram(self._points, kind=kind, m=self.m)

    def to_real(self) -> "SignedDiagram":
        """Drop the grid tag, keeping the keys as coordinates."""
        return SignedDiagram(self._points, kind=self.kind, m=None)

    def expanded(self) -> list[tuple]:
        """Points repeated by multiplicity; only for non-negative diagrams."""
        if not self.is_nonnegative():
            raise ValueError("expanded() needs a non-negative diagram")
        return [k for k, v in self.items() for _ in range(v)]


def diagram_from_rank(rt: RankTable) -> SignedDiagram:
    """The persistence diagram ``mu * Rank``.

    Raises :class:`NotRealizableError` when the inversion has a negative
    value, i.e. ``rt`` is not the rank function of any module.
    """
    pd = mobius_convolve(rt.table)
    for iv, v in pd.support().items():
        if v < 0:
            raise NotRealizableError(
                f"Möbius inversion is {v} at [{iv.birth}, {iv.death}); not the rank function of a module",
                cell=iv,
            )
    return SignedDiagram.from_interval_function(pd, kind="persistence")


# ---------------------------------------------------------------------------
# Grids and the continuous extension


@dataclass(frozen=True)
class Grid:
    """Strictly increasing real coordinates ``iota(0) < ... < iota(m+1)``."""

    points: tuple

    def __post_init__(self):
        pts = tuple(simplify(exact(x)) for x in self.points)
        if len(pts) < 2:
            raise ValueError("a grid needs at least two points (m >= 0)")
        if any(not x < y for x, y in zip(pts, pts[1:])):
            raise ValueError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def identity(cls, m: int) -> "Grid":
        return cls(tuple(range(m + 2)))

    @property
    def m(self) -> int:
        return len(self.points) - 2

    @property
    def is_rational(self) -> bool:
        return all(is_exact(x) for x in self.points)

    def __call__(self, i: int):
        return self.points[i]

    def __len__(self) -> int:
        return len(self.points)

    def floor_index(self, a) -> int | None:
        """Largest ``i`` with ``iota(i) <= a``."""
        i = bisect.bisect_right(self.points, a) - 1
        return i if i >= 0 else None

    def ceil_index(self, b) -> int | None:
        """Smallest ``j`` with ``iota(j) >= b``."""
        j = bisect.bisect_left(self.points, b)
        return j if j < len(self.points) else None


class ExtendedRank:
    """``Rank`` of the module on the real line, evaluated on ``[a, b)`` with ``a < b``.

    The value is ``Rank[i, j)`` for the largest ``i`` with ``iota(i) <= a``
    and the smallest ``j`` with ``iota(j) >= b``, and 0 if either is missing.
    """

    def __init__(self, rt: RankTable, grid: Grid):
        if rt.m != grid.m:
            raise ValueError(f"rank table has m={rt.m} but grid has m={grid.m}")
        self.rank = rt
        self.grid = grid

    def cell(self, a, b) -> tuple[int, int] | None:
        if not a < b:
            raise ValueError("need a < b")
        i, j = self.grid.floor_index(a), self.grid.ceil_index(b)
        if i is None or j is None:
            return None
        return i, j

    def __call__(self, a, b) -> int:
        c = self.cell(a, b)
        return 0 if c is None else self.rank[c]


def extend_to_grid(d, grid: Grid):
    """Place a grid-indexed diagram or rank table on the real line via ``grid``.

    Diagrams are relabelled point by point; rank tables become an
    :class:`ExtendedRank` evaluator.
    """
    if isinstance(d, RankTable):
        return ExtendedRank(d, grid)
    if isinstance(d, SignedDiagram):
        if d.m is None:
            raise ValueError("diagram already carries real coordinates")
        if d.m != grid.m:
            raise ValueError(f"diagram has m={d.m} but grid has m={grid.m}")
        return SignedDiagram({(grid(b), grid(e)): v for (b, e), v in d.items()}, kind=d.kind)
    raise TypeError(f"cannot extend {type(d).__name__}")
