"""Graded rank functions and graded persistence diagrams.

The rank function is split into tally marks: level ``k`` is the 0/1
function ``Rank >= k``.  Möbius inversion of each level gives a diagram with
values in {-1, 0, 1}; +1 points are the maximal intervals of the level's
support and -1 points are meets of neighbouring maxima.  Summing levels
recovers the rank function and the persistence diagram.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import numpy as np

from .modules import (
    Barcode,
    Grid,
    NotRealizableError,
    RankTable,
    SignedDiagram,
    extend_to_grid,
    rank_from_barcode,
)
from .poset import GridInterval, IntervalFunction, mobius_convolve, zeta_convolve

__all__ = [
    "unary",
    "GradedRank",
    "GradedDiagram",
    "Component",
    "Staircase",
    "Realizability",
    "graded_rank",
    "graded_diagram",
    "staircase_decompose",
    "realizability_check",
    "graded_from_diagram",
]


def unary(n: int, k: int) -> int:
    """``u_k(n)``: 1 when ``n >= k``, else 0."""
    if n < 0 or k < 1:
        raise ValueError("unary needs n >= 0 and k >= 1")
    return 1 if n >= k else 0


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("GPD_THREADS", "1")))
    except ValueError:
        return 1


def _map_levels(fn, items):
    workers = _workers()
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class GradedRank:
    """Levels ``Rank_1 >= Rank_2 >= ... >= Rank_K`` of 0/1 tables."""

    m: int
    levels: tuple[IntervalFunction, ...]

    @property
    def K(self) -> int:
        return len(self.levels)

    def level(self, k: int) -> IntervalFunction:
        """``Rank_k``; identically zero above ``K``."""
        if k < 1:
            raise ValueError("levels are numbered from 1")
        return self.levels[k - 1] if k <= self.K else IntervalFunction.zeros(self.m)

    def total(self) -> IntervalFunction:
        acc = IntervalFunction.zeros(self.m)
        for lvl in self.levels:
            acc = acc + lvl
        return acc


@dataclass(frozen=True)
class GradedDiagram:
    """``pd_1, ..., pd_K``; levels above ``K`` are zero."""

    m: int
    levels: tuple[SignedDiagram, ...]

    @property
    def K(self) -> int:
        return len(self.levels)

    def level(self, k: int) -> SignedDiagram:
        if k < 1:
            raise ValueError("levels are numbered from 1")
        if k <= self.K:
            return self.levels[k - 1]
        return SignedDiagram(kind="graded", m=self.levels[0].m if self.levels else self.m)

    def total(self) -> SignedDiagram:
        acc = SignedDiagram(m=self.levels[0].m if self.levels else self.m)
        for lvl in self.levels:
            acc = acc + lvl
        return acc

    def on_grid(self, grid: Grid) -> "GradedDiagram":
        """Every level relabelled into real coordinates."""
        return GradedDiagram(self.m, tuple(extend_to_grid(lvl, grid) for lvl in self.levels))


def graded_rank(rt: RankTable) -> GradedRank:
    K = rt.max()
    table = rt.table.to_array()
    levels = tuple(IntervalFunction(rt.m, (table >= k).astype(np.int64)) for k in range(1, K + 1))
    return GradedRank(rt.m, levels)


def graded_diagram(gr: GradedRank) -> GradedDiagram:
    """Möbius-invert each level; any value outside {-1, 0, 1} is an error."""

    def invert(args):
        k, lvl = args
        pd_k = mobius_convolve(lvl)
        for iv, v in pd_k.support().items():
            if v not in (-1, 1):
                raise NotRealizableError(
                    f"level {k} inverts to {v} at [{iv.birth}, {iv.death}); the level is not order-reversing",
                    cell=iv,
                )
        return SignedDiagram.from_interval_function(pd_k, kind="graded")

    levels = _map_levels(invert, list(enumerate(gr.levels, start=1)))
    return GradedDiagram(gr.m, tuple(levels))


def graded_from_diagram(D: SignedDiagram) -> GradedDiagram:
    """Graded levels of the module whose persistence diagram is ``D``.

    ``D`` may carry real coordinates; it is indexed on the grid of its own
    endpoints and the levels are returned in those real coordinates.
    """
    if D.m is not None:
        bc = Barcode(D.m, tuple((k, v) for k, v in D.items()))
        return graded_diagram(graded_rank(rank_from_barcode(bc)))
    bc, grid = Barcode.from_real([(b, d, v) for (b, d), v in D.items()])
    return graded_diagram(graded_rank(rank_from_barcode(bc))).on_grid(grid)


# ---------------------------------------------------------------------------
# Staircases


@dataclass(frozen=True)
class Component:
    """One connected piece of a graded level.

    ``maxima`` are the +1 intervals ``[a_j, b_j)`` with strictly increasing
    ends; the -1 intervals are the meets ``[a_{j+1}, b_j)``.
    """

    maxima: tuple[tuple, ...]

    @property
    def meets(self) -> tuple[tuple, ...]:
        return tuple((self.maxima[j + 1][0], self.maxima[j][1]) for j in range(len(self.maxima) - 1))

    @property
    def start(self):
        return self.maxima[0][0]

    @property
    def end(self):
        return self.maxima[-1][1]

    def signed_points(self) -> list[tuple[tuple, int]]:
        """Vertices in staircase order: +max, -meet, +max, ..., +max."""
        out: list[tuple[tuple, int]] = []
        for j, mx in enumerate(self.maxima):
            if j:
                out.append(((mx[0], self.maxima[j - 1][1]), -1))
            out.append((mx, 1))
        return out


@dataclass(frozen=True)
class Staircase:
    components: tuple[Component, ...]
    m: int | None = None
    #: notes on adjacent components that touch (``b_{i,last} == a_{i+1,1}``)
    notes: tuple[str, ...] = field(default=(), compare=False)

    def reconstruct(self) -> SignedDiagram:
        pts: dict[tuple, int] = {}
        for comp in self.components:
            for key, v in comp.signed_points():
                pts[key] = pts.get(key, 0) + v
        return SignedDiagram(pts, kind="graded", m=self.m)


def staircase_decompose(dk: SignedDiagram) -> Staircase:
    """Split a graded level into components of alternating maxima and meets.

    Works on grid indices or real coordinates.  Raises
    :class:`NotRealizableError` unless the +1 points form an antichain and
    the -1 points are exactly the meets of overlapping neighbouring maxima.
    """
    pos = sorted(k for k, v in dk.items() if v == 1)
    neg = {k for k, v in dk.items() if v == -1}
    if any(v not in (-1, 1) for _, v in dk.items()):
        raise NotRealizableError("graded levels only take values -1, 0, 1")
    for (a0, b0), (a1, b1) in zip(pos, pos[1:]):
        if not (a0 < a1 and b0 < b1):
            raise NotRealizableError(
                f"+1 points [{a0}, {b0}) and [{a1}, {b1}) are nested; maxima form an antichain",
                cell=(a1, b1),
            )
    components: list[list[tuple]] = []
    notes: list[str] = []
    used: set[tuple] = set()
    for j, mx in enumerate(pos):
        if j == 0:
            components.append([mx])
            continue
        prev = pos[j - 1]
        meet = (mx[0], prev[1])
        if mx[0] < prev[1]:
            if meet not in neg:
                raise NotRealizableError(
                    f"maxima [{prev[0]}, {prev[1]}) and [{mx[0]}, {mx[1]}) overlap but their meet "
                    f"[{meet[0]}, {meet[1]}) is not a -1 point",
                    cell=meet,
                )
            used.add(meet)
            components[-1].append(mx)
        else:
            if mx[0] == prev[1]:
                notes.append(
                    f"components meet at {mx[0]} (b == a); treated as a boundary between components"
                )
            components.append([mx])
    stray = sorted(neg - used)
    if stray:
        a, b = stray[0]
        raise NotRealizableError(f"-1 point [{a}, {b}) is not the meet of two neighbouring maxima", cell=(a, b))
    stair = Staircase(tuple(Component(tuple(c)) for c in components), m=dk.m, notes=tuple(notes))
    _check_staircase(stair)
    return stair


def _check_staircase(stair: Staircase) -> None:
    maxima = [mx for comp in stair.components for mx in comp.maxima]
    for (a0, b0), (a1, b1) in zip(maxima, maxima[1:]):
        if not (a0 < a1 and b0 < b1):
            raise AssertionError("staircase ends are not strictly increasing")
    for comp in stair.components:
        a, b = comp.maxima[0]
        if not a < b:
            raise AssertionError("empty first interval")
        for (_, bj), (aj1, _) in zip(comp.maxima, comp.maxima[1:]):
            if not aj1 < bj:
                raise AssertionError("meet is not a proper interval")
    for c0, c1 in zip(stair.components, stair.components[1:]):
        if not c0.end <= c1.start:
            raise AssertionError("components overlap")


# ---------------------------------------------------------------------------
# Realizability


@dataclass(frozen=True)
class Realizability:
    ok: bool
    message: str = ""
    cell: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def _compress(dk: SignedDiagram) -> tuple[SignedDiagram, list]:
    """Re-index a real-coordinate diagram on the grid of its coordinates."""
    coords = sorted({x for key in dk for x in key})
    idx = {x: i for i, x in enumerate(coords)}
    m = max(len(coords) - 2, 0)
    return SignedDiagram({(idx[a], idx[b]): v for (a, b), v in dk.items()}, m=m), coords


def realizability_check(dk: SignedDiagram) -> Realizability:
    """Is ``dk`` the Möbius inversion of some 0/1 order-reversing function?

    Decided by the zeta transform: ``zeta * dk`` must be {0, 1}-valued and
    order-reversing.  Real-coordinate diagrams are first re-indexed on the
    grid of their own coordinates, which preserves both properties.
    """
    if not dk:
        return Realizability(True)
    coords = None
    grid_dk = dk
    if dk.m is None:
        grid_dk, coords = _compress(dk)

    def label(cell):
        a, b = cell
        if coords is not None:
            a, b = coords[a], coords[b]
        return (a, b)

    h = zeta_convolve(grid_dk.to_interval_function())
    table = h.to_array()
    iu = np.triu_indices(h.m + 2, 1)
    bad = [(int(a), int(b)) for a, b in zip(*iu) if table[a, b] not in (0, 1)]
    if bad:
        a, b = label(min(bad))
        return Realizability(False, f"zeta transform is {table[min(bad)]} at [{a}, {b})", (a, b))
    viol: GridInterval | None = h.first_order_violation()
    if viol is not None:
        a, b = label(tuple(viol))
        return Realizability(False, f"zeta transform is not order-reversing at [{a}, {b})", (a, b))
    return Realizability(True)
