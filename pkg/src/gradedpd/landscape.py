"""Persistence landscapes stored by their critical points.

Level ``k`` of a landscape is the tent-shaped boundary of the support of
``Rank_k``.  Its local maxima and positive local minima are exactly the +1
and -1 points of the graded diagram, read as ``(midpoint, half-width)``, so
a landscape is built directly from a :class:`~gradedpd.grading.GradedDiagram`.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Sequence

from ._numbers import half, simplify
from .grading import GradedDiagram, realizability_check, staircase_decompose
from .modules import Grid, NotRealizableError, SignedDiagram, extend_to_grid

__all__ = [
    "Landscape",
    "StepFunction",
    "landscape_from_graded",
    "landscape_eval",
    "derivative",
    "rho_sum",
    "integrate",
]

Point = tuple  # (t, h)


@dataclass(frozen=True)
class Landscape:
    """``levels[k-1]`` lists the critical points ``(t, h)`` of ``lambda_k`` in order of ``t``.

    Between consecutive points the function is linear; it is zero before
    the first point and after the last.  Every component of the support
    starts and ends with an explicit ``(t, 0)`` point.
    """

    levels: tuple[tuple[Point, ...], ...]

    @property
    def K(self) -> int:
        return len(self.levels)

    def points(self, k: int) -> tuple[Point, ...]:
        if k < 1:
            raise ValueError("levels are numbered from 1")
        return self.levels[k - 1] if k <= self.K else ()

    def graded_level(self, k: int) -> SignedDiagram:
        """Recover ``pd_k`` from the local extrema of level ``k``."""
        pts = self.points(k)
        out: dict[tuple, int] = {}
        for i, (t, h) in enumerate(pts):
            if h == 0:
                continue
            left = pts[i - 1][1] if i else 0
            right = pts[i + 1][1] if i + 1 < len(pts) else 0
            key = (simplify(t - h), simplify(t + h))
            if h > left and h > right:
                out[key] = 1
            elif h < left and h < right:
                out[key] = -1
        return SignedDiagram(out, kind="graded")

    def slopes(self, k: int) -> list:
        pts = self.points(k)
        return [(h1 - h0) / (t1 - t0) for (t0, h0), (t1, h1) in zip(pts, pts[1:])]


def _real_level(level: SignedDiagram, grid: Grid | None) -> SignedDiagram:
    if level.m is None:
        return level
    if grid is None:
        grid = Grid.identity(level.m)
    return extend_to_grid(level, grid)


def _level_points(level: SignedDiagram) -> tuple[Point, ...]:
    verdict = realizability_check(level)
    if not verdict:
        raise NotRealizableError(f"not a graded level: {verdict.message}", cell=verdict.cell)
    pts: list[Point] = []
    for comp in staircase_decompose(level).components:
        chunk = [(comp.start, 0)]
        chunk += [(simplify(half(a + b)), simplify(half(b - a))) for (a, b), _ in comp.signed_points()]
        chunk.append((comp.end, 0))
        if pts and pts[-1] == chunk[0]:
            chunk = chunk[1:]
        pts.extend(chunk)
    return tuple(pts)


def landscape_from_graded(gd: GradedDiagram, grid: Grid | None = None) -> Landscape:
    """Critical points of every level of the landscape.

    ``grid`` places grid-indexed levels on the real line (identity when
    omitted); levels already in real coordinates are used as they are.
    """
    return Landscape(tuple(_level_points(_real_level(lvl, grid)) for lvl in gd.levels))


def landscape_eval(L: Landscape, k: int, t) -> object:
    """``lambda_k(t)`` by linear interpolation between critical points."""
    pts = L.points(k)
    if not pts or t <= pts[0][0] or t >= pts[-1][0]:
        return 0
    ts = [p[0] for p in pts]
    i = bisect.bisect_right(ts, t) - 1
    (t0, h0), (t1, h1) = pts[i], pts[i + 1]
    if t == t0:
        return h0
    return simplify(h0 + (h1 - h0) * (t - t0) / (t1 - t0))


# ---------------------------------------------------------------------------
# Derivative


@dataclass(frozen=True)
class StepFunction:
    """Integer value ``values[i]`` on the open interval ``(breakpoints[i], breakpoints[i+1])``.

    The function is 0 at every breakpoint and outside ``[breakpoints[0], breakpoints[-1]]``.
    """

    breakpoints: tuple
    values: tuple[int, ...]

    def __post_init__(self):
        if self.breakpoints and len(self.values) != len(self.breakpoints) - 1:
            raise ValueError("need one value per gap between breakpoints")
        if any(not x < y for x, y in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    def __call__(self, t) -> int:
        bp = self.breakpoints
        if not bp or t <= bp[0] or t >= bp[-1]:
            return 0
        i = bisect.bisect_left(bp, t)
        if bp[i] == t:
            return 0
        return self.values[i - 1]

    def pieces(self):
        return zip(self.breakpoints, self.breakpoints[1:], self.values)


def derivative(level: SignedDiagram, grid: Grid | None = None) -> StepFunction:
    """``rho_k``: +1 from each component's start to the first midpoint, then
    alternating -1/+1 between successive midpoints, ending with -1 up to the
    component's end."""
    level = _real_level(level, grid)
    bps: list = []
    vals: list[int] = []
    for comp in staircase_decompose(level).components:
        pts = comp.signed_points()
        mids = [simplify(half(a + b)) for (a, b), _ in pts]
        if bps and bps[-1] != comp.start:
            vals.append(0)
        if not bps or bps[-1] != comp.start:
            bps.append(comp.start)
        bps.extend(mids)
        vals.append(1)
        vals.extend(-c for _, c in pts)
        bps.append(comp.end)
    return StepFunction(tuple(bps), tuple(vals))


def rho_sum(level: SignedDiagram, t, grid: Grid | None = None) -> int:
    """The unsimplified sum ``sum_i c_i (chi(a_i, m_i) - chi(m_i, b_i))`` at ``t``."""
    level = _real_level(level, grid)
    total = 0
    for (a, b), c in level.items():
        mid = half(a + b)
        if a < t < mid:
            total += c
        elif mid < t < b:
            total -= c
    return total


def integrate(sf: StepFunction, t) -> object:
    """``integral of sf`` from minus infinity to ``t``."""
    acc = 0
    for left, right, v in sf.pieces():
        if t <= left:
            break
        acc += v * (min(t, right) - left)
    return simplify(acc)


def sample_polylines(L: Landscape) -> list[tuple[int, Sequence[Point]]]:
    """Per-level vertex lists, suitable for plotting as connected polylines."""
    return [(k, L.points(k)) for k in range(1, L.K + 1)]
