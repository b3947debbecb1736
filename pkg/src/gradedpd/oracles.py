"""Slow, independent reference computations and seeded random instances.

Nothing here calls the rank, convolution or matching code it is used to
check: ranks are counted bar by bar, the Möbius function is computed by
its defining recursion, and couplings are enumerated exhaustively.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "RandomModuleSpec",
    "random_barcode",
    "random_signed_diagram",
    "brute_rank",
    "brute_rank_sup",
    "brute_wasserstein",
    "recursive_mobius",
    "brute_mobius_convolve",
    "brute_realizable",
    "downsets",
]

MAX_BRUTE_POINTS = 10


@dataclass(frozen=True)
class RandomModuleSpec:
    """Parameters of a random barcode on ``[m]``.

    The bar count is uniform on ``0..max_bars``; each bar is uniform over
    the ``(m+2)(m+1)/2`` grid intervals; each multiplicity is uniform on
    ``1..max_multiplicity``.
    """

    m: int
    max_bars: int
    max_multiplicity: int = 1
    seed: int = 0


def random_barcode(spec: RandomModuleSpec):
    from .modules import Barcode

    rng = np.random.default_rng(spec.seed)
    cells = [(a, b) for a in range(spec.m + 1) for b in range(a + 1, spec.m + 2)]
    count = int(rng.integers(0, spec.max_bars + 1))
    bars = []
    for _ in range(count):
        a, b = cells[int(rng.integers(len(cells)))]
        bars.append((a, b, int(rng.integers(1, spec.max_multiplicity + 1))))
    return Barcode.from_bars(bars, m=spec.m)


def random_signed_diagram(rng: np.random.Generator, n_points: int, span: int = 8, max_abs: int = 2):
    """Integer-coordinate points with nonzero values in ``[-max_abs, max_abs]``."""
    from .modules import SignedDiagram

    pts = {}
    for _ in range(n_points):
        a = int(rng.integers(0, span))
        b = int(rng.integers(a + 1, span + 1))
        v = int(rng.integers(1, max_abs + 1)) * (1 if rng.random() < 0.5 else -1)
        pts[(a, b)] = pts.get((a, b), 0) + v
    return SignedDiagram(pts)


# ---------------------------------------------------------------------------
# Rank and landscapes


def brute_rank(bars, iota, a, b) -> int:
    """Number of bars ``[iota(s), iota(t))`` containing the real interval ``[a, b)``."""
    return sum(mult for s, t, mult in bars if iota[s] <= a and b <= iota[t])


def brute_rank_sup(bc, grid, k: int, t):
    """``sup {h > 0 : rank over [t-h, t+h) >= k}``, scanning every candidate ``h``.

    The rank only changes where ``t - h`` or ``t + h`` crosses a grid
    coordinate, and containment is closed there, so the supremum is one of
    the candidates ``|t - iota(i)|``.  The end that touches ``iota(i)`` is
    set to ``iota(i)`` itself rather than recomputed as ``t -/+ h``, so that
    floating-point grids do not round it off the grid point.
    """
    iota = list(grid.points)
    bars = [(iv.birth, iv.death, mult) for iv, mult in bc]
    best = 0
    for x in iota:
        h = abs(t - x)
        if not h > best:
            continue
        lo, hi = (x, t + h) if x < t else (t - h, x)
        if brute_rank(bars, iota, lo, hi) >= k:
            best = h
    return best


# ---------------------------------------------------------------------------
# Matchings


def _dist(z, w, q):
    dx, dy = abs(z[0] - w[0]), abs(z[1] - w[1])
    if q == math.inf:
        return max(dx, dy)
    if q == 1:
        return dx + dy
    return (float(dx) ** q + float(dy) ** q) ** (1 / q)


def _to_diag(z, q):
    half = Fraction(z[1] - z[0]) / 2 if isinstance(z[0], (int, Fraction)) else (z[1] - z[0]) / 2
    return _dist((0, 0), (-half, half), q)


def _norm(costs, p):
    if not costs:
        return 0
    if p == math.inf:
        return max(costs)
    if p == 1:
        return sum(costs)
    return sum(float(c) ** p for c in costs) ** (1 / p)


def _expand(D) -> list:
    out = []
    for key, v in D.items():
        if v < 0:
            raise ValueError("brute_wasserstein needs non-negative diagrams")
        out.extend([tuple(key)] * v)
    return out


def brute_wasserstein(D, E, p=1, q=1):
    """Minimum coupling cost over every partial matching of the two point lists."""
    P, Q = _expand(D), _expand(E)
    if len(P) + len(Q) > MAX_BRUTE_POINTS:
        raise ValueError(f"brute force limited to {MAX_BRUTE_POINTS} points in total")
    best = None
    n2 = len(Q)

    def rec(i, used, costs):
        nonlocal best
        if i == len(P):
            total = costs + [_to_diag(Q[j], q) for j in range(n2) if not used >> j & 1]
            c = _norm(total, p)
            if best is None or c < best:
                best = c
            return
        rec(i + 1, used, costs + [_to_diag(P[i], q)])
        for j in range(n2):
            if not used >> j & 1:
                rec(i + 1, used | 1 << j, costs + [_dist(P[i], Q[j], q)])

    rec(0, 0, [])
    return best


# ---------------------------------------------------------------------------
# Incidence algebra by definition


def _contains(outer, inner) -> bool:
    return outer[0] <= inner[0] and inner[1] <= outer[1]


def recursive_mobius(m: int):
    """``mu(I, J)`` for ``I <= J`` from ``mu(I, I) = 1``, ``mu(I, J) = -sum_{I <= K < J} mu(I, K)``."""
    cells = [(a, b) for a in range(m + 1) for b in range(a + 1, m + 2)]

    @lru_cache(maxsize=None)
    def mu(lo, hi):
        if lo == hi:
            return 1
        return -sum(mu(lo, c) for c in cells if _contains(c, lo) and _contains(hi, c) and c != hi)

    return mu, cells


def brute_mobius_convolve(h, m: int) -> dict:
    """``(mu * h)(I) = sum over J containing I of mu(I, J) h(J)``."""
    mu, cells = recursive_mobius(m)
    return {
        c: sum(mu(c, d) * h.get(d, 0) for d in cells if _contains(d, c))
        for c in cells
    }


def downsets(m: int):
    """Every down-set of ``[m+1]^2_<``, as frozensets of cells.

    A down-set is generated by its maximal cells, an antichain; antichains of
    intervals are exactly the chains with strictly increasing births and
    deaths.
    """
    cells = [(a, b) for a in range(m + 1) for b in range(a + 1, m + 2)]
    below = {c: frozenset(d for d in cells if _contains(c, d)) for c in cells}
    out = []

    def rec(start_after, chain):
        gen = frozenset().union(*(below[c] for c in chain)) if chain else frozenset()
        out.append(gen)
        last = chain[-1] if chain else (-1, -1)
        for c in cells:
            if c[0] > last[0] and c[1] > last[1]:
                rec(c, chain + [c])

    rec(None, [])
    return out


def brute_realizable(dk, m: int, _cache={}) -> bool:
    """Does some down-set indicator invert to exactly ``dk`` (a dict of cells)?"""
    if m not in _cache:
        table = []
        for ds in downsets(m):
            inv = brute_mobius_convolve({c: 1 for c in ds}, m)
            table.append(frozenset((c, v) for c, v in inv.items() if v))
        _cache[m] = set(table)
    key = frozenset((tuple(c), v) for c, v in dk.items() if v)
    return key in _cache[m]
