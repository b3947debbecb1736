"""Wasserstein distances between (signed) persistence diagrams.

Diagrams are matched point-to-point or point-to-diagonal, where a point
``(x, y)`` always meets the diagonal at its midpoint projection.  The finite
problem is an assignment on an augmented square cost matrix with one
diagonal slot per point.  ``p = 1`` with ``q`` in {1, inf} and rational
coordinates is solved and reported exactly as a ``Fraction``; other
parameters use binary64.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from ._numbers import TOL, exact, half, is_exact, simplify
from .grading import _map_levels, graded_from_diagram
from .modules import SignedDiagram

__all__ = [
    "CostParams",
    "Coupling",
    "coupling_cost",
    "wasserstein",
    "signed_wasserstein",
    "is_metric",
    "TriangleReport",
    "triangle_counterexample",
    "Segment",
    "GeodesicPath",
    "coordinate_geodesic_path",
    "StabilityReport",
    "verify_stability",
]

INF = math.inf


def _parse_exponent(v) -> float | int:
    if isinstance(v, str):
        s = v.strip().lower()
        if s in {"inf", "infinity", "oo"}:
            return INF
        v = float(s)
    if v == INF:
        return INF
    if v < 1:
        raise ValueError(f"exponent must lie in [1, inf], got {v}")
    return int(v) if float(v).is_integer() else float(v)


@dataclass(frozen=True)
class CostParams:
    """Outer exponent ``p`` and ground-norm exponent ``q``, each in ``[1, inf]``."""

    p: float = 1
    q: float = 1

    def __post_init__(self):
        object.__setattr__(self, "p", _parse_exponent(self.p))
        object.__setattr__(self, "q", _parse_exponent(self.q))

    @property
    def exact(self) -> bool:
        """Costs and totals stay rational for rational inputs."""
        return self.q in (1, INF) and self.p in (1, INF)


def is_metric(cp: CostParams) -> bool:
    """Only ``p = 1`` gives a metric on signed diagrams."""
    return cp.p == 1


def qnorm(dx, dy, q):
    dx, dy = abs(dx), abs(dy)
    if q == 1:
        return dx + dy
    if q == INF:
        return max(dx, dy)
    return (float(dx) ** q + float(dy) ** q) ** (1.0 / q)


def pnorm(values, p):
    values = list(values)
    if not values:
        return 0
    if p == 1:
        return simplify(sum(values))
    if p == INF:
        return simplify(max(values))
    return math.fsum(float(v) ** p for v in values) ** (1.0 / p)


def diagonal_projection(z: tuple) -> tuple:
    mid = simplify(half(z[0] + z[1]))
    return (mid, mid)


def on_diagonal(z: tuple) -> bool:
    return z[0] == z[1]


def pair_cost(z: tuple, w: tuple, q) -> object:
    return simplify(qnorm(w[0] - z[0], w[1] - z[1], q)) if q in (1, INF) else qnorm(w[0] - z[0], w[1] - z[1], q)


@dataclass(frozen=True)
class Coupling:
    """A matching stored as ``(source, target, multiplicity)`` triples.

    A diagonal partner is stored as the midpoint projection ``(c, c)``.
    """

    pairs: tuple[tuple[tuple, tuple, int], ...]
    params: CostParams = field(default_factory=CostParams)

    def cost(self):
        return coupling_cost(self)

    def source_marginal(self) -> SignedDiagram:
        return SignedDiagram(_tally((z, k) for z, _, k in self.pairs if not on_diagonal(z)))

    def target_marginal(self) -> SignedDiagram:
        return SignedDiagram(_tally((w, k) for _, w, k in self.pairs if not on_diagonal(w)))

    def check(self, D: SignedDiagram, E: SignedDiagram) -> None:
        """Raise ``AssertionError`` unless this is a valid coupling of ``D`` and ``E``."""
        for z, w, k in self.pairs:
            assert k > 0, "multiplicities are positive"
            assert not (on_diagonal(z) and on_diagonal(w)), "diagonal matched to diagonal"
            if on_diagonal(w):
                assert w == diagonal_projection(z), f"{w} is not the projection of {z}"
            if on_diagonal(z):
                assert z == diagonal_projection(w), f"{z} is not the projection of {w}"
        assert self.source_marginal() == D.to_real(), "source marginal differs from D"
        assert self.target_marginal() == E.to_real(), "target marginal differs from E"


def _tally(items) -> dict:
    acc: dict = {}
    for key, k in items:
        acc[key] = acc.get(key, 0) + k
    return acc


def coupling_cost(c: Coupling):
    """p-norm of the q-distances, each pair counted with multiplicity."""
    costs = []
    for z, w, k in c.pairs:
        costs.extend([pair_cost(z, w, c.params.q)] * k)
    return pnorm(costs, c.params.p)


def _points(D: SignedDiagram) -> list[tuple]:
    return D.to_real().expanded()


def _cost_matrix(P: list, Q: list, q) -> list[list]:
    n1, n2 = len(P), len(Q)
    N = n1 + n2
    dP = [pair_cost(z, diagonal_projection(z), q) for z in P]
    dQ = [pair_cost(diagonal_projection(w), w, q) for w in Q]
    C = [[0] * N for _ in range(N)]
    for i, z in enumerate(P):
        row = C[i]
        for j, w in enumerate(Q):
            row[j] = pair_cost(z, w, q)
        for j in range(n2, N):
            row[j] = dP[i]
    for i in range(n1, N):
        row = C[i]
        for j in range(n2):
            row[j] = dQ[j]
    return C


def _as_float_matrix(C: list[list]) -> np.ndarray:
    """Scale rational costs to integers so the float solve is exact."""
    flat = [x for row in C for x in row]
    if flat and all(is_exact(x) for x in flat):
        denom = reduce(math.lcm, (Fraction(x).denominator for x in flat), 1)
        ints = [[int(Fraction(x) * denom) for x in row] for row in C]
        if sum(max(r) for r in ints) >= 2**53:
            raise OverflowError("rational costs too large for an exact solve")
        return np.array(ints, dtype=np.float64)
    return np.array([[float(x) for x in row] for row in C], dtype=np.float64)


def _assignment_to_coupling(P, Q, rows, cols, cp: CostParams) -> Coupling:
    n1, n2 = len(P), len(Q)
    pairs: Counter = Counter()
    for i, j in zip(rows, cols):
        i, j = int(i), int(j)
        if i < n1 and j < n2:
            pairs[(P[i], Q[j])] += 1
        elif i < n1:
            pairs[(P[i], diagonal_projection(P[i]))] += 1
        elif j < n2:
            pairs[(diagonal_projection(Q[j]), Q[j])] += 1
    return Coupling(tuple((z, w, k) for (z, w), k in sorted(pairs.items())), cp)


def _bottleneck(C: list[list]) -> tuple[np.ndarray, np.ndarray]:
    N = len(C)
    candidates = sorted({x for row in C for x in row})
    lo, hi = 0, len(candidates) - 1
    best = None

    def feasible(thr):
        rr, cc = [], []
        for i, row in enumerate(C):
            for j, x in enumerate(row):
                if x <= thr:
                    rr.append(i)
                    cc.append(j)
        graph = csr_matrix((np.ones(len(rr)), (rr, cc)), shape=(N, N))
        match = maximum_bipartite_matching(graph, perm_type="column")
        return match if (match >= 0).all() else None

    while lo <= hi:
        mid = (lo + hi) // 2
        match = feasible(candidates[mid])
        if match is not None:
            best = match
            hi = mid - 1
        else:
            lo = mid + 1
    return np.arange(N), best


def wasserstein(D: SignedDiagram, E: SignedDiagram, cp: CostParams | None = None):
    """``W_{p,q}(D, E)`` and an optimal coupling for non-negative diagrams."""
    cp = cp or CostParams()
    if not (D.is_nonnegative() and E.is_nonnegative()):
        raise ValueError("wasserstein needs non-negative diagrams; use signed_wasserstein")
    P, Q = _points(D), _points(E)
    N = len(P) + len(Q)
    if N == 0:
        return 0, Coupling((), cp)
    if cp.p == INF:
        C = _cost_matrix(P, Q, cp.q)
        rows, cols = _bottleneck(C)
    else:
        C = _cost_matrix(P, Q, cp.q)
        if cp.p != 1:
            C = [[float(x) ** cp.p for x in row] for row in C]
        rows, cols = linear_sum_assignment(_as_float_matrix(C))
    coupling = _assignment_to_coupling(P, Q, rows, cols, cp)
    return coupling.cost(), coupling


def _split(A: SignedDiagram, B: SignedDiagram) -> tuple[SignedDiagram, SignedDiagram]:
    A, B = A.to_real(), B.to_real()
    return A.positive() + B.negative(), B.positive() + A.negative()


def signed_wasserstein(A: SignedDiagram, B: SignedDiagram, cp: CostParams | None = None):
    """``W(A, B) = W(A+ + B-, B+ + A-)``; a metric only for ``p = 1``."""
    X, Y = _split(A, B)
    return wasserstein(X, Y, cp)


# ---------------------------------------------------------------------------
# Triangle inequality failure for p > 1


@dataclass
class TriangleReport:
    eps: object
    k: int
    params: CostParams
    d_DF: float
    d_DE: float
    d_EF: float
    closed_DF: float
    closed_DE: float
    closed_EF: float
    norm11_p: float
    matches_closed_forms: bool
    violated: bool

    @property
    def margin(self) -> float:
        return float(self.d_DF) - float(self.d_DE) - float(self.d_EF)

    def to_dict(self) -> dict:
        return {
            "eps": float(self.eps),
            "k": self.k,
            "p": self.params.p,
            "q": self.params.q,
            "W(D_k,F_k)": float(self.d_DF),
            "W(D_k,E_k)": float(self.d_DE),
            "W(E_k,F_k)": float(self.d_EF),
            "closed_forms": [float(self.closed_DF), float(self.closed_DE), float(self.closed_EF)],
            "norm(1,1)_p": float(self.norm11_p),
            "matches_closed_forms": self.matches_closed_forms,
            "triangle_violated": self.violated,
            "margin": self.margin,
        }


def _graded_level(bars, k: int) -> SignedDiagram:
    D = SignedDiagram(_tally(((b, d), mult) for b, d, mult in bars), kind="persistence")
    return graded_from_diagram(D).level(k).to_real()


def triangle_counterexample(eps, k: int = 1, cp: CostParams | None = None) -> TriangleReport:
    """Three diagrams whose ``k``-th graded levels break the triangle inequality for ``p > 1``."""
    cp = cp or CostParams(2, 2)
    if cp.p == 1:
        raise ValueError("the triangle inequality holds for p = 1; no counterexample exists")
    if k < 1:
        raise ValueError("k must be positive")
    eps = exact(eps) if is_exact(eps) else Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    pad = [(0, 12, k - 1)] if k > 1 else []
    D = [(0, 10, 1)] + pad
    F = [(2, 10 + 2 * eps, 1)] + pad
    E = [(0, 10, 1), (1, 10 + eps, 1), (2, 10 + 2 * eps, 1)] + pad
    Dk, Ek, Fk = (_graded_level(bars, k) for bars in (D, E, F))
    d_DF = signed_wasserstein(Dk, Fk, cp)[0]
    d_DE = signed_wasserstein(Dk, Ek, cp)[0]
    d_EF = signed_wasserstein(Ek, Fk, cp)[0]
    closed_DF = 2 * qnorm(1, eps, cp.q)
    closed_DE = eps * pnorm([1, 1], cp.p)
    closed_EF = pnorm([1, 1], cp.p)
    matches = all(
        abs(float(x) - float(y)) <= TOL for x, y in ((d_DF, closed_DF), (d_DE, closed_DE), (d_EF, closed_EF))
    )
    return TriangleReport(
        eps=eps,
        k=k,
        params=cp,
        d_DF=d_DF,
        d_DE=d_DE,
        d_EF=d_EF,
        closed_DF=closed_DF,
        closed_DE=closed_DE,
        closed_EF=closed_EF,
        norm11_p=pnorm([1, 1], cp.p),
        matches_closed_forms=matches,
        violated=float(d_DF) > float(d_DE) + float(d_EF),
    )


# ---------------------------------------------------------------------------
# Coordinate geodesics


@dataclass(frozen=True)
class Segment:
    """One coordinate move of one point.

    ``kind`` is ``"birth"`` or ``"death"`` (slide one coordinate),
    ``"collapse"`` (slide the birth up to the death, then vanish) or
    ``"grow"`` (the reverse of a collapse).  ``before``/``after`` are the
    point at either end; ``None`` stands for "absent".
    """

    kind: str
    before: tuple | None
    after: tuple | None
    length: object

    def at(self, u):
        """The moving point at fraction ``u`` in ``[0, 1]`` of the segment."""
        if self.kind == "birth":
            (x, y), (z, _) = self.before, self.after
            return (simplify(x + (z - x) * u), y)
        if self.kind == "death":
            (x, y), (_, w) = self.before, self.after
            return (x, simplify(y + (w - y) * u))
        if self.kind == "collapse":
            if u >= 1:
                return None
            x, y = self.before
            return (simplify(x + (y - x) * u), y)
        if self.kind == "grow":
            if u <= 0:
                return None
            z, w = self.after
            return (simplify(w - (w - z) * u), w)
        raise ValueError(self.kind)


@dataclass(frozen=True)
class GeodesicPath:
    """Concatenated coordinate moves from ``start`` to the other diagram."""

    start: SignedDiagram
    segments: tuple[Segment, ...]

    @property
    def length(self):
        return simplify(sum((s.length for s in self.segments), 0))

    def __call__(self, t) -> SignedDiagram:
        if t < 0 or t > self.length:
            raise ValueError(f"t={t} outside [0, {self.length}]")
        state: Counter = Counter(dict(self.start.to_real().items()))
        elapsed = 0
        for seg in self.segments:
            if t >= elapsed + seg.length:
                _move(state, seg.before, seg.after)
                elapsed += seg.length
                continue
            u = (t - elapsed) / seg.length
            if is_exact(u):
                u = Fraction(u)
            _move(state, seg.before, seg.at(u))
            break
        return SignedDiagram({k: v for k, v in state.items() if v}, kind="persistence")


def _move(state: Counter, before, after) -> None:
    if before is not None:
        state[before] -= 1
        if not state[before]:
            del state[before]
    if after is not None:
        state[after] += 1


def coordinate_geodesic_path(D: SignedDiagram, E: SignedDiagram) -> GeodesicPath:
    """A ``W_{1,1}`` geodesic from ``D`` to ``E`` built from an optimal coupling.

    Every matched pair contributes a birth slide and a death slide (whichever
    keeps the bar non-empty goes first); points matched to the diagonal
    collapse, and points of ``E`` matched from the diagonal grow.
    """
    _, coupling = wasserstein(D, E, CostParams(1, 1))
    moves: list[Segment] = []
    collapses: list[Segment] = []
    grows: list[Segment] = []
    for z, w, k in coupling.pairs:
        for _ in range(k):
            if on_diagonal(w):
                collapses.append(Segment("collapse", z, None, simplify(z[1] - z[0])))
            elif on_diagonal(z):
                grows.append(Segment("grow", None, w, simplify(w[1] - w[0])))
            else:
                (x, y), (zb, wd) = z, w
                mid_birth = (zb, y)
                mid_death = (x, wd)
                if zb < y:
                    steps = [("birth", z, mid_birth, abs(zb - x)), ("death", mid_birth, w, abs(wd - y))]
                else:
                    steps = [("death", z, mid_death, abs(wd - y)), ("birth", mid_death, w, abs(zb - x))]
                moves.extend(Segment(kind, a, b, simplify(n)) for kind, a, b, n in steps if n)
    return GeodesicPath(D.to_real(), tuple(moves + collapses + grows))


# ---------------------------------------------------------------------------
# Stability


@dataclass
class StabilityReport:
    K: int
    W: object
    level_distances: list
    level_bounds: list
    sum_levels: object
    upper_bound: object
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def ratios(self) -> list:
        if self.W == 0:
            return [None] * len(self.level_distances)
        return [simplify(exact(w) / exact(self.W)) if is_exact(w) else w / self.W for w in self.level_distances]

    def to_dict(self) -> dict:
        def num(x):
            if x is None:
                return None
            return int(x) if is_exact(x) and Fraction(x).denominator == 1 else float(x)

        return {
            "K": self.K,
            "W": num(self.W),
            "level_distances": [num(x) for x in self.level_distances],
            "ratios": [num(x) for x in self.ratios],
            "level_bounds": [num(x) for x in self.level_bounds],
            "sum_levels": num(self.sum_levels),
            "upper_bound": num(self.upper_bound),
            "checks": dict(self.checks),
            "ok": self.ok,
        }


def verify_stability(D: SignedDiagram, E: SignedDiagram) -> StabilityReport:
    """Check the level-wise and summed ``W_{1,1}`` stability bounds for one pair."""
    cp = CostParams(1, 1)
    gD, gE = graded_from_diagram(D), graded_from_diagram(E)
    K = max(gD.K, gE.K)
    W = wasserstein(D.to_real(), E.to_real(), cp)[0]
    dists = _map_levels(
        lambda k: signed_wasserstein(gD.level(k).to_real(), gE.level(k).to_real(), cp)[0],
        list(range(1, K + 1)),
    )
    bounds = [2 * W if k < K else W for k in range(1, K + 1)]
    total = simplify(sum(dists, 0))
    upper = (2 * K - 1) * W if K else 0
    checks = {
        "level_bounds": all(d <= b for d, b in zip(dists, bounds)),
        "above_K_zero": not gD.level(K + 1) and not gE.level(K + 1),
        "lower_sum_bound": W <= total,
        "upper_sum_bound": total <= upper,
    }
    return StabilityReport(K, W, list(dists), bounds, total, upper, checks)
