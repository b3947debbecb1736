"""Seeded property sweeps behind ``gpd verify``.

Each suite returns a JSON-ready dict with an ``ok`` flag and, on failure,
the seed of every offending instance.
"""

from __future__ import annotations

import numpy as np

from ._numbers import TOL
from .grading import graded_diagram, graded_rank, staircase_decompose
from .modules import Barcode, SignedDiagram, diagram_from_rank, rank_from_barcode
from .oracles import RandomModuleSpec, random_barcode
from .poset import mobius_convolve, zeta_convolve
from .transport import CostParams, coordinate_geodesic_path, triangle_counterexample, verify_stability, wasserstein

__all__ = [
    "sharp_family",
    "consistency_suite",
    "stability_suite",
    "sharp_stability_suite",
    "triangle_suite",
    "geodesic_suite",
]


def _sub_seeds(seed: int, count: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count, dtype=np.uint32)]


def sharp_family(K: int) -> tuple[SignedDiagram, SignedDiagram]:
    """The pair attaining every stability bound: shared bars plus ``[K, 3K)`` vs ``[K+1, 3K)``."""
    if K < 1:
        raise ValueError("K must be positive")
    shared = {(i, 2 * K + i): 1 for i in range(1, K)}
    D = SignedDiagram({**shared, (K, 3 * K): 1}, kind="persistence")
    E = SignedDiagram({**shared, (K + 1, 3 * K): 1}, kind="persistence")
    return D, E


def check_consistency(bc: Barcode) -> list[str]:
    """Every consistency identity and staircase property that must hold for ``bc``."""
    problems = []
    rank = rank_from_barcode(bc)
    pd = diagram_from_rank(rank)
    gr = graded_rank(rank)
    gd = graded_diagram(gr)
    if gr.total() != rank.table:
        problems.append("sum of graded ranks differs from the rank function")
    if gd.total() != pd:
        problems.append("sum of graded diagrams differs from the persistence diagram")
    if zeta_convolve(pd.to_interval_function()) != rank.table:
        problems.append("zeta * pd != Rank")
    for k, (lvl, dk) in enumerate(zip(gr.levels, gd.levels), start=1):
        if zeta_convolve(dk.to_interval_function()) != lvl:
            problems.append(f"zeta * pd_{k} != Rank_{k}")
        if mobius_convolve(lvl) != dk.to_interval_function():
            problems.append(f"mu * Rank_{k} != pd_{k}")
        if any(v not in (-1, 1) for _, v in dk.items()):
            problems.append(f"pd_{k} has values outside {{-1, 0, 1}}")
        stair = staircase_decompose(dk)
        if stair.reconstruct() != dk:
            problems.append(f"staircase of pd_{k} does not reconstruct it")
        n_pos = sum(1 for _, v in dk.items() if v > 0)
        n_neg = sum(1 for _, v in dk.items() if v < 0)
        if n_neg != n_pos - len(stair.components):
            problems.append(f"pd_{k}: #(-1) != #(+1) - components")
    return problems


def consistency_suite(seed: int = 0, count: int = 100, m: int = 10, max_bars: int = 20, max_mult: int = 2) -> dict:
    failures = []
    for s in _sub_seeds(seed, count):
        bc = random_barcode(RandomModuleSpec(m, max_bars, max_mult, s))
        problems = check_consistency(bc)
        if problems:
            failures.append({"seed": s, "problems": problems})
    return {"suite": "consistency", "seed": seed, "count": count, "failures": failures, "ok": not failures}


def _random_pair(s: int, m: int, max_bars: int, max_mult: int) -> tuple[SignedDiagram, SignedDiagram]:
    a, b = _sub_seeds(s, 2)
    D = random_barcode(RandomModuleSpec(m, max_bars, max_mult, a)).to_diagram().to_real()
    E = random_barcode(RandomModuleSpec(m, max_bars, max_mult, b)).to_diagram().to_real()
    return D, E


def stability_suite(seed: int = 0, count: int = 100, m: int = 12, max_bars: int = 20, max_mult: int = 2) -> dict:
    instances, failures = [], []
    for s in _sub_seeds(seed, count):
        D, E = _random_pair(s, m, max_bars, max_mult)
        rep = verify_stability(D, E)
        entry = {"seed": s, **rep.to_dict()}
        instances.append(entry)
        if not rep.ok:
            failures.append(entry)
    return {
        "suite": "stability",
        "seed": seed,
        "count": count,
        "instances": instances,
        "failures": failures,
        "ok": not failures,
    }


def sharp_stability_suite(K: int) -> dict:
    D, E = sharp_family(K)
    rep = verify_stability(D, E)
    expected = [2] * (K - 1) + [1]
    sharp_levels = rep.W == 1 and rep.level_distances == expected
    sharp_sum = rep.sum_levels == rep.upper_bound
    out = {"suite": "stability", "sharp_K": K, **rep.to_dict()}
    out["sharp"] = {"level_bounds_attained": sharp_levels, "upper_sum_bound_attained": sharp_sum}
    out["ok"] = rep.ok and sharp_levels and sharp_sum
    return out


def triangle_suite(eps, p, q, k: int = 1) -> dict:
    rep = triangle_counterexample(eps, k, CostParams(p, q))
    out = {"suite": "triangle", **rep.to_dict()}
    out["ok"] = rep.matches_closed_forms and rep.violated
    return out


def geodesic_suite(seed: int = 0, count: int = 20, samples: int = 10, m: int = 8, max_bars: int = 6) -> dict:
    failures = []
    worst = 0.0
    for s in _sub_seeds(seed, count):
        D, E = _random_pair(s, m, max_bars, 1)
        path = coordinate_geodesic_path(D, E)
        tau = path.length
        rng = np.random.default_rng(s)
        for _ in range(samples):
            u, v = sorted(rng.random(2))
            t0, t1 = u * float(tau), v * float(tau)
            d = wasserstein(path(t0), path(t1), CostParams(1, 1))[0]
            err = abs(float(d) - (t1 - t0))
            worst = max(worst, err)
            if err > TOL:
                failures.append({"seed": s, "s": t0, "t": t1, "W": float(d)})
        if wasserstein(D, E)[0] != tau:
            failures.append({"seed": s, "problem": "path length differs from W(D, E)"})
    return {"suite": "geodesic", "seed": seed, "count": count, "max_error": worst, "failures": failures, "ok": not failures}
