"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL  detail`` line; the
lines are also collected and repeated in the terminal summary.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from gradedpd import (
    Barcode,
    CostParams,
    Grid,
    SignedDiagram,
    coordinate_geodesic_path,
    derivative,
    diagram_from_rank,
    graded_diagram,
    graded_from_diagram,
    graded_rank,
    integrate,
    landscape_eval,
    landscape_from_graded,
    rank_from_barcode,
    signed_wasserstein,
    staircase_decompose,
    triangle_counterexample,
    verify_stability,
    wasserstein,
)
from gradedpd.oracles import RandomModuleSpec, brute_rank_sup, brute_wasserstein, random_barcode
from gradedpd.suites import _sub_seeds, check_consistency, sharp_family

RESULTS: dict[int, str] = {}
TIME_LIMIT = 60.0


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def corpus(seed: int, count: int, m: int = 10, max_bars: int = 20, max_mult: int = 2) -> list[Barcode]:
    return [random_barcode(RandomModuleSpec(m, max_bars, max_mult, s)) for s in _sub_seeds(seed, count)]


def random_diagram(rng, max_points: int, span: int = 10) -> SignedDiagram:
    pts: dict = {}
    for _ in range(int(rng.integers(0, max_points + 1))):
        a = int(rng.integers(0, span))
        b = int(rng.integers(a + 1, span + 1))
        pts[(a, b)] = pts.get((a, b), 0) + 1
    return SignedDiagram(pts, kind="persistence")


def random_signed(rng, max_points: int = 4, span: int = 10) -> SignedDiagram:
    pts: dict = {}
    for _ in range(int(rng.integers(0, max_points + 1))):
        a = int(rng.integers(0, span))
        b = int(rng.integers(a + 1, span + 1))
        pts[(a, b)] = pts.get((a, b), 0) + int(rng.choice([-2, -1, 1, 2]))
    return SignedDiagram(pts)


# ---------------------------------------------------------------------------


def test_criterion_01_three_bar_fixture():
    bc = Barcode.from_bars([(2, 8), (4, 12), (6, 10)], m=11)
    rank = rank_from_barcode(bc)
    gd = graded_diagram(graded_rank(rank))
    got = {
        "rank68": rank[6, 8],
        "pd": diagram_from_rank(rank).items(),
        "pd1": gd.level(1).items(),
        "pd2": gd.level(2).items(),
        "pd3": gd.level(3).items(),
        "K": gd.K,
    }
    want = {
        "rank68": 3,
        "pd": [((2, 8), 1), ((4, 12), 1), ((6, 10), 1)],
        "pd1": [((2, 8), 1), ((4, 8), -1), ((4, 12), 1)],
        "pd2": [((4, 8), 1), ((6, 8), -1), ((6, 10), 1)],
        "pd3": [((6, 8), 1)],
        "K": 3,
    }
    bad = [k for k in want if got[k] != want[k]]
    record(1, not bad, "exact match of Rank[6,8), pd, pd_1..pd_3" if not bad else f"mismatch in {bad}")


def test_criterion_02_consistency():
    t0 = time.perf_counter()
    problems = []
    for i, bc in enumerate(corpus(2024, 200)):
        problems += [(i, p) for p in check_consistency(bc)]
    dt = time.perf_counter() - t0
    ok = not problems and dt < TIME_LIMIT
    record(2, ok, f"200 barcodes, {len(problems)} problems, {dt:.1f}s" + (f"; first {problems[0]}" if problems else ""))


def _level_structure(dk: SignedDiagram) -> list[str]:
    issues = []
    vals = {v for _, v in dk.items()}
    if not vals <= {-1, 1}:
        issues.append(f"values {sorted(vals)}")
    pos = sorted(key for key, v in dk.items() if v == 1)
    neg = sorted(key for key, v in dk.items() if v == -1)
    for i, (a, b) in enumerate(pos):
        for c, d in pos[i + 1 :]:
            if (a <= c and d <= b) or (c <= a and b <= d):
                issues.append(f"+1 points [{a},{b}) and [{c},{d}) are comparable")
    meets = {(pos[j + 1][0], pos[j][1]) for j in range(len(pos) - 1) if pos[j + 1][0] < pos[j][1]}
    for z in neg:
        if z not in meets:
            issues.append(f"-1 point {z} is not the meet of adjacent +1 points")
    # components: runs of +1 points whose neighbours overlap
    ell = 1 + sum(1 for j in range(len(pos) - 1) if pos[j + 1][0] >= pos[j][1]) if pos else 0
    if len(neg) != len(pos) - ell:
        issues.append(f"#(-1)={len(neg)} but #(+1)-components={len(pos) - ell}")
    if pos and len(staircase_decompose(dk).components) != ell:
        issues.append("staircase component count differs")
    return issues


def test_criterion_03_level_structure():
    issues = []
    levels = 0
    for i, bc in enumerate(corpus(2024, 200)):
        for k, dk in enumerate(graded_diagram(graded_rank(rank_from_barcode(bc))).levels, start=1):
            levels += 1
            issues += [(i, k, s) for s in _level_structure(dk)]
    record(3, not issues, f"{levels} graded levels checked, {len(issues)} issues" + (f"; first {issues[0]}" if issues else ""))


def _random_grid(rng, m: int, rational: bool) -> Grid:
    if rational:
        steps = [Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 5))) for _ in range(m + 1)]
    else:
        steps = list(rng.uniform(0.1, 2.0, size=m + 1))
    pts = [Fraction(0) if rational else 0.0]
    for s in steps:
        pts.append(pts[-1] + s)
    return Grid(tuple(pts))


def test_criterion_04_landscape_oracle():
    rng = np.random.default_rng(4)
    worst_exact, worst_real, checked = 0, 0.0, 0
    for j, bc in enumerate(corpus(4, 100, m=8, max_bars=12)):
        rational = j % 2 == 0
        grid = _random_grid(rng, bc.m, rational)
        L = landscape_from_graded(graded_diagram(graded_rank(rank_from_barcode(bc))), grid)
        lo, hi = float(grid.points[0]) - 1, float(grid.points[-1]) + 1
        for _ in range(10):
            k = int(rng.integers(1, L.K + 2))
            if rational:
                t = Fraction(int(rng.integers(int(lo * 24), int(hi * 24) + 1)), 24)
                err = abs(landscape_eval(L, k, t) - brute_rank_sup(bc, grid, k, t))
                worst_exact = max(worst_exact, err)
            else:
                t = float(rng.uniform(lo, hi))
                err = abs(float(landscape_eval(L, k, t)) - float(brute_rank_sup(bc, grid, k, t)))
                worst_real = max(worst_real, err)
            checked += 1
    ok = worst_exact == 0 and worst_real <= 1e-9
    record(4, ok, f"{checked} (k,t) queries; rational max error {worst_exact}, real max error {worst_real:.2e}")


def test_criterion_05_derivative():
    level = SignedDiagram({(1, 7): 1, (3, 7): -1, (3, 13): 1})
    rho = derivative(level)
    step_ok = list(rho.pieces()) == [(1, 4, 1), (4, 5, -1), (5, 8, 1), (8, 13, -1)]
    rng = np.random.default_rng(5)
    mismatches, samples = 0, 0
    t0 = time.perf_counter()
    for bc in corpus(5, 20, m=8, max_bars=10):
        gd = graded_diagram(graded_rank(rank_from_barcode(bc)))
        L = landscape_from_graded(gd)
        rhos = [derivative(gd.level(k), Grid.identity(bc.m)) for k in range(1, gd.K + 1)]
        for t in rng.integers(-500, 1000 * (bc.m + 2) + 500, size=1000):
            t = Fraction(int(t), 1000)
            for k, r in enumerate(rhos, start=1):
                samples += 1
                if integrate(r, t) != landscape_eval(L, k, t):
                    mismatches += 1
    dt = time.perf_counter() - t0
    ok = step_ok and mismatches == 0 and dt < TIME_LIMIT
    record(5, ok, f"step example {'ok' if step_ok else 'WRONG'}; {samples} exact samples, {mismatches} mismatches, {dt:.1f}s")


def test_criterion_06_wasserstein_exactness():
    rng = np.random.default_rng(6)
    params = [CostParams(1, 1), CostParams(1, "inf"), CostParams(2, 2), CostParams("inf", "inf")]
    worst = {}
    exact_fail = 0
    for cp in params:
        w = 0.0
        for _ in range(100):
            D, E = random_diagram(rng, 4), random_diagram(rng, 4)
            got = wasserstein(D, E, cp)[0]
            want = brute_wasserstein(D, E, cp.p, cp.q)
            if cp.p == 1 and cp.q == 1 and got != want:
                exact_fail += 1
            w = max(w, abs(float(got) - float(want)))
        worst[(cp.p, cp.q)] = w
    ok = exact_fail == 0 and max(worst.values()) <= 1e-9
    detail = ", ".join(f"({p},{q}) {e:.1e}" for (p, q), e in worst.items())
    record(6, ok, f"100 pairs per (p,q); max errors {detail}; exact (1,1) failures {exact_fail}")


def test_criterion_07_metric_at_p1():
    rng = np.random.default_rng(7)
    cp = CostParams(1, 1)
    fails = {"symmetry": 0, "triangle": 0, "translation": 0}
    for _ in range(100):
        A, B, C = random_signed(rng), random_signed(rng), random_signed(rng)
        dAB = signed_wasserstein(A, B, cp)[0]
        if dAB != signed_wasserstein(B, A, cp)[0]:
            fails["symmetry"] += 1
        if signed_wasserstein(A, C, cp)[0] > dAB + signed_wasserstein(B, C, cp)[0]:
            fails["triangle"] += 1
        if signed_wasserstein(A + C, B + C, cp)[0] != dAB:
            fails["translation"] += 1
    record(7, not any(fails.values()), f"100 signed triples, exact; failures {fails}")


def test_criterion_08_triangle_failure():
    rows, closed_bad, not_violated = [], [], []
    for eps in (Fraction(1, 4), Fraction(1, 2), Fraction(1)):
        for p, q in ((2, 2), ("inf", 1), (1.5, 3)):
            rep = triangle_counterexample(eps, 1, CostParams(p, q))
            rows.append(rep)
            if not rep.matches_closed_forms:
                closed_bad.append((float(eps), p, q))
            if not rep.violated:
                not_violated.append((float(eps), p, q, round(rep.margin, 6)))
    ok = not closed_bad and not not_violated
    detail = f"9 cases; closed forms mismatched {closed_bad or 'none'}; triangle not violated {not_violated or 'none'}"
    record(8, ok, detail)


def test_criterion_09_stability_sharpness():
    A = {(1, 7): 1, (2, 8): 1}
    D = SignedDiagram({**A, (3, 9): 1})
    E = SignedDiagram({**A, (4, 9): 1})
    gD, gE = graded_from_diagram(D), graded_from_diagram(E)
    W = wasserstein(D, E)[0]
    levels = [signed_wasserstein(gD.level(k), gE.level(k))[0] for k in (1, 2, 3)]
    k3_ok = W == 1 and levels == [2, 2, 1]
    ratios = {}
    for K in (2, 3, 4, 5):
        Dk, Ek = sharp_family(K)
        ratios[K] = verify_stability(Dk, Ek).ratios
    fam_ok = all(r == [2] * (K - 1) + [1] for K, r in ratios.items())
    record(9, k3_ok and fam_ok, f"K=3: W={W}, levels={levels}; ratios {ratios}")


def test_criterion_10_stability_bounds():
    rng = np.random.default_rng(10)
    t0 = time.perf_counter()
    failures = 0
    for bc_a, bc_b in zip(corpus(10, 200, m=12), corpus(11, 200, m=12)):
        rep = verify_stability(bc_a.to_diagram().to_real(), bc_b.to_diagram().to_real())
        if not rep.ok:
            failures += 1
    left_fail = 0
    for _ in range(50):
        a, b = sorted(rng.choice(13, size=2, replace=False))
        c, d = sorted(rng.choice(13, size=2, replace=False))
        rep = verify_stability(SignedDiagram({(int(a), int(b)): 1}), SignedDiagram({(int(c), int(d)): 1}))
        if rep.sum_levels != rep.W:
            left_fail += 1
    D, E = sharp_family(3)
    rep = verify_stability(D, E)
    right = rep.sum_levels == rep.upper_bound
    dt = time.perf_counter() - t0
    ok = failures == 0 and left_fail == 0 and right and dt < TIME_LIMIT
    record(
        10,
        ok,
        f"200 random pairs, {failures} bound failures; single-bar equality misses {left_fail}/50; "
        f"upper bound attained by sharp family: {right}; {dt:.1f}s",
    )


def test_criterion_11_geodesics():
    rng = np.random.default_rng(11)
    worst, checked = 0.0, 0
    for bc_a, bc_b in zip(corpus(12, 50, m=8, max_bars=6, max_mult=1), corpus(13, 50, m=8, max_bars=6, max_mult=1)):
        D, E = bc_a.to_diagram().to_real(), bc_b.to_diagram().to_real()
        path = coordinate_geodesic_path(D, E)
        tau = float(path.length)
        for _ in range(10):
            s, t = sorted(rng.uniform(0, tau, size=2)) if tau else (0.0, 0.0)
            d = wasserstein(path(s), path(t), CostParams(1, 1))[0]
            worst = max(worst, abs(float(d) - (t - s)))
            checked += 1
    record(11, worst <= 1e-9, f"{checked} (s,t) samples on 50 pairs, max |W - (t-s)| = {worst:.2e}")
