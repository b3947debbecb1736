from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from gradedpd import Barcode, SignedDiagram

THREE_BARS_BARS = [(2, 8), (4, 12), (6, 10)]


@pytest.fixture
def three_bars():
    return Barcode.from_bars(THREE_BARS_BARS, m=11)


@st.composite
def barcodes(draw, max_m=8, max_bars=8, max_mult=2):
    m = draw(st.integers(0, max_m))
    n = draw(st.integers(0, max_bars))
    bars = []
    for _ in range(n):
        a = draw(st.integers(0, m))
        b = draw(st.integers(a + 1, m + 1))
        bars.append((a, b, draw(st.integers(1, max_mult))))
    return Barcode.from_bars(bars, m=m)


@st.composite
def interval_tables(draw, max_m=6, lo=-3, hi=3):
    """Arbitrary integer functions on the interval grid, as dense upper-triangular arrays."""
    m = draw(st.integers(0, max_m))
    n = m + 2
    vals = draw(st.lists(st.integers(lo, hi), min_size=n * n, max_size=n * n))
    return m, np.triu(np.array(vals, dtype=np.int64).reshape(n, n), k=1)


@st.composite
def real_diagrams(draw, max_points=3, span=6):
    """Non-negative diagrams with small integer coordinates."""
    n = draw(st.integers(0, max_points))
    pts: dict = {}
    for _ in range(n):
        a = draw(st.integers(0, span - 1))
        b = draw(st.integers(a + 1, span))
        pts[(a, b)] = pts.get((a, b), 0) + 1
    return SignedDiagram(pts, kind="persistence")


@st.composite
def signed_diagrams(draw, max_points=3, span=6):
    n = draw(st.integers(0, max_points))
    pts: dict = {}
    for _ in range(n):
        a = draw(st.integers(0, span - 1))
        b = draw(st.integers(a + 1, span))
        pts[(a, b)] = pts.get((a, b), 0) + draw(st.sampled_from([-2, -1, 1, 2]))
    return SignedDiagram(pts)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
