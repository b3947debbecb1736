from unittest import mock

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gradedpd import IntervalFunction, mobius_convolve, mobius_value, rank_from_barcode, zeta_convolve
from gradedpd.oracles import brute_mobius_convolve, recursive_mobius
from gradedpd import poset
from gradedpd.poset import GridInterval, from_cells

from conftest import interval_tables


@pytest.mark.parametrize(
    "lower, upper, expected",
    [((3, 5), (3, 5), 1), ((3, 5), (2, 6), 1), ((3, 5), (1, 7), 0), ((3, 5), (2, 5), -1), ((3, 5), (3, 6), -1)],
)
def test_mobius_value_closed_form(lower, upper, expected):
    assert mobius_value(lower, upper) == expected


def test_mobius_value_rejects_unrelated_pairs():
    with pytest.raises(ValueError):
        mobius_value((3, 5), (4, 6))


def test_mobius_value_matches_recursion():
    m = 5
    mu, cells = recursive_mobius(m)
    for lo in cells:
        for hi in cells:
            if hi[0] <= lo[0] and lo[1] <= hi[1]:
                assert mobius_value(lo, hi) == mu(lo, hi), (lo, hi)


def test_three_bars_inversion_at_one_cell(three_bars):
    rank = rank_from_barcode(three_bars).table
    # Rank(a) - Rank(b) - Rank(c) + Rank(d) around [6,10)
    assert (rank[6, 10], rank[5, 10], rank[6, 11], rank[5, 11]) == (2, 1, 1, 1)
    assert mobius_convolve(rank)[6, 10] == 1


def test_mobius_of_zero_is_zero():
    assert mobius_convolve(IntervalFunction.zeros(7)).support() == {}


def test_zeta_three_bar_rank_value(three_bars):
    pd = from_cells(11, [((2, 8), 1), ((4, 12), 1), ((6, 10), 1)])
    assert zeta_convolve(pd)[6, 8] == 3


def test_zeta_of_single_point():
    g = from_cells(9, [((3, 7), 1)])
    z = zeta_convolve(g)
    assert z[3, 7] == 1 and z[4, 6] == 1 and z[3, 8] == 0 and z[2, 7] == 0


@settings(max_examples=40, deadline=None)
@given(interval_tables(max_m=6))
def test_mobius_matches_brute_force(data):
    m, arr = data
    h = IntervalFunction(m, arr)
    brute = brute_mobius_convolve({(a, b): int(arr[a, b]) for a in range(m + 2) for b in range(a + 1, m + 2)}, m)
    got = mobius_convolve(h)
    assert all(got[c] == v for c, v in brute.items())


@settings(max_examples=50, deadline=None)
@given(interval_tables(max_m=8))
def test_round_trips(data):
    m, arr = data
    h = IntervalFunction(m, arr)
    assert zeta_convolve(mobius_convolve(h)) == h
    assert mobius_convolve(zeta_convolve(h)) == h


@settings(max_examples=30, deadline=None)
@given(interval_tables(max_m=5))
def test_sparse_and_dense_agree(data):
    m, arr = data
    dense = IntervalFunction(m, arr)
    with mock.patch.object(poset, "DENSE_LIMIT", -1):
        sparse = IntervalFunction(m, arr)
        assert not sparse.is_dense
        mu_sparse = mobius_convolve(sparse).support()
        zeta_sparse = zeta_convolve(sparse).support()
    assert mobius_convolve(dense).support() == mu_sparse
    assert zeta_convolve(dense).support() == zeta_sparse


def test_sparse_storage_above_dense_limit():
    m = poset.DENSE_LIMIT + 5
    h = IntervalFunction(m, {(10, 20): 2, (4000, 4003): 1, (m, m + 1): -1})
    assert not h.is_dense
    assert h[10, 20] == 2 and h[11, 20] == 0
    z = zeta_convolve(h)
    assert z[15, 18] == 2 and z[4001, 4002] == 1
    assert mobius_convolve(z) == h


def test_out_of_domain_reads_zero():
    h = from_cells(3, [((0, 4), 5)])
    assert h[-1, 4] == 0 and h[0, 5] == 0 and h[2, 2] == 0


def test_order_reversing_detection():
    h = from_cells(4, [((1, 3), 1)])
    assert not h.is_order_reversing()
    assert zeta_convolve(h).is_order_reversing()
    arr = np.zeros((6, 6), dtype=np.int64)
    assert IntervalFunction(4, arr).is_order_reversing()


@given(st.integers(0, 6), st.integers(0, 6))
def test_grid_interval_check(a, b):
    if a < b <= 6:
        assert GridInterval(a, b).check(5) == (a, b)
    else:
        with pytest.raises(ValueError):
            GridInterval(a, b).check(5)
