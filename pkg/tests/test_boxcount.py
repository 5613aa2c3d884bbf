from __future__ import annotations


import pytest
import sympy

from localdt.algebra import QSeries, macmahon, macmahon_neg
from localdt.boxcount import PlanePartition, cy_vertex, enumerate_partitions, ord_van, volume_counts
from localdt.partitions import Partition, gen_partitions, hooks_arms_legs
from localdt.vertex import hook_product_series

from conftest import assert_series_equal, q, sympy_series

P = Partition


def _brute_plane_partitions(n: int) -> int:
    """Count plane partitions of n as height arrays on an n x n grid."""
    count = 0
    cells = [(i, j) for i in range(n) for j in range(n) if (i + 1) * (j + 1) <= n]

    def rec(k: int, heights: dict[tuple[int, int], int], left: int) -> None:
        nonlocal count
        if k == len(cells):
            count += left == 0
            return
        i, j = cells[k]
        cap = min(heights.get((i - 1, j), left) if i else left, heights.get((i, j - 1), left) if j else left, left)
        for h in range(cap + 1):
            heights[(i, j)] = h
            rec(k + 1, heights, left - h)
        del heights[(i, j)]

    rec(0, {}, n)
    return count


def test_counts_without_a_leg():
    assert volume_counts(P(), 3) == (1, 1, 3, 6)


def test_counts_agree_with_an_independent_height_array_count():
    assert list(volume_counts(P(), 7)) == [_brute_plane_partitions(n) for n in range(8)]


def test_counts_with_a_single_box_leg():
    assert volume_counts(P([1]), 0) == (1,)
    assert volume_counts(P([1]), 2) == (1, 2, 5)


def test_macmahon_cross_check():
    counts = volume_counts(P(), 10)
    assert QSeries(list(counts), 0, 10) == macmahon(10)


def test_cy_vertex_examples():
    assert cy_vertex(P(), 8) == macmahon_neg(8)
    assert_series_equal(cy_vertex(P([1]), 8, reduced=True), sympy_series(1 / (1 + q), 8))
    want = 1 / ((1 + q) ** 2 * (1 - (-q) ** 3))
    assert_series_equal(cy_vertex(P([2, 1]), 8, reduced=True), sympy_series(want, 8))


@pytest.mark.parametrize("d", range(1, 5))
def test_cy_vertex_is_the_hook_product(d):
    for lam in gen_partitions(d):
        expr = sympy.prod([1 / (1 - (-q) ** c.hook) for c in hooks_arms_legs(lam)])
        got = cy_vertex(lam, 10, reduced=True)
        assert_series_equal(got, sympy_series(expr, 10))
        assert_series_equal(got, hook_product_series(lam, 10))


def test_ord_van_examples():
    bare = PlanePartition(P([1]), ())
    assert bare.volume == 0
    assert ord_van(bare) == 0
    one_box = PlanePartition(P(), (P([1]),))
    assert ord_van(one_box) == 1


def test_ord_van_is_positive_off_the_bare_leg():
    for lam in (P(), P([1]), P([2, 1])):
        for pi in enumerate_partitions(lam, 8 if lam != P([2, 1]) else 6):
            if pi.volume > 0:
                assert ord_van(pi) >= 1
            else:
                assert ord_van(pi) == 0


def test_slices_must_be_nested():
    with pytest.raises(ValueError):
        PlanePartition(P([1]), (P([2]), P([3])))
    with pytest.raises(ValueError):
        PlanePartition(P([1]), (P([1]),))


def test_boxes_are_downward_closed():
    for pi in enumerate_partitions(P([1]), 5):
        boxes = pi.boxes
        assert len(boxes) == pi.volume
        for k, i, j in boxes:
            for dk, di, dj in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                below = (k - dk, i - di, j - dj)
                if min(below) >= 0 and not (below[1] == 0 and below[2] == 0):
                    assert below in boxes
