"""Tests for data cubes, prefix cubes and the brute-force scan oracle."""

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from rangecube import (
    MAX,
    MIN,
    PRODUCT,
    QueryBox,
    SUM,
    XOR,
    brute_force_range,
    build_prefix_cube,
    make_cube,
)


def random_cube(rng, max_d=3, max_extent=8, lo=-100, hi=100):
    d = rng.randint(1, max_d)
    dims = [rng.randint(1, max_extent) for _ in range(d)]
    values = [rng.randint(lo, hi) for _ in range(math.prod(dims))]
    return make_cube(dims, values)


def random_box(rng, dims):
    lo, hi = [], []
    for m in dims:
        a = rng.randint(0, m - 1)
        b = rng.randint(a, m - 1)
        lo.append(a)
        hi.append(b)
    return QueryBox(lo, hi)


class TestMakeCube:
    def test_row_major_addressing(self):
        cube = make_cube([2, 2], [1, 2, 3, 4])
        assert cube.cell((0, 0)) == 1
        assert cube.cell((0, 1)) == 2
        assert cube.cell((1, 0)) == 3
        assert cube.cell((1, 1)) == 4

    def test_one_dimensional(self):
        cube = make_cube([3], [7, 7, 7])
        assert cube.dims == (3,)
        assert cube.flat() == [7, 7, 7]

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="value count"):
            make_cube([2, 2], [1, 2, 3])

    def test_zero_extent(self):
        with pytest.raises(ValueError, match="extents"):
            make_cube([2, 0], [])

    def test_dimension_ceiling(self):
        with pytest.raises(ValueError, match="ceiling"):
            make_cube([1] * 7, [1])

    def test_float_kind_inferred(self):
        cube = make_cube([2], [1.5, 2.0])
        assert cube.kind == "float"
        assert cube.cell((0,)) == 1.5

    def test_int64_range_enforced(self):
        with pytest.raises(ValueError, match="64-bit"):
            make_cube([1], [1 << 63])


class TestQueryBox:
    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="empty box"):
            QueryBox([1], [0])

    def test_negative_rejected(self):
        with pytest.raises(ValueError, match="negative"):
            QueryBox([-1], [0])

    def test_out_of_bounds_detected(self):
        box = QueryBox([0, 0], [1, 2])
        with pytest.raises(IndexError, match="exceeds extent"):
            box.validate_for((2, 2))

    def test_full_and_cell(self):
        assert QueryBox.full((2, 3)).hi == (1, 2)
        assert QueryBox.cell((1, 1)).lengths == (1, 1)


class TestBruteForce:
    def test_min_full_box(self):
        cube = make_cube([2, 2], [1, 2, 3, 4])
        assert brute_force_range(cube, QueryBox.full(cube.dims), MIN) == 1

    def test_single_cell(self):
        cube = make_cube([2, 2], [1, 2, 3, 4])
        for coords in QueryBox.full(cube.dims).coords():
            assert brute_force_range(cube, QueryBox.cell(coords), SUM) == cube.cell(coords)

    def test_1d_max(self):
        cube = make_cube([5], [3, 1, 4, 1, 5])
        assert brute_force_range(cube, QueryBox([1], [3]), MAX) == 4


class TestPrefixCube:
    def test_sum_table(self):
        pc = build_prefix_cube(make_cube([2, 2], [1, 2, 3, 4]), SUM)
        assert pc.table.tolist() == [[1, 3], [4, 10]]

    def test_xor_all_zero(self):
        pc = build_prefix_cube(make_cube([2, 3], [0] * 6), XOR)
        assert not pc.table.any()

    def test_min_rejected(self):
        with pytest.raises(ValueError, match="inverse"):
            build_prefix_cube(make_cube([2], [1, 2]), MIN)

    def test_product_zero_cell_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            build_prefix_cube(make_cube([2], [1, 0]), PRODUCT)

    def test_range_aggregate_examples(self):
        pc = build_prefix_cube(make_cube([2, 2], [1, 2, 3, 4]), SUM)
        assert pc.range_aggregate(QueryBox([0, 0], [1, 1])) == 10
        assert pc.range_aggregate(QueryBox([1, 1], [1, 1])) == 4
        assert pc.range_aggregate(QueryBox([0, 0], [1, 0])) == 4

    def test_full_box_equals_fold(self):
        rng = random.Random(7)
        for _ in range(20):
            cube = random_cube(rng)
            for op in (SUM, XOR):
                pc = build_prefix_cube(cube, op)
                assert pc.range_aggregate(QueryBox.full(cube.dims)) == op.fold(cube.flat())

    def test_lookup_counter_is_exactly_2_pow_d(self):
        rng = random.Random(11)
        for _ in range(20):
            cube = random_cube(rng)
            pc = build_prefix_cube(cube, SUM)
            box = random_box(rng, cube.dims)
            pc.range_aggregate(box)
            assert pc.lookups_last_query == 2 ** cube.ndim

    def test_product_small_integers_exact(self):
        cube = make_cube([2, 2], [2, 3, 5, 7])
        pc = build_prefix_cube(cube, PRODUCT)
        for coords in QueryBox.full(cube.dims).coords():
            box = QueryBox(coords, coords)
            assert pc.range_aggregate(box) == cube.cell(coords)
        assert pc.range_aggregate(QueryBox([0, 1], [1, 1])) == 21

    def test_out_of_bounds_box(self):
        pc = build_prefix_cube(make_cube([2, 2], [1, 2, 3, 4]), SUM)
        with pytest.raises(IndexError):
            pc.range_aggregate(QueryBox([0, 0], [2, 1]))


@st.composite
def cube_and_box(draw):
    d = draw(st.integers(1, 3))
    dims = draw(st.lists(st.integers(1, 6), min_size=d, max_size=d))
    values = draw(
        st.lists(
            st.integers(-100, 100),
            min_size=math.prod(dims),
            max_size=math.prod(dims),
        )
    )
    lo, hi = [], []
    for m in dims:
        a = draw(st.integers(0, m - 1))
        b = draw(st.integers(a, m - 1))
        lo.append(a)
        hi.append(b)
    return make_cube(dims, values), QueryBox(lo, hi)


@settings(max_examples=150, deadline=None)
@given(cube_and_box())
def test_prefix_matches_brute_force(case):
    cube, box = case
    for op in (SUM, XOR):
        pc = build_prefix_cube(cube, op)
        assert pc.range_aggregate(box) == brute_force_range(cube, box, op)


def test_random_corpus_sum_xor():
    """200 random cubes x 100 random boxes: prefix cube == brute force, exactly."""
    rng = random.Random(2024)
    for _ in range(50):
        cube = random_cube(rng)
        tables = {op.name: build_prefix_cube(cube, op) for op in (SUM, XOR)}
        for _ in range(25):
            box = random_box(rng, cube.dims)
            for op in (SUM, XOR):
                assert tables[op.name].range_aggregate(box) == brute_force_range(
                    cube, box, op
                )
