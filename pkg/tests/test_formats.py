"""Tests for the cube text format and number-line files."""

import random

import pytest

from rangecube import make_cube
from rangecube.formats import (
    dump_cube_text,
    load_cube,
    parse_cube_text,
    parse_number_lines,
    save_cube,
)


class TestParseCube:
    def test_basic(self):
        cube = parse_cube_text("2\n2 2\nint\n1 2 3 4\n")
        assert cube.dims == (2, 2)
        assert cube.cell((1, 0)) == 3

    def test_value_count_mismatch(self):
        with pytest.raises(ValueError, match="expected value"):
            parse_cube_text("1\n3\nint\n1 2\n")

    def test_trailing_tokens(self):
        with pytest.raises(ValueError, match="trailing"):
            parse_cube_text("1\n2\nint\n1 2 3\n")

    def test_non_numeric_token_position(self):
        with pytest.raises(ValueError, match=r"line 5: value 3"):
            parse_cube_text("2\n2 2\nint\n1 2\nzap 4\n")

    def test_bad_kind(self):
        with pytest.raises(ValueError, match="value kind"):
            parse_cube_text("1\n2\ncomplex\n1 2\n")

    def test_bad_header(self):
        with pytest.raises(ValueError, match="dimension count"):
            parse_cube_text("x\n")

    def test_float_values(self):
        cube = parse_cube_text("1\n3\nfloat\n0.5 1 -2.25\n")
        assert cube.kind == "float"
        assert cube.flat() == [0.5, 1.0, -2.25]

    def test_whitespace_layout_free(self):
        a = parse_cube_text("2\n2 2\nint\n1 2 3 4\n")
        b = parse_cube_text("2 2 2 int 1\n2\n3\n   4")
        assert a.flat() == b.flat()


class TestRoundTrip:
    def test_int_bit_exact(self, tmp_path):
        rng = random.Random(1)
        cube = make_cube([3, 4], [rng.randint(-(2**40), 2**40) for _ in range(12)])
        path = tmp_path / "cube.txt"
        save_cube(path, cube)
        again = load_cube(path)
        assert again.dims == cube.dims
        assert again.flat() == cube.flat()
        save_cube(path, again)
        assert dump_cube_text(again) == dump_cube_text(cube)

    def test_float_round_trip(self, tmp_path):
        cube = make_cube([2], [0.1, -3.7e30])
        path = tmp_path / "cube.txt"
        save_cube(path, cube)
        assert load_cube(path).flat() == cube.flat()


class TestNumberLines:
    def test_rows(self):
        rows = parse_number_lines("1 2 3\n0.5 7\n")
        assert rows == [[1, 2, 3], [0.5, 7]]

    def test_comments_and_blanks(self):
        rows = parse_number_lines("# header\n1 2\n\n3 4  # tail\n")
        assert rows == [[1, 2], [3, 4]]

    def test_bad_token(self):
        with pytest.raises(ValueError, match="line 2"):
            parse_number_lines("1\nx\n")

    def test_empty(self):
        with pytest.raises(ValueError, match="no number"):
            parse_number_lines("# nothing\n")
