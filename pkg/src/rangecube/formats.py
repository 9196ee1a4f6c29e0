"""Text formats: cube files, coordinate-scale files and weight-array files.

Cube file layout::

    line 1:  d                      number of dimensions
    line 2:  m(1) ... m(d)          extents
    line 3:  int | float            value kind
    then:    prod(m) values         row-major, any whitespace layout

Integer cubes round-trip bit-exactly.  Scale files and weight-array files hold
one whitespace-separated number list per line.
"""

from __future__ import annotations

from typing import List

from .cube import DataCube, make_cube

__all__ = [
    "parse_cube_text",
    "dump_cube_text",
    "load_cube",
    "save_cube",
    "parse_number_lines",
    "load_number_lines",
]


class _Tokens:
    """Whitespace tokens annotated with line numbers for error reporting."""

    def __init__(self, text: str):
        self.items = [
            (lineno, tok)
            for lineno, line in enumerate(text.splitlines(), 1)
            for tok in line.split()
        ]
        self.pos = 0

    def next(self, what: str) -> tuple:
        if self.pos >= len(self.items):
            raise ValueError(f"unexpected end of file: expected {what}")
        item = self.items[self.pos]
        self.pos += 1
        return item

    def next_int(self, what: str) -> int:
        lineno, tok = self.next(what)
        try:
            return int(tok)
        except ValueError:
            raise ValueError(f"line {lineno}: expected {what}, got {tok!r}") from None

    def next_value(self, kind: str, index: int):
        lineno, tok = self.next(f"value {index + 1}")
        try:
            return int(tok) if kind == "int" else float(tok)
        except ValueError:
            raise ValueError(
                f"line {lineno}: value {index + 1} is not a valid {kind}: {tok!r}"
            ) from None

    def expect_end(self):
        if self.pos < len(self.items):
            lineno, tok = self.items[self.pos]
            raise ValueError(f"line {lineno}: trailing token {tok!r} after all values")


def parse_cube_text(text: str) -> DataCube:
    tokens = _Tokens(text)
    ndim = tokens.next_int("dimension count")
    if ndim < 1:
        raise ValueError(f"dimension count must be >= 1, got {ndim}")
    dims = [tokens.next_int(f"extent of dimension {j}") for j in range(ndim)]
    lineno, kind = tokens.next("value kind ('int' or 'float')")
    if kind not in ("int", "float"):
        raise ValueError(f"line {lineno}: value kind must be 'int' or 'float', got {kind!r}")
    count = 1
    for m in dims:
        if m < 1:
            raise ValueError(f"all extents must be >= 1, got {dims}")
        count *= m
    values = [tokens.next_value(kind, i) for i in range(count)]
    tokens.expect_end()
    return make_cube(dims, values, kind=kind)


def dump_cube_text(cube: DataCube) -> str:
    lines = [
        str(cube.ndim),
        " ".join(str(m) for m in cube.dims),
        cube.kind,
    ]
    values = cube.flat()
    fmt = str if cube.kind == "int" else repr
    # one row of the innermost dimension per line
    width = cube.dims[-1]
    for start in range(0, len(values), width):
        lines.append(" ".join(fmt(v) for v in values[start : start + width]))
    return "\n".join(lines) + "\n"


def load_cube(path) -> DataCube:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_cube_text(handle.read())


def save_cube(path, cube: DataCube) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dump_cube_text(cube))


def _parse_number(tok: str, lineno: int):
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        return float(tok)
    except ValueError:
        raise ValueError(f"line {lineno}: not a number: {tok!r}") from None


def parse_number_lines(text: str) -> List[list]:
    """One number list per non-empty line (scales and weight-array files)."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        if not line.strip():
            continue
        rows.append([_parse_number(tok, lineno) for tok in line.split()])
    if not rows:
        raise ValueError("no number lines found")
    return rows


def load_number_lines(path) -> List[list]:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_number_lines(handle.read())
