"""Dense data cubes, aggregate operators, prefix cubes and brute-force range scans.

A :class:`DataCube` is a dense d-dimensional array of 64-bit values addressed
row-major (dimension 0 slowest).  :class:`PrefixCube` precomputes prefix
aggregates for an invertible operator so any box aggregate is answered from
``2**d`` corner lookups by inclusion-exclusion.  :func:`brute_force_range` is
the cell-by-cell reference scan that every other structure in this package is
tested against.
"""

from __future__ import annotations

import itertools
import math
import operator
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "MAX_DIMENSIONS",
    "AggregateOp",
    "SUM",
    "PRODUCT",
    "XOR",
    "MIN",
    "MAX",
    "OPS",
    "DataCube",
    "QueryBox",
    "PrefixCube",
    "make_cube",
    "build_prefix_cube",
    "range_aggregate",
    "brute_force_range",
]

#: Hard ceiling on cube dimensionality; inclusion-exclusion costs 2**d lookups
#: per query, so d is kept desk-scale.
MAX_DIMENSIONS = 6

#: Integer sum cubes are safe from int64 overflow when |value| * cells < 2**62.
SUM_SAFE_BOUND = 1 << 62


def _exact_div(a, b):
    """Inverse of multiplication; keeps ints exact when they divide evenly."""
    if isinstance(a, int) and isinstance(b, int) and b != 0 and a % b == 0:
        return a // b
    return a / b


@dataclass(frozen=True)
class AggregateOp:
    """An associative, commutative aggregate operator.

    ``inverse`` undoes one combine: ``inverse(combine(x, y), y) == x``.  It is
    defined for sum and xor, and for product over nonzero operands; min/max
    carry ``inverse=None`` and are rejected by every structure that needs
    deletion.  ``ufunc`` is the numpy twin used for vectorised builds.
    """

    name: str
    identity: object
    combine: Callable
    inverse: Optional[Callable]
    ufunc: np.ufunc

    @property
    def invertible(self) -> bool:
        return self.inverse is not None

    def fold(self, items) -> object:
        """Combine an iterable starting from the identity."""
        acc = self.identity
        for item in items:
            acc = self.combine(acc, item)
        return acc

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"AggregateOp({self.name})"


SUM = AggregateOp("sum", 0, operator.add, operator.sub, np.add)
PRODUCT = AggregateOp("product", 1, operator.mul, _exact_div, np.multiply)
XOR = AggregateOp("xor", 0, operator.xor, operator.xor, np.bitwise_xor)
MIN = AggregateOp("min", math.inf, min, None, np.minimum)
MAX = AggregateOp("max", -math.inf, max, None, np.maximum)

#: Operator registry keyed by name (used by the CLI).
OPS = {op.name: op for op in (SUM, PRODUCT, XOR, MIN, MAX)}

_INT64_MIN = -(1 << 63)
_INT64_MAX = (1 << 63) - 1


class DataCube:
    """Dense d-dimensional array of int64 or float64 values.

    Cell addressing is row-major with dimension 0 slowest, i.e. the flat value
    sequence enumerates the last coordinate fastest.

    >>> make_cube([2, 2], [1, 2, 3, 4]).cell((1, 1))
    4
    """

    __slots__ = ("dims", "values")

    def __init__(self, dims: Sequence[int], values, kind: Optional[str] = None):
        dims = tuple(int(m) for m in dims)
        if not dims:
            raise ValueError("cube needs at least one dimension")
        if len(dims) > MAX_DIMENSIONS:
            raise ValueError(
                f"{len(dims)} dimensions exceed the ceiling of {MAX_DIMENSIONS}"
            )
        if any(m < 1 for m in dims):
            raise ValueError(f"all extents must be >= 1, got {dims}")
        ncells = math.prod(dims)
        if isinstance(values, np.ndarray) and values.shape == dims:
            flat = values.reshape(-1)
        else:
            flat = list(values)
            if len(flat) != ncells:
                raise ValueError(
                    f"value count {len(flat)} does not match extent product {ncells}"
                )
        if kind is None:
            kind = "int" if all(isinstance(v, (int, np.integer)) for v in flat) else "float"
        if kind == "int":
            for v in flat:
                iv = int(v)
                if not _INT64_MIN <= iv <= _INT64_MAX:
                    raise ValueError(f"value {v} does not fit a 64-bit signed integer")
            arr = np.array([int(v) for v in flat], dtype=np.int64)
        elif kind == "float":
            arr = np.array([float(v) for v in flat], dtype=np.float64)
        else:
            raise ValueError(f"unknown cube kind {kind!r}")
        self.dims = dims
        self.values = arr.reshape(dims)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def kind(self) -> str:
        return "int" if self.values.dtype == np.int64 else "float"

    def cell(self, coords: Sequence[int]):
        """Value at ``coords`` as a plain Python number."""
        coords = tuple(coords)
        if len(coords) != self.ndim:
            raise ValueError(f"expected {self.ndim} coordinates, got {len(coords)}")
        for j, (c, m) in enumerate(zip(coords, self.dims)):
            if not 0 <= c < m:
                raise IndexError(f"coordinate {c} out of range [0, {m}) in dimension {j}")
        return self.values[coords].item()

    def flat(self) -> list:
        """Row-major value list (Python numbers)."""
        return self.values.reshape(-1).tolist()

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"DataCube(dims={self.dims}, kind={self.kind!r})"


def make_cube(dims: Sequence[int], values, kind: Optional[str] = None) -> DataCube:
    """Build a :class:`DataCube` from extents and a row-major value sequence."""
    return DataCube(dims, values, kind=kind)


@dataclass(frozen=True)
class QueryBox:
    """Per-dimension closed coordinate intervals ``[lo[j], hi[j]]``.

    Boxes are never empty: ``lo[j] <= hi[j]`` is enforced at construction and
    callers wanting an "empty means identity" convention must wrap explicitly
    (min/max have no safe identity in a bounded integer domain).
    """

    lo: tuple
    hi: tuple

    def __init__(self, lo: Sequence[int], hi: Sequence[int]):
        lo = tuple(int(c) for c in lo)
        hi = tuple(int(c) for c in hi)
        if len(lo) != len(hi) or not lo:
            raise ValueError("lo and hi must be equal-length, non-empty sequences")
        for j, (a, b) in enumerate(zip(lo, hi)):
            if a < 0:
                raise ValueError(f"negative coordinate {a} in dimension {j}")
            if a > b:
                raise ValueError(f"empty box in dimension {j}: lo {a} > hi {b}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def full(cls, dims: Sequence[int]) -> "QueryBox":
        return cls([0] * len(dims), [m - 1 for m in dims])

    @classmethod
    def cell(cls, coords: Sequence[int]) -> "QueryBox":
        return cls(coords, coords)

    @property
    def ndim(self) -> int:
        return len(self.lo)

    @property
    def lengths(self) -> tuple:
        return tuple(b - a + 1 for a, b in zip(self.lo, self.hi))

    def validate_for(self, dims: Sequence[int]) -> None:
        if len(dims) != self.ndim:
            raise ValueError(f"box has {self.ndim} dimensions, cube has {len(dims)}")
        for j, (b, m) in enumerate(zip(self.hi, dims)):
            if b >= m:
                raise IndexError(f"box exceeds extent {m} in dimension {j}: hi {b}")

    def coords(self):
        """Iterate every coordinate tuple inside the box."""
        return itertools.product(*(range(a, b + 1) for a, b in zip(self.lo, self.hi)))

    def slices(self) -> tuple:
        return tuple(slice(a, b + 1) for a, b in zip(self.lo, self.hi))


def brute_force_range(cube: DataCube, box: QueryBox, op: AggregateOp):
    """Fold ``op`` over every cell in the box, cell by cell.

    This is the reference oracle for every range structure in the package; it
    deliberately avoids prefix tables, vectorisation tricks and operator
    inverses.
    """
    box.validate_for(cube.dims)
    values = cube.values
    acc = op.identity
    for coords in box.coords():
        acc = op.combine(acc, values[coords].item())
    return acc


class PrefixCube:
    """Prefix-aggregate table answering box queries in ``2**d`` lookups.

    Cell ``b`` of the table holds the aggregate over the prefix subcube
    ``[0..b[0]] x ... x [0..b[d-1]]``.  Arbitrary boxes are recovered by
    inclusion-exclusion over the ``2**d`` prefix corners, which requires the
    operator to be invertible.
    """

    def __init__(self, cube: DataCube, op: AggregateOp):
        if not op.invertible:
            raise ValueError(f"operator {op.name} has no inverse; prefix cube needs one")
        if op.name == "product" and np.any(cube.values == 0):
            raise ValueError("product prefix cube is undefined with zero cells")
        table = cube.values.copy()
        for axis in range(cube.ndim):
            table = op.ufunc.accumulate(table, axis=axis)
        self.op = op
        self.dims = cube.dims
        self.table = table
        #: Prefix lookups made by the most recent range_aggregate call.
        self.lookups_last_query = 0

    def _prefix(self, corner: tuple):
        """Aggregate of the prefix subcube ending at ``corner`` (-1 = empty axis)."""
        self.lookups_last_query += 1
        if any(c < 0 for c in corner):
            return self.op.identity
        return self.table[corner].item()

    def range_aggregate(self, box: QueryBox):
        box.validate_for(self.dims)
        self.lookups_last_query = 0
        op = self.op
        ndim = len(self.dims)
        keep = op.identity
        drop = op.identity
        for mask in range(1 << ndim):
            corner = tuple(
                box.hi[j] if not mask >> j & 1 else box.lo[j] - 1 for j in range(ndim)
            )
            value = self._prefix(corner)
            if bin(mask).count("1") % 2 == 0:
                keep = op.combine(keep, value)
            else:
                drop = op.combine(drop, value)
        # One inverse application keeps integer division exact for product.
        return op.inverse(keep, drop)


def build_prefix_cube(cube: DataCube, op: AggregateOp) -> PrefixCube:
    """Precompute prefix aggregates of ``cube`` for the invertible ``op``."""
    return PrefixCube(cube, op)


def range_aggregate(pc: PrefixCube, box: QueryBox):
    """Aggregate over ``box`` using inclusion-exclusion on the prefix table."""
    return pc.range_aggregate(box)
