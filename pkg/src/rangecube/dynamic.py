"""Dynamic prefix/range aggregates for invertible operators.

Two structures over the same cube model:

* :class:`FenwickCube` — the multidimensional binary indexed tree; updates and
  prefix queries touch at most ``prod(floor(log2 m[j]) + 1)`` cells.
* :class:`HybridCube` — a two-level block partition with tunable parameters
  ``k`` (block size) and ``q`` (number of query-side dimensions).  Every
  dimension's axis is extended with one slot per block; the first ``q``
  dimensions enumerate many cells at query time and only two per dimension at
  update time, the remaining ``d - q`` dimensions do the opposite.  Updates
  touch at most ``2**q * (k + ceil(n/k))**(d-q)`` cells and prefix queries at
  most ``(k + ceil(n/k))**q * 2**(d-q)``, so ``k = ceil(sqrt(n))`` with
  ``q = d // 2`` balances both.

Cell sets touched by either structure are Cartesian products of per-dimension
index lists, so reads and writes go through single ``np.ix_`` fancy-index
operations.  Both structures co-maintain a plain shadow copy of the
represented cube, which makes "set cell to u" derivable from "combine cell
with delta" and provides cheap point reads.

Min/max are not invertible and are rejected here; use the static structures.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from .cube import AggregateOp, DataCube, QueryBox

__all__ = [
    "FenwickCube",
    "HybridCube",
    "BlockPartition",
    "build_fenwick",
    "fenwick_update",
    "fenwick_prefix_query",
    "fenwick_range_query",
    "build_hybrid",
    "hybrid_update",
    "hybrid_prefix_query",
]


def _require_invertible(op: AggregateOp):
    if not op.invertible:
        raise ValueError(f"operator {op.name} has no inverse; dynamic structures need one")


def _check_coords(coords, dims) -> tuple:
    coords = tuple(int(c) for c in coords)
    if len(coords) != len(dims):
        raise ValueError(f"expected {len(dims)} coordinates, got {len(coords)}")
    for j, (c, m) in enumerate(zip(coords, dims)):
        if not 0 <= c < m:
            raise IndexError(f"coordinate {c} out of range [0, {m}) in dimension {j}")
    return coords


class _DynamicBase:
    """Shared shadow-cube plumbing and inclusion-exclusion range queries."""

    def point_read(self, coords):
        """Current value of one represented cell (served by the shadow)."""
        return self.shadow[_check_coords(coords, self.dims)].item()

    def set_value(self, coords, value):
        """Set a cell to ``value``: shadow read, inverse, then a combine update."""
        old = self.point_read(coords)
        self.update(coords, self.op.inverse(value, old))

    def range_query(self, box: QueryBox):
        """Aggregate over an arbitrary box via 2**d prefix queries.

        After the call :attr:`cells_touched_last_query` holds the maximum cell
        count of any one constituent prefix query.
        """
        box.validate_for(self.dims)
        op = self.op
        ndim = len(self.dims)
        keep = op.identity
        drop = op.identity
        touched = 0
        for mask in range(1 << ndim):
            corner = tuple(
                box.hi[j] if not mask >> j & 1 else box.lo[j] - 1 for j in range(ndim)
            )
            if any(c < 0 for c in corner):
                value = op.identity
            else:
                value = self.prefix_query(corner)
                touched = max(touched, self.cells_touched_last_query)
            if bin(mask).count("1") % 2 == 0:
                keep = op.combine(keep, value)
            else:
                drop = op.combine(drop, value)
        self.cells_touched_last_query = touched
        return op.inverse(keep, drop)


class FenwickCube(_DynamicBase):
    """Multidimensional binary indexed tree (Fenwick tree).

    The tree array has the cube's shape; internally indices are 1-based and a
    node at index ``i`` covers the ``i & -i`` trailing entries, independently
    in every dimension.  Construction propagates each node into its parent
    once per dimension, which is equivalent to point-updating every cell into
    an identity-filled tree.
    """

    def __init__(self, cube: DataCube, op: AggregateOp):
        _require_invertible(op)
        self.op = op
        self.dims = cube.dims
        tree = cube.values.copy()
        for axis, m in enumerate(self.dims):
            for i in range(1, m + 1):
                parent = i + (i & -i)
                if parent <= m:
                    src = [slice(None)] * len(self.dims)
                    dst = [slice(None)] * len(self.dims)
                    src[axis] = i - 1
                    dst[axis] = parent - 1
                    tree[tuple(dst)] = op.ufunc(tree[tuple(dst)], tree[tuple(src)])
        self.tree = tree
        self.shadow = cube.values.copy()
        self.cells_touched_last_update = 0
        self.cells_touched_last_query = 0

    @property
    def op_cell_bound(self) -> int:
        """Worst-case cells touched by one update or one prefix query."""
        return math.prod(m.bit_length() for m in self.dims)

    def update(self, coords, delta):
        """Combine the cell at ``coords`` with ``delta``."""
        coords = _check_coords(coords, self.dims)
        chains = []
        for c, m in zip(coords, self.dims):
            i = c + 1
            chain = []
            while i <= m:
                chain.append(i - 1)
                i += i & -i
            chains.append(chain)
        idx = np.ix_(*chains)
        self.tree[idx] = self.op.ufunc(self.tree[idx], delta)
        self.cells_touched_last_update = math.prod(len(c) for c in chains)
        self.shadow[coords] = self.op.combine(self.shadow[coords].item(), delta)

    def prefix_query(self, b):
        """Aggregate over the prefix box ``[0..b[0]] x ... x [0..b[d-1]]``."""
        b = _check_coords(b, self.dims)
        chains = []
        for c in b:
            i = c + 1
            chain = []
            while i > 0:
                chain.append(i - 1)
                i &= i - 1
            chains.append(chain)
        block = self.tree[np.ix_(*chains)]
        self.cells_touched_last_query = block.size
        return self.op.ufunc.reduce(block, axis=None).item()


class BlockPartition:
    """Read-only view of one inner block-partition table of a :class:`HybridCube`.

    Cells are addressed by one axis position per inner dimension: positions
    below the extent are *entries* (an entry cell covers the rows from the
    start of its block through the entry), positions past the extent are
    *blocks* (a block cell covers every row of all blocks strictly before it).
    """

    def __init__(self, hybrid: "HybridCube", outer: tuple):
        self._table = hybrid.table[outer]
        self._dims = hybrid.dims[hybrid.q :]
        self._k = hybrid.k

    @property
    def block_size(self) -> int:
        return self._k

    def block_counts(self) -> tuple:
        return tuple(-(-m // self._k) for m in self._dims)

    def cell(self, positions: Sequence[int]):
        return self._table[tuple(positions)].item()

    def covered_rows(self, axis: int, position: int) -> range:
        """Rows of inner dimension ``axis`` aggregated into ``position``."""
        m = self._dims[axis]
        if position < m:
            return range(position // self._k * self._k, position + 1)
        block = position - m
        return range(0, block * self._k)


class HybridCube(_DynamicBase):
    """Two-level block partition with a tunable update/query trade-off.

    ``q = d`` degenerates to constant-size updates with large queries,
    ``q = 0`` to a single block partition over all dimensions (constant-size
    queries, large updates).  Defaults ``k = ceil(sqrt(n))`` (n = largest
    extent) and ``q = d // 2`` balance the two.
    """

    def __init__(
        self,
        cube: DataCube,
        op: AggregateOp,
        k: Optional[int] = None,
        q: Optional[int] = None,
    ):
        _require_invertible(op)
        n = max(cube.dims)
        if k is None:
            k = math.isqrt(n - 1) + 1 if n > 1 else 1
        if q is None:
            q = cube.ndim // 2
        if not 1 <= k <= n:
            raise ValueError(f"block size k must be in [1, {n}], got {k}")
        if not 0 <= q <= cube.ndim:
            raise ValueError(f"split count q must be in [0, {cube.ndim}], got {q}")
        self.op = op
        self.dims = cube.dims
        self.k = int(k)
        self.q = int(q)
        self.nblocks = tuple(-(-m // self.k) for m in self.dims)
        shape = tuple(m + nb for m, nb in zip(self.dims, self.nblocks))
        self.table = np.full(shape, op.identity, dtype=cube.values.dtype)
        self.shadow = np.full(self.dims, op.identity, dtype=cube.values.dtype)
        self.cells_touched_last_update = 0
        self.cells_touched_last_query = 0
        identity = op.identity
        for coords in np.ndindex(*self.dims):
            value = cube.values[coords].item()
            if value != identity:
                self.update(coords, value)
        self.cells_touched_last_update = 0

    @property
    def update_cell_bound(self) -> int:
        n = max(self.dims)
        return 2 ** self.q * (self.k + -(-n // self.k)) ** (len(self.dims) - self.q)

    @property
    def query_cell_bound(self) -> int:
        n = max(self.dims)
        return (self.k + -(-n // self.k)) ** self.q * 2 ** (len(self.dims) - self.q)

    def _block(self, j: int, c: int) -> int:
        return c // self.k

    def update(self, coords, delta):
        """Combine the represented cell at ``coords`` with ``delta``."""
        coords = _check_coords(coords, self.dims)
        axes = []
        for j, (c, m, nb) in enumerate(zip(coords, self.dims, self.nblocks)):
            blk = self._block(j, c)
            if j < self.q:
                # outer axis: the entry itself and its containing block
                axes.append([c, m + blk])
            else:
                # inner axis: entries from c through its block end, then all
                # later blocks
                end = min(m, (blk + 1) * self.k)
                axes.append(list(range(c, end)) + [m + b for b in range(blk + 1, nb)])
        idx = np.ix_(*axes)
        self.table[idx] = self.op.ufunc(self.table[idx], delta)
        self.cells_touched_last_update = math.prod(len(a) for a in axes)
        self.shadow[coords] = self.op.combine(self.shadow[coords].item(), delta)

    def prefix_query(self, b):
        """Aggregate over the prefix box ``[0..b[0]] x ... x [0..b[d-1]]``."""
        b = _check_coords(b, self.dims)
        axes = []
        for j, (c, m) in enumerate(zip(b, self.dims)):
            blk = self._block(j, c)
            if j < self.q:
                # outer axis: entries of b's block up to b, plus earlier blocks
                axes.append(list(range(blk * self.k, c + 1)) + [m + x for x in range(blk)])
            else:
                # inner axis: the entry cell at b and the block cell at b's block
                axes.append([c, m + blk])
        block = self.table[np.ix_(*axes)]
        self.cells_touched_last_query = block.size
        return self.op.ufunc.reduce(block, axis=None).item()

    def partition(self, outer: Sequence[int]) -> BlockPartition:
        """The inner block partition stored for one outer axis-position tuple."""
        outer = tuple(int(x) for x in outer)
        if len(outer) != self.q:
            raise ValueError(f"expected {self.q} outer positions, got {len(outer)}")
        for j, x in enumerate(outer):
            if not 0 <= x < self.dims[j] + self.nblocks[j]:
                raise IndexError(f"outer position {x} out of range in dimension {j}")
        return BlockPartition(self, outer)

    def outer_covered_rows(self, j: int, position: int) -> range:
        """Rows of outer dimension ``j`` contributing to axis ``position``."""
        m = self.dims[j]
        if position < m:
            return range(position, position + 1)
        block = position - m
        return range(block * self.k, min(m, (block + 1) * self.k))


def build_fenwick(cube: DataCube, op: AggregateOp) -> FenwickCube:
    return FenwickCube(cube, op)


def fenwick_update(fc: FenwickCube, coords, delta) -> None:
    fc.update(coords, delta)


def fenwick_prefix_query(fc: FenwickCube, b):
    return fc.prefix_query(b)


def fenwick_range_query(fc: FenwickCube, box: QueryBox):
    return fc.range_query(box)


def build_hybrid(cube: DataCube, op: AggregateOp, k=None, q=None) -> HybridCube:
    return HybridCube(cube, op, k, q)


def hybrid_update(hc: HybridCube, coords, delta) -> None:
    hc.update(coords, delta)


def hybrid_prefix_query(hc: HybridCube, b):
    return hc.prefix_query(b)
