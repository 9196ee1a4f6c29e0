"""Dynamic cubes: Fenwick trees and the tunable block-partition hybrid.

When cells change between queries, rebuilding a prefix cube costs a full pass.
The multidimensional Fenwick tree bounds both operations by a product of logs;
the hybrid block partition exposes a dial (k = block size, q = query-side
dimensions) that trades update cost against query cost.
"""

import math
import random

from rangecube import SUM, make_cube
from rangecube.dynamic import FenwickCube, HybridCube

rng = random.Random(13)

n, d = 16, 2
cube = make_cube([n] * d, [rng.randint(0, 9) for _ in range(n**d)])

fenwick = FenwickCube(cube, SUM)
fenwick.update((3, 7), +5)
total = fenwick.prefix_query((7, 7))
print(f"fenwick: prefix up to (7,7) = {total}, "
      f"update touched {fenwick.cells_touched_last_update} cells "
      f"(bound {fenwick.op_cell_bound})")

# The hybrid's two extremes and the balanced middle:
configs = [
    (1, 0, "all block-partition: O(1)-ish queries, heavy updates"),
    (math.isqrt(n - 1) + 1, d // 2, "balanced (k=ceil(sqrt n), q=d//2)"),
    (math.isqrt(n - 1) + 1, d, "all query-side: O(1)-ish updates, heavy queries"),
]
print(f"\n{'k':>3} {'q':>2}  upd_cells  qry_cells  note")
for k, q, note in configs:
    hc = HybridCube(cube, SUM, k=k, q=q)
    upd, qry = [], []
    for _ in range(200):
        if rng.random() < 0.5:
            hc.update([rng.randrange(n) for _ in range(d)], rng.randint(-3, 3))
            upd.append(hc.cells_touched_last_update)
        else:
            hc.prefix_query([rng.randrange(n) for _ in range(d)])
            qry.append(hc.cells_touched_last_query)
    print(f"{k:>3} {q:>2}  {max(upd):>9} {max(qry):>10}  {note}")

# All structures represent the same cube: answers agree everywhere.
check = HybridCube(cube, SUM)
check.update((3, 7), +5)
for _ in range(50):
    b = [rng.randrange(n) for _ in range(d)]
    assert check.prefix_query(b) == fenwick.prefix_query(b)
print("\nfenwick and hybrid agree on 50 random prefixes after the same update")
