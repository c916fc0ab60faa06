"""JIT-compiled depth-first search kernel.

Same traversal as the reference engine in search.py, but candidate sets are
maintained incrementally: for the current row i and each row a above it,
``diffs[a, i]`` is the bitmask of entrywise differences accumulated over the
assigned columns of row i.  The excluded set at (i, j) is then the union of
each mask rotated by the entry above at (a, j).  Within a surviving partial
assignment those differences are pairwise distinct per row pair, so undo is
a single XOR.

``validate=1`` recomputes every candidate set with the plain double loop and
aborts on any disagreement; the equivalence tests run small searches this way.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


STATUS_DONE = 0
STATUS_PAUSED = 1
STATUS_INVALID = 2

# mode values for run()
MODE_COUNT = 0
MODE_COLLECT = 1


@njit(cache=True, nogil=True)
def _run(p, order_i, order_j, start_pos, end_pos, prune_pos, prune_i, prune_j,
         prune_lower, grid, diffs, avail, vals, counts, pos_io, leaf_buf, mode,
         validate):
    """Resume/continue the search; returns (status, leaves_buffered).

    pos_io[0] < start_pos requests initialization; otherwise the state arrays
    are taken as a paused search and continued in place.
    """
    one = np.int64(1)
    full = (one << p) - 1
    buf_cap = leaf_buf.shape[0]
    width = end_pos + 1
    n_buf = 0
    pos = pos_io[0]

    if pos < start_pos:
        pos = start_pos
        i = order_i[pos]
        j = order_j[pos]
        ex = np.int64(0)
        for a in range(i):
            d = diffs[a, i]
            s = grid[a, j]
            ex |= ((d << s) | (d >> (p - s))) & full
        c = full & ~ex
        if validate != 0:
            ex2 = np.int64(0)
            for a in range(i):
                for b in range(j):
                    ex2 |= one << ((grid[i, b] + grid[a, j] - grid[a, b]) % p)
            if (full & ~ex2) != c:
                pos_io[0] = pos
                return STATUS_INVALID, 0
        if pos == prune_pos:
            ov = grid[prune_i, prune_j]
            if prune_lower != 0:
                c &= full & ~((one << ov) - 1)
            else:
                c &= (one << (ov + 1)) - 1
        avail[pos] = c

    while True:
        m = avail[pos]
        if m == 0:
            i = order_i[pos]
            j = order_j[pos]
            v = grid[i, j]
            if v >= 0:
                for a in range(i):
                    diffs[a, i] ^= one << ((v - grid[a, j]) % p)
                grid[i, j] = -1
            if pos == start_pos:
                pos_io[0] = pos
                return STATUS_DONE, n_buf
            pos -= 1
            continue
        low = m & (-m)
        v = np.int64(-1)
        while low:
            low >>= 1
            v += 1
        avail[pos] = m & (m - 1)
        i = order_i[pos]
        j = order_j[pos]
        old = grid[i, j]
        if old >= 0:
            for a in range(i):
                diffs[a, i] ^= one << ((old - grid[a, j]) % p)
        grid[i, j] = v
        for a in range(i):
            diffs[a, i] |= one << ((v - grid[a, j]) % p)
        vals[pos] = v
        counts[pos] += 1
        if pos == end_pos:
            if mode == MODE_COLLECT:
                for k in range(width):
                    leaf_buf[n_buf, k] = vals[k]
                n_buf += 1
                if n_buf == buf_cap:
                    pos_io[0] = pos
                    return STATUS_PAUSED, n_buf
            continue
        pos += 1
        i = order_i[pos]
        j = order_j[pos]
        ex = np.int64(0)
        for a in range(i):
            d = diffs[a, i]
            s = grid[a, j]
            ex |= ((d << s) | (d >> (p - s))) & full
        c = full & ~ex
        if validate != 0:
            ex2 = np.int64(0)
            for a in range(i):
                for b in range(j):
                    ex2 |= one << ((grid[i, b] + grid[a, j] - grid[a, b]) % p)
            if (full & ~ex2) != c:
                pos_io[0] = pos
                return STATUS_INVALID, 0
        if pos == prune_pos:
            ov = grid[prune_i, prune_j]
            if prune_lower != 0:
                c &= full & ~((one << ov) - 1)
            else:
                c &= (one << (ov + 1)) - 1
        avail[pos] = c


class KernelState:
    """Mutable state arrays for one (possibly paused) kernel search."""

    __slots__ = ("p", "grid", "diffs", "avail", "vals", "counts", "pos_io")

    def __init__(self, p: int, n_positions: int):
        self.p = p
        self.grid = np.full((p, p), -1, dtype=np.int64)
        for k in range(p):
            self.grid[0, k] = self.grid[k, 0] = 0
            self.grid[1, k] = self.grid[k, 1] = k
        self.diffs = np.zeros((p, p), dtype=np.int64)
        self.avail = np.zeros(n_positions, dtype=np.int64)
        self.vals = np.zeros(n_positions, dtype=np.int64)
        self.counts = np.zeros(n_positions, dtype=np.int64)
        self.pos_io = np.full(1, -1, dtype=np.int64)

    def seed(self, order_pairs, values) -> None:
        """Install an already-validated prefix and its difference masks."""
        p = self.p
        grid = self.grid
        for pos, v in enumerate(values):
            i, j = order_pairs[pos]
            for a in range(i):
                self.diffs[a, i] |= 1 << int((v - grid[a, j]) % p)
            grid[i, j] = v
            self.vals[pos] = v
        for i in range(2, p):
            for a in range(i):
                self.diffs[a, i] |= (1 << int((grid[i, 0] - grid[a, 0]) % p)) | (
                    1 << int((grid[i, 1] - grid[a, 1]) % p)
                )

    def run(self, order_i, order_j, start_pos, end_pos, prune, leaf_buf,
            mode, validate=0):
        prune_pos, pi, pj, lower = prune
        status, n = _run(
            self.p, order_i, order_j, start_pos, end_pos, prune_pos, pi, pj,
            lower, self.grid, self.diffs, self.avail, self.vals, self.counts,
            self.pos_io, leaf_buf, mode, validate,
        )
        if status == STATUS_INVALID:
            raise AssertionError(
                "incremental candidate masks disagree with direct recomputation "
                f"at order position {int(self.pos_io[0])}"
            )
        return status, n


def prune_plan(order, start_pos: int, end_pos: int, enabled: bool):
    """Locate where the transpose constraint applies, as kernel arguments.

    The constraint relates cells (2,3) and (3,2); it is enforced when the
    later of the two (in the order) is assigned, and only if that position
    falls inside the searched range.
    """
    if not enabled or (2, 3) not in order or (3, 2) not in order:
        return (-1, 0, 0, 0)
    pos23 = order.position((2, 3))
    pos32 = order.position((3, 2))
    later = max(pos23, pos32)
    if later > end_pos:
        return (-1, 0, 0, 0)
    if later == pos32:
        # assigning (3,2): keep values >= entry at (2,3)
        return (later, 2, 3, 1)
    # assigning (2,3): keep values <= entry at (3,2)
    return (later, 3, 2, 0)


def order_arrays(order) -> tuple[np.ndarray, np.ndarray]:
    oi = np.array([ij[0] for ij in order.sequence], dtype=np.int64)
    oj = np.array([ij[1] for ij in order.sequence], dtype=np.int64)
    return oi, oj


EMPTY_BUF = np.zeros((1, 1), dtype=np.int64)
