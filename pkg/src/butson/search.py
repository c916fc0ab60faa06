"""Backtracking enumeration of fully normalized difference-matrix cores.

The traversal: starting from the first index of an admissible order, compute
the candidate set for the current cell, assign its smallest member, and
advance; dead ends retreat to the predecessor and try its next value.  A
range search runs from a start index to an end index, emitting every
assignment that reaches the end, which is what both full classification and
master/worker prefix splitting are built from.

Two engines implement the identical traversal: the reference engine here,
which recomputes each candidate set from scratch, and the incremental-mask
kernel in _kernel.py used for large runs.  Tests hold them to equal
per-position counts and equal emission sequences.
"""

from __future__ import annotations

import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .algebra import CandidateSet, ExponentMatrix, _as_p, transpose
from .orders import AdmissibleOrder, builtin_order, canonical_kind

EMPTY = None  # marker for an unassigned core cell

MODE_COLLECT = "collect"
MODE_COUNT = "count"


@dataclass
class PartialCore:
    """A bordered p x p matrix with the first `depth` core cells assigned.

    candidate_stack[k] holds the not-yet-tried remainder of the candidate
    set computed when position k was last entered.
    """

    p: int
    order: AdmissibleOrder
    grid: list[list[int | None]]
    values: list[int] = field(default_factory=list)
    candidate_stack: list[int] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.values)

    def copy(self) -> PartialCore:
        return PartialCore(
            self.p,
            self.order,
            [row[:] for row in self.grid],
            list(self.values),
            list(self.candidate_stack),
        )


def init_partial(p: int, order: AdmissibleOrder) -> PartialCore:
    """Fresh partial core: zero row/column 0, identity row/column 1, rest empty."""
    p = _as_p(p)
    if order.p != p:
        raise ValueError("order modulus does not match p")
    grid: list[list[int | None]] = [[EMPTY] * p for _ in range(p)]
    for k in range(p):
        grid[0][k] = grid[k][0] = 0
        grid[1][k] = grid[k][1] = k
    return PartialCore(p, order, grid)


def candidates(core: PartialCore, i: int, j: int) -> CandidateSet:
    """Candidate values for cell (i,j): F_p minus every rectangle completion.

    A value is excluded when some already-assigned rectangle corner pair
    (a,b), a<i, b<j, forces grid[i][b] + grid[a][j] - grid[a][b] on it.
    """
    p = core.p
    grid = core.grid
    excluded = 0
    row_i = grid[i]
    for a in range(i):
        row_a = grid[a]
        above = row_a[j]
        if above is EMPTY:
            raise ValueError(f"entry ({a},{j}) is unassigned; order violates admissibility")
        for b in range(j):
            left = row_i[b]
            corner = row_a[b]
            if left is EMPTY or corner is EMPTY:
                raise ValueError(f"entry ({i},{b}) or ({a},{b}) is unassigned")
            excluded |= 1 << ((left + above - corner) % p)
    return CandidateSet(p, (1 << p) - 1 & ~excluded)


def seed_partial(
    p: int, order: AdmissibleOrder, values: Sequence[int], validate: bool = True
) -> PartialCore:
    """Build a PartialCore from prefix values, optionally replay-validating them."""
    core = init_partial(p, order)
    if len(values) > len(order):
        raise ValueError("more values than core cells")
    for pos, v in enumerate(values):
        i, j = order.sequence[pos]
        if validate:
            cand = candidates(core, i, j)
            if v not in cand:
                raise ValueError(
                    f"value {v} at ({i},{j}) is not in its candidate set {sorted(cand)}"
                )
        core.grid[i][j] = int(v)
        core.values.append(int(v))
        core.candidate_stack.append(0)
    return core


@dataclass(frozen=True)
class SearchConfig:
    p: int
    order: AdmissibleOrder
    start: tuple[int, int]
    end: tuple[int, int]
    transpose_pruning: bool = True
    mode: str = MODE_COLLECT

    def __post_init__(self) -> None:
        if self.order.p != _as_p(self.p):
            raise ValueError("order modulus does not match p")
        if self.order.position(self.start) > self.order.position(self.end):
            raise ValueError("start index comes after end index")
        if self.mode not in (MODE_COLLECT, MODE_COUNT):
            raise ValueError(f"unknown mode {self.mode!r}")

    @classmethod
    def full_range(cls, p: int, order: AdmissibleOrder, **kw) -> SearchConfig:
        return cls(p, order, order.sequence[0], order.sequence[-1], **kw)


@dataclass
class SearchStats:
    nodes_visited: int
    solutions: int
    per_index: tuple[int, ...]
    elapsed_ms: float

    def merge(self, other: SearchStats) -> SearchStats:
        a, b = self.per_index, other.per_index
        if len(a) < len(b):
            a, b = b, a
        per = tuple(x + (b[k] if k < len(b) else 0) for k, x in enumerate(a))
        return SearchStats(
            self.nodes_visited + other.nodes_visited,
            self.solutions + other.solutions,
            per,
            self.elapsed_ms + other.elapsed_ms,
        )


Sink = Callable[[tuple[int, ...]], None]


def search(
    config: SearchConfig,
    seed: PartialCore | None = None,
    sink: Sink | None = None,
    engine: str = "reference",
) -> SearchStats:
    """Run the range search; each completed assignment through config.end is
    passed to sink as the tuple of values at order positions 0..end.

    The seed must have exactly the positions before config.start assigned.
    """
    t0 = time.perf_counter()
    order = config.order
    start_pos = order.position(config.start)
    end_pos = order.position(config.end)
    if seed is None:
        seed = init_partial(config.p, order)
    if seed.depth != start_pos:
        raise ValueError(
            f"seed depth {seed.depth} does not match start position {start_pos}"
        )
    if engine == "auto":
        engine = "fast" if _kernel.HAVE_NUMBA else "reference"
    if engine == "fast":
        counts, solutions = _fast_search(config, seed, sink, start_pos, end_pos)
    elif engine == "reference":
        counts, solutions = _reference_search(config, seed, sink, start_pos, end_pos)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    elapsed = (time.perf_counter() - t0) * 1000.0
    return SearchStats(sum(counts), solutions, tuple(counts), elapsed)


def _prune_plan(config: SearchConfig, end_pos: int):
    return _kernel.prune_plan(
        config.order, 0, end_pos, config.transpose_pruning
    )


def _reference_search(config, core, sink, start_pos, end_pos):
    p = config.p
    order = config.order
    seq = order.sequence
    grid = core.grid
    counts = [0] * (end_pos + 1)
    solutions = 0
    collect = config.mode == MODE_COLLECT and sink is not None
    prune_pos, prune_i, prune_j, prune_lower = _prune_plan(config, end_pos)
    full = (1 << p) - 1

    vals = core.values
    stack = core.candidate_stack

    def computed(pos: int) -> int:
        i, j = seq[pos]
        mask = candidates(core, i, j).mask
        if pos == prune_pos:
            other = grid[prune_i][prune_j]
            if prune_lower:
                mask &= full & ~((1 << other) - 1)
            else:
                mask &= (1 << (other + 1)) - 1
        return mask

    pos = start_pos
    vals.append(-1)
    stack.append(computed(pos))
    while True:
        m = stack[pos]
        if m == 0:
            i, j = seq[pos]
            grid[i][j] = EMPTY
            vals.pop()
            stack.pop()
            if pos == start_pos:
                break
            pos -= 1
            continue
        low = m & -m
        stack[pos] = m ^ low
        v = low.bit_length() - 1
        i, j = seq[pos]
        grid[i][j] = v
        vals[pos] = v
        counts[pos] += 1
        if pos == end_pos:
            solutions += 1
            if collect:
                sink(tuple(vals))
        else:
            pos += 1
            vals.append(-1)
            stack.append(computed(pos))
    return counts, solutions


_CHUNK = 1 << 16


def _fast_search(config, core, sink, start_pos, end_pos):
    p = config.p
    order = config.order
    oi, oj = _kernel.order_arrays(order)
    state = _kernel.KernelState(p, end_pos + 1)
    state.seed(order.sequence, core.values)
    prune = _prune_plan(config, end_pos)
    collect = config.mode == MODE_COLLECT and sink is not None
    if collect:
        buf = np.zeros((_CHUNK, end_pos + 1), dtype=np.int64)
        mode = _kernel.MODE_COLLECT
    else:
        buf = _kernel.EMPTY_BUF
        mode = _kernel.MODE_COUNT
    solutions = 0
    while True:
        status, n = state.run(oi, oj, start_pos, end_pos, prune, buf, mode)
        if collect:
            solutions += n
            for row in buf[:n]:
                sink(tuple(int(x) for x in row))
        if status == _kernel.STATUS_DONE:
            break
    counts = [int(x) for x in state.counts]
    if not collect:
        solutions = counts[end_pos]
    return counts, solutions


def values_to_matrix(p: int, order: AdmissibleOrder, values: Sequence[int]) -> ExponentMatrix:
    """Assemble the full bordered matrix from a complete core assignment."""
    if len(values) != len(order):
        raise ValueError("values do not cover the whole core")
    rows = [[0] * p for _ in range(p)]
    for k in range(p):
        rows[1][k] = rows[k][1] = k
    for pos, (i, j) in enumerate(order.sequence):
        rows[i][j] = int(values[pos])
    return ExponentMatrix(p, tuple(tuple(r) for r in rows))


def enumerate_solutions(
    p: int,
    order: AdmissibleOrder | None = None,
    transpose_pruning: bool = True,
    engine: str = "auto",
) -> tuple[list[ExponentMatrix], SearchStats]:
    """All fully normalized difference matrices found by the full-range search.

    The transpose of a solution is itself a solution, so with pruning enabled
    the returned set covers only representatives with the (2,3) entry not
    exceeding the (3,2) entry; see with_transposes().
    """
    p = _as_p(p)
    if p == 2:
        # the core index set is empty; the bordered matrix is the lone solution
        m = ExponentMatrix(2, ((0, 0), (0, 1)))
        return [m], SearchStats(0, 1, (), 0.0)
    if order is None:
        order = builtin_order("horizontal", p)
    config = SearchConfig.full_range(p, order, transpose_pruning=transpose_pruning)
    found: list[ExponentMatrix] = []
    stats = search(
        config,
        sink=lambda vals: found.append(values_to_matrix(p, order, vals)),
        engine=engine,
    )
    return found, stats


def with_transposes(matrices: Sequence[ExponentMatrix]) -> list[ExponentMatrix]:
    """The closure of a solution set under transposition, sorted and deduplicated."""
    seen = {m.rows: m for m in matrices}
    for m in matrices:
        t = transpose(m)
        seen.setdefault(t.rows, t)
    return [seen[k] for k in sorted(seen)]


def count_prefixes(
    p: int,
    order: AdmissibleOrder | None = None,
    until: tuple[int, int] | None = None,
    transpose_pruning: bool = True,
    engine: str = "auto",
) -> int:
    """Number of assignments of cells (2,2)..until that survive filtering."""
    p = _as_p(p)
    if order is None:
        order = builtin_order("horizontal", p)
    if until is None:
        until = order.last()
    config = SearchConfig(
        p, order, order.sequence[0], until,
        transpose_pruning=transpose_pruning, mode=MODE_COUNT,
    )
    stats = search(config, engine=engine)
    return stats.per_index[order.position(until)]


def prefix_counts_upto(
    p: int,
    order: AdmissibleOrder,
    until: tuple[int, int],
    transpose_pruning: bool = True,
    engine: str = "auto",
) -> tuple[int, ...]:
    """Per-position prefix counts from a single pass through `until`.

    Entry k equals count_prefixes(p, order, order.sequence[k], ...): a depth-
    first pass visits every surviving partial assignment at every depth once.
    """
    config = SearchConfig(
        _as_p(p), order, order.sequence[0], until,
        transpose_pruning=transpose_pruning, mode=MODE_COUNT,
    )
    return search(config, engine=engine).per_index


# ---------------------------------------------------------------------------
# line records


@dataclass(frozen=True)
class PrefixRecord:
    """One saved (partial or complete) assignment, serializable as a line."""

    p: int
    order_kind: str
    upto: tuple[int, int]
    values: tuple[int, ...]

    def to_line(self) -> str:
        vals = ",".join(str(v) for v in self.values)
        return f"p={self.p} order={self.order_kind} upto={self.upto[0]},{self.upto[1]} vals={vals}"

    @classmethod
    def from_line(cls, line: str) -> PrefixRecord:
        fields: dict[str, str] = {}
        for part in line.split():
            key, _, value = part.partition("=")
            if not _:
                raise ValueError(f"malformed field {part!r}")
            fields[key] = value
        try:
            p = int(fields["p"])
            kind = canonical_kind(fields["order"])
            i, j = (int(x) for x in fields["upto"].split(","))
            raw = fields["vals"]
            values = tuple(int(x) for x in raw.split(",")) if raw else ()
        except (KeyError, ValueError) as exc:
            raise ValueError(f"malformed record line: {line!r} ({exc})") from exc
        return cls(p, kind, (i, j), values)

    def order(self) -> AdmissibleOrder:
        return builtin_order(self.order_kind, self.p)

    def validate(self) -> None:
        """Replay through the candidate computation; raises on any excluded value."""
        order = self.order()
        if order.position(self.upto) != len(self.values) - 1:
            raise ValueError(
                f"record covers {len(self.values)} values but upto={self.upto} "
                f"is order position {order.position(self.upto)}"
            )
        seed_partial(self.p, order, self.values, validate=True)
