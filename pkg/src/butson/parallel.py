"""Master/worker prefix splitting over the search tree.

The master enumerates every surviving assignment through a dividing index
and feeds them to a bounded queue; each worker completes one prefix at a
time over the remaining index range.  Workers share nothing mutable, and
the merged solution list is sorted once at the end, so output is identical
for any worker count or scheduling.  Prefixes can be staged in a shard file
with a completion journal beside it, making long runs resumable.
"""

from __future__ import annotations

import queue
import threading
import time
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernel
from .algebra import ExponentMatrix, _as_p
from .orders import AdmissibleOrder, builtin_order
from .search import (
    MODE_COLLECT,
    MODE_COUNT,
    PrefixRecord,
    SearchConfig,
    SearchStats,
    count_prefixes,
    search,
    seed_partial,
    values_to_matrix,
)


class RecordParseError(ValueError):
    """A shard line that does not parse; carries the 1-based line number."""


class RecordIntegrityError(ValueError):
    """A shard record whose values fail replay validation."""


class WorkerFailure(RuntimeError):
    """A worker raised; the offending prefix records are attached."""

    def __init__(self, failures: list[tuple[PrefixRecord, BaseException]]):
        self.failures = failures
        lines = "; ".join(f"{rec.to_line()!r}: {exc}" for rec, exc in failures)
        super().__init__(f"{len(failures)} prefix(es) failed and were not processed: {lines}")


@dataclass(frozen=True)
class ParallelConfig:
    p: int
    order: AdmissibleOrder
    divide: tuple[int, int]
    workers: int = 4
    queue_capacity: int = 1024
    transpose_pruning: bool = True
    checkpoint_path: str | Path | None = None
    engine: str = "auto"

    def __post_init__(self) -> None:
        p = _as_p(self.p)
        if self.order.p != p:
            raise ValueError("order modulus does not match p")
        pos = self.order.position(self.divide)
        if pos >= len(self.order) - 1:
            raise ValueError("dividing index must come strictly before the last index")
        if self.workers < 1:
            raise ValueError("need at least one worker")
        if self.queue_capacity < 1:
            raise ValueError("queue capacity must be positive")


def default_divide(p: int, order: AdmissibleOrder) -> tuple[int, int]:
    """The measured choice for p=17; the last row-2 index otherwise."""
    if (2, p - 1) in order:
        return (2, p - 1)
    return order.sequence[max(0, len(order) // 2 - 1)]


def split_prefixes(
    p: int,
    order: AdmissibleOrder,
    divide: tuple[int, int],
    transpose_pruning: bool = True,
    engine: str = "auto",
) -> Iterator[PrefixRecord]:
    """Yield every surviving assignment through `divide`, in traversal order."""
    p = _as_p(p)
    divide_pos = order.position(divide)
    if engine == "auto":
        engine = "fast" if _kernel.HAVE_NUMBA else "reference"
    if engine == "fast":
        yield from _split_fast(p, order, divide, divide_pos, transpose_pruning)
        return
    # reference engine: collect then yield (desk-scale p only)
    collected: list[tuple[int, ...]] = []
    config = SearchConfig(
        p, order, order.sequence[0], divide,
        transpose_pruning=transpose_pruning, mode=MODE_COLLECT,
    )
    search(config, sink=collected.append, engine="reference")
    for vals in collected:
        yield PrefixRecord(p, order.kind, divide, vals)


def _split_fast(p, order, divide, divide_pos, transpose_pruning):
    oi, oj = _kernel.order_arrays(order)
    state = _kernel.KernelState(p, divide_pos + 1)
    state.seed(order.sequence, ())
    prune = _kernel.prune_plan(order, 0, divide_pos, transpose_pruning)
    buf = np.zeros((1 << 14, divide_pos + 1), dtype=np.int64)
    while True:
        status, n = state.run(oi, oj, 0, divide_pos, prune, buf, _kernel.MODE_COLLECT)
        for row in buf[:n]:
            yield PrefixRecord(p, order.kind, divide, tuple(int(x) for x in row))
        if status == _kernel.STATUS_DONE:
            return


def complete_prefix(
    record: PrefixRecord,
    order: AdmissibleOrder,
    transpose_pruning: bool = True,
    engine: str = "auto",
    validate: bool = False,
) -> tuple[list[ExponentMatrix], SearchStats]:
    """Run the tail search of one prefix: from the successor of its upto
    index through the last index, returning full solution matrices."""
    p = record.p
    divide_pos = order.position(record.upto)
    start = order.sequence[divide_pos + 1]
    seed = seed_partial(p, order, record.values, validate=validate)
    config = SearchConfig(
        p, order, start, order.sequence[-1],
        transpose_pruning=transpose_pruning, mode=MODE_COLLECT,
    )
    found: list[ExponentMatrix] = []
    stats = search(
        config,
        seed=seed,
        sink=lambda vals: found.append(values_to_matrix(p, order, vals)),
        engine=engine,
    )
    return found, stats


def run_parallel(config: ParallelConfig) -> tuple[list[ExponentMatrix], SearchStats]:
    """Classify by splitting at the dividing index across worker threads.

    Returns the lexicographically sorted solution list (equal to the
    sequential full-range result) and merged statistics.  A worker failure
    raises WorkerFailure naming every unprocessed prefix.  On a resumed
    checkpoint run, previously completed prefixes contribute their journaled
    solutions but only this invocation's searches are counted in the stats.
    """
    t0 = time.perf_counter()
    p = _as_p(config.p)
    order = config.order
    ckpt = _Checkpoint(config) if config.checkpoint_path else None

    work: queue.Queue = queue.Queue(maxsize=config.queue_capacity)
    lock = threading.Lock()
    solutions: list[ExponentMatrix] = []
    failures: list[tuple[PrefixRecord, BaseException]] = []
    tail_stats: list[SearchStats] = []
    dispatched = 0
    completed = 0

    def worker() -> None:
        nonlocal completed
        while True:
            item = work.get()
            if item is None:
                return
            idx, record = item
            try:
                found, stats = complete_prefix(
                    record, order,
                    transpose_pruning=config.transpose_pruning,
                    engine=config.engine,
                )
                with lock:
                    solutions.extend(found)
                    tail_stats.append(stats)
                    completed += 1
                    if ckpt:
                        ckpt.mark_done(idx, found)
            except BaseException as exc:  # noqa: BLE001 - reported, never swallowed
                with lock:
                    failures.append((record, exc))

    threads = [threading.Thread(target=worker, daemon=True) for _ in range(config.workers)]
    for t in threads:
        t.start()

    try:
        if ckpt:
            records: Iterable[PrefixRecord] = ckpt.records()
        else:
            records = split_prefixes(
                p, order, config.divide,
                transpose_pruning=config.transpose_pruning, engine=config.engine,
            )
        for idx, record in enumerate(records):
            if ckpt and idx in ckpt.done:
                continue
            work.put((idx, record))
            dispatched += 1
        for _ in threads:
            work.put(None)
        for t in threads:
            t.join()
    finally:
        if ckpt:
            ckpt.close()

    if failures:
        raise WorkerFailure(failures)
    if completed != dispatched:
        raise RuntimeError(f"dispatched {dispatched} prefixes but completed {completed}")

    if ckpt:
        solutions.extend(ckpt.previous_solutions())

    # master prefix counts for the merged stats
    prefix_counts = search(
        SearchConfig(
            p, order, order.sequence[0], config.divide,
            transpose_pruning=config.transpose_pruning, mode=MODE_COUNT,
        ),
        engine=config.engine,
    )
    merged = prefix_counts
    for s in tail_stats:
        merged = merged.merge(s)
    solutions.sort(key=lambda m: m.rows)
    elapsed = (time.perf_counter() - t0) * 1000.0
    final = SearchStats(merged.nodes_visited, len(solutions), merged.per_index, elapsed)
    return solutions, final


# ---------------------------------------------------------------------------
# checkpoint shards


def checkpoint_write(path: str | Path, records: Iterable[PrefixRecord]) -> int:
    """Write prefix records one per line; returns the record count."""
    path = Path(path)
    n = 0
    with path.open("w", encoding="ascii") as fh:
        for rec in records:
            fh.write(rec.to_line() + "\n")
            n += 1
    return n


def checkpoint_read(path: str | Path, validate: bool = True) -> list[PrefixRecord]:
    """Read prefix records; parse errors carry line numbers, and with
    validate=True every record is replayed through the candidate filter."""
    path = Path(path)
    records: list[PrefixRecord] = []
    with path.open("r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = PrefixRecord.from_line(line)
            except ValueError as exc:
                raise RecordParseError(f"{path}:{lineno}: {exc}") from exc
            if validate:
                try:
                    rec.validate()
                except ValueError as exc:
                    raise RecordIntegrityError(f"{path}:{lineno}: {exc}") from exc
            records.append(rec)
    return records


class _Checkpoint:
    """Prefix shard file plus a completion journal.

    The journal holds, per completed prefix, a header line
    ``done <index> <n_solutions>`` followed by one full-core record line per
    solution.  A truncated trailing block is ignored, so the prefix is
    simply reprocessed on resume.
    """

    def __init__(self, config: ParallelConfig):
        self.path = Path(config.checkpoint_path)
        self.journal = self.path.with_suffix(self.path.suffix + ".done")
        self.config = config
        self._lock = threading.Lock()
        if not self.path.exists():
            n = checkpoint_write(
                self.path,
                split_prefixes(
                    config.p, config.order, config.divide,
                    transpose_pruning=config.transpose_pruning, engine=config.engine,
                ),
            )
            if n == 0:
                self.path.touch()
        self.done, self._solutions = self._load_journal()
        self._fh = self.journal.open("a", encoding="ascii")

    def records(self) -> list[PrefixRecord]:
        return checkpoint_read(self.path, validate=True)

    def _load_journal(self) -> tuple[set[int], list[ExponentMatrix]]:
        done: set[int] = set()
        sols: list[ExponentMatrix] = []
        if not self.journal.exists():
            return done, sols
        order = self.config.order
        lines = self.journal.read_text(encoding="ascii").splitlines()
        k = 0
        while k < len(lines):
            parts = lines[k].split()
            if len(parts) != 3 or parts[0] != "done":
                break  # truncated write; drop the tail
            try:
                idx, count = int(parts[1]), int(parts[2])
                entry = []
                for r in range(count):
                    rec = PrefixRecord.from_line(lines[k + 1 + r])
                    entry.append(values_to_matrix(rec.p, order, rec.values))
            except (ValueError, IndexError):
                break
            done.add(idx)
            sols.extend(entry)
            k += 1 + count
        return done, sols

    def mark_done(self, idx: int, found: list[ExponentMatrix]) -> None:
        order = self.config.order
        with self._lock:
            self._fh.write(f"done {idx} {len(found)}\n")
            for m in found:
                values = tuple(m.rows[i][j] for i, j in order.sequence)
                rec = PrefixRecord(m.p, order.kind, order.last(), values)
                self._fh.write(rec.to_line() + "\n")
            self._fh.flush()

    def previous_solutions(self) -> list[ExponentMatrix]:
        return self._solutions

    def close(self) -> None:
        with self._lock:
            self._fh.close()


# ---------------------------------------------------------------------------
# order profiling


@dataclass(frozen=True)
class ProfileRow:
    order_kind: str
    r: int
    s: int
    count: int
    elapsed_ms: float


def profile_orders(
    p: int,
    kinds: Iterable[str],
    max_index: tuple[int, int] | None = None,
    transpose_pruning: bool = True,
    engine: str = "auto",
) -> list[ProfileRow]:
    """Count and time the prefix enumeration at every dividing index.

    Each row is an independent run from the first index through (r,s), the
    same measurement that motivates picking a dividing index: low count =
    cheap master, high count = fine-grained work splitting.
    """
    p = _as_p(p)
    rows: list[ProfileRow] = []
    for kind in kinds:
        order = builtin_order(kind, p)
        upto = len(order) if max_index is None else order.position(max_index) + 1
        for pos in range(upto):
            r, s = order.sequence[pos]
            t0 = time.perf_counter()
            c = count_prefixes(
                p, order, (r, s), transpose_pruning=transpose_pruning, engine=engine
            )
            rows.append(
                ProfileRow(order.kind, r, s, c, (time.perf_counter() - t0) * 1000.0)
            )
    return rows


def profile_to_csv(rows: Iterable[ProfileRow]) -> str:
    out = ["order,r,s,count,elapsed_ms"]
    for row in rows:
        out.append(f"{row.order_kind},{row.r},{row.s},{row.count},{row.elapsed_ms:.3f}")
    return "\n".join(out) + "\n"
