"""Exact arithmetic over F_p for exponent matrices of Butson-Hadamard type.

A BH(p,p) matrix with p-th-root-of-unity entries is represented purely by
its exponent matrix over F_p; no complex arithmetic ever happens.  The
difference-matrix predicate and the vanishing-root-sum criterion are two
independent routes to the same membership test, and both are kept.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimeModulus:
    """A prime p with 2 <= p <= 31, so subsets of F_p fit in a 32-bit mask."""

    p: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"modulus must be prime, got {self.p}")
        if self.p > 31:
            raise ValueError(f"modulus must be <= 31 for bitmask sets, got {self.p}")

    def __int__(self) -> int:
        return self.p


def _as_p(p: int | PrimeModulus) -> int:
    return PrimeModulus(int(p)).p


@dataclass(frozen=True)
class ExponentMatrix:
    """Immutable p x p matrix of residues mod p, indexed from (0,0)."""

    p: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        p = _as_p(self.p)
        if len(self.rows) != p or any(len(r) != p for r in self.rows):
            raise ValueError(f"expected a {p}x{p} matrix")
        for r in self.rows:
            for e in r:
                if not 0 <= e < p:
                    raise ValueError(f"entry {e} out of range for modulus {p}")

    @classmethod
    def from_rows(cls, p: int, rows: Iterable[Iterable[int]]) -> ExponentMatrix:
        return cls(int(p), tuple(tuple(int(e) for e in r) for r in rows))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def sort_key(self) -> tuple[tuple[int, ...], ...]:
        return self.rows


@dataclass(frozen=True)
class CandidateSet:
    """A subset of F_p stored as a bitmask over residues 0..p-1."""

    p: int
    mask: int

    def __post_init__(self) -> None:
        p = _as_p(self.p)
        if self.mask & ~((1 << p) - 1):
            raise ValueError("mask has bits outside 0..p-1")

    @classmethod
    def full(cls, p: int) -> CandidateSet:
        return cls(p, (1 << p) - 1)

    @classmethod
    def from_values(cls, p: int, values: Iterable[int]) -> CandidateSet:
        mask = 0
        for v in values:
            mask |= 1 << (v % p)
        return cls(p, mask)

    def __contains__(self, v: int) -> bool:
        return bool(self.mask >> v & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[int]:
        m = self.mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def smallest(self) -> int:
        if not self.mask:
            raise ValueError("empty candidate set")
        return (self.mask & -self.mask).bit_length() - 1

    def values(self) -> tuple[int, ...]:
        return tuple(self)


@dataclass(frozen=True)
class NormalizationTrace:
    """Row/column permutations plus additive shifts relating two matrices.

    Applying a trace t to E yields M with
        M[i][j] = (E[row_perm[i]][col_perm[j]] + row_shifts[i] + col_shifts[j]) mod p,
    i.e. row_perm[i] names the source row placed at destination i, and the
    shifts are indexed by destination.
    """

    p: int
    row_perm: tuple[int, ...]
    col_perm: tuple[int, ...]
    row_shifts: tuple[int, ...]
    col_shifts: tuple[int, ...]

    def __post_init__(self) -> None:
        p = _as_p(self.p)
        for perm in (self.row_perm, self.col_perm):
            if sorted(perm) != list(range(p)):
                raise ValueError("perm is not a bijection of 0..p-1")
        if len(self.row_shifts) != p or len(self.col_shifts) != p:
            raise ValueError("shift vectors must have length p")

    @classmethod
    def identity(cls, p: int) -> NormalizationTrace:
        ident = tuple(range(p))
        zero = (0,) * p
        return cls(p, ident, ident, zero, zero)


def fourier_exponents(p: int) -> ExponentMatrix:
    """Exponent matrix of the degree-p Fourier matrix: entry (i,j) = i*j mod p."""
    p = _as_p(p)
    return ExponentMatrix(p, tuple(tuple(i * j % p for j in range(p)) for i in range(p)))


def is_difference_matrix(matrix: ExponentMatrix) -> bool:
    """True iff every distinct row pair's entrywise differences cover F_p exactly once."""
    p = matrix.p
    rows = matrix.rows
    full = (1 << p) - 1
    for i in range(p):
        ri = rows[i]
        for j in range(i + 1, p):
            rj = rows[j]
            seen = 0
            for k in range(p):
                bit = 1 << ((ri[k] - rj[k]) % p)
                if seen & bit:
                    break
                seen |= bit
            else:
                if seen == full:
                    continue
            return False
    return True


def cyclotomic_sum_is_zero(exponents: Sequence[int], p: int) -> bool:
    """Exactly decide whether sum_k zeta^e_k vanishes, zeta a primitive p-th root of unity.

    The powers 1, zeta, ..., zeta^(p-2) are linearly independent over Q and the
    only relation is that all p powers sum to zero, so the sum vanishes iff
    every residue occurs equally often among the exponents.
    """
    p = _as_p(p)
    if not exponents:
        raise ValueError("empty exponent multiset")
    counts = [0] * p
    for e in exponents:
        counts[e % p] += 1
    return min(counts) == max(counts)


def check_bh_equivalence(matrix: ExponentMatrix) -> bool:
    """Membership test via vanishing root sums on every distinct row pair.

    Cross-checked against is_difference_matrix on the same input; the two
    criteria agreeing is a structural invariant, so disagreement raises.
    """
    p = matrix.p
    rows = matrix.rows
    result = True
    for i in range(p):
        for j in range(i + 1, p):
            diffs = [(rows[i][k] - rows[j][k]) % p for k in range(p)]
            if not cyclotomic_sum_is_zero(diffs, p):
                result = False
                break
        if not result:
            break
    other = is_difference_matrix(matrix)
    if result != other:
        raise AssertionError(
            "root-sum criterion and difference-matrix criterion disagree; "
            "one of the implementations is broken"
        )
    return result


def apply_equivalence(matrix: ExponentMatrix, trace: NormalizationTrace) -> ExponentMatrix:
    """Apply row/column permutations and additive row/column shifts."""
    p = matrix.p
    if trace.p != p:
        raise ValueError(f"trace modulus {trace.p} != matrix modulus {p}")
    rows = matrix.rows
    out = tuple(
        tuple(
            (rows[trace.row_perm[i]][trace.col_perm[j]] + trace.row_shifts[i] + trace.col_shifts[j]) % p
            for j in range(p)
        )
        for i in range(p)
    )
    return ExponentMatrix(p, out)


def transpose(matrix: ExponentMatrix) -> ExponentMatrix:
    return ExponentMatrix(matrix.p, tuple(zip(*matrix.rows)))


def is_fully_normalized(matrix: ExponentMatrix) -> bool:
    """Row 0 and column 0 all zero; row 1 and column 1 equal 0,1,...,p-1."""
    p = matrix.p
    rows = matrix.rows
    return all(
        rows[0][k] == 0 and rows[k][0] == 0 and rows[1][k] == k and rows[k][1] == k
        for k in range(p)
    )


def fully_normalize(matrix: ExponentMatrix) -> tuple[ExponentMatrix, NormalizationTrace]:
    """Reduce a difference matrix to its fully normalized equivalent.

    Deterministic procedure: subtract column 0 from each row, subtract the
    new row 0 from each column, sort columns 1..p-1 by their row-1 value,
    then sort rows 1..p-1 by their column-1 value.  For a difference matrix
    the sort keys are collision-free, which is also what makes the borders
    come out as 0,1,...,p-1.
    """
    p = matrix.p
    work = [list(r) for r in matrix.rows]
    row_perm = list(range(p))
    col_perm = list(range(p))
    row_shifts = [0] * p
    col_shifts = [0] * p

    for i in range(p):
        s = -work[i][0] % p
        row_shifts[i] = (row_shifts[i] + s) % p
        work[i] = [(e + s) % p for e in work[i]]
    for j in range(p):
        s = -work[0][j] % p
        col_shifts[j] = (col_shifts[j] + s) % p
        for i in range(p):
            work[i][j] = (work[i][j] + s) % p

    row1 = work[1]
    if sorted(row1[1:]) != list(range(1, p)):
        raise ValueError("not a difference matrix: row-1 sort keys collide")
    col_order = [0] + sorted(range(1, p), key=lambda j: row1[j])
    work = [[row[j] for j in col_order] for row in work]
    col_perm = [col_perm[j] for j in col_order]
    col_shifts = [col_shifts[j] for j in col_order]

    col1 = [work[i][1] for i in range(p)]
    if sorted(col1[1:]) != list(range(1, p)):
        raise ValueError("not a difference matrix: column-1 sort keys collide")
    row_order = [0] + sorted(range(1, p), key=lambda i: col1[i])
    work = [work[i] for i in row_order]
    row_perm = [row_perm[i] for i in row_order]
    row_shifts = [row_shifts[i] for i in row_order]

    normalized = ExponentMatrix(p, tuple(tuple(r) for r in work))
    trace = NormalizationTrace(
        p, tuple(row_perm), tuple(col_perm), tuple(row_shifts), tuple(col_shifts)
    )
    return normalized, trace


def matrix_to_text(matrix: ExponentMatrix) -> str:
    """Canonical text form: a line with p, then p lines of p residues."""
    lines = [str(matrix.p)]
    lines.extend(" ".join(str(e) for e in row) for row in matrix.rows)
    return "\n".join(lines) + "\n"


def matrices_to_text(matrices: Iterable[ExponentMatrix]) -> str:
    return "".join(matrix_to_text(m) for m in matrices)


def matrices_from_text(text: str) -> list[ExponentMatrix]:
    """Parse a concatenation of matrix records; inverse of matrices_to_text."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    out: list[ExponentMatrix] = []
    k = 0
    while k < len(lines):
        try:
            p = int(lines[k])
        except ValueError as exc:
            raise ValueError(f"bad matrix header at line {k + 1}: {lines[k]!r}") from exc
        if len(lines) - (k + 1) < p:
            raise ValueError(f"truncated matrix record starting at line {k + 1}")
        rows = []
        for r in range(p):
            parts = lines[k + 1 + r].split()
            if len(parts) != p:
                raise ValueError(f"expected {p} entries at line {k + 2 + r}")
            rows.append(tuple(int(x) for x in parts))
        out.append(ExponentMatrix(p, tuple(rows)))
        k += p + 1
    return out


def matrix_from_text(text: str) -> ExponentMatrix:
    matrices = matrices_from_text(text)
    if len(matrices) != 1:
        raise ValueError(f"expected exactly one matrix record, found {len(matrices)}")
    return matrices[0]
