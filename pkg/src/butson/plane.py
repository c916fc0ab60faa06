"""Projective-plane incidence structures attached to normalized difference matrices.

A fully normalized difference matrix of modulus p yields a plane of order p
on p^2+p+1 points: one distinguished point, p 'row' points, and p^2 grid
points; lines mirror that split, and the grid-vs-grid incidences are cyclic
shifts driven by the matrix entries.  The plane carries a point/line
symmetry of order p that fixes the distinguished flag, and scanning shift
exponents along its orbits recovers the exponent matrix exactly.

Points are rows and lines are columns throughout; each point's incident
line set is stored as a bitmask for O(1) membership and intersections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import (
    ExponentMatrix,
    _as_p,
    is_difference_matrix,
    is_fully_normalized,
)


@dataclass(frozen=True)
class IncidencePlane:
    """0/1 incidence structure: rows are points, columns are lines."""

    n: int
    row_masks: tuple[int, ...]

    @property
    def size(self) -> int:
        return self.n * self.n + self.n + 1

    def __post_init__(self) -> None:
        if len(self.row_masks) != self.size:
            raise ValueError(f"expected {self.size} point rows, got {len(self.row_masks)}")
        limit = 1 << self.size
        if any(m >= limit or m < 0 for m in self.row_masks):
            raise ValueError("row mask has bits outside the line range")

    @cached_property
    def col_masks(self) -> tuple[int, ...]:
        """Per-line point sets (the transpose view)."""
        cols = [0] * self.size
        for x, row in enumerate(self.row_masks):
            bit = 1 << x
            m = row
            while m:
                low = m & -m
                cols[low.bit_length() - 1] |= bit
                m ^= low
        return tuple(cols)

    def incident(self, point: int, line: int) -> bool:
        return bool(self.row_masks[point] >> line & 1)

    def line_through(self, u: int, v: int) -> int:
        """The unique line containing both points; raises if none or many."""
        common = self.row_masks[u] & self.row_masks[v]
        if common == 0 or common & (common - 1):
            raise ValueError(f"points {u},{v} lie on {bin(common).count('1')} common lines")
        return common.bit_length() - 1

    def as_array(self) -> np.ndarray:
        size = self.size
        out = np.zeros((size, size), dtype=np.uint8)
        for x, row in enumerate(self.row_masks):
            for l in range(size):
                if row >> l & 1:
                    out[x, l] = 1
        return out


@dataclass(frozen=True)
class PointPermutation:
    """A permutation of point indices, applied to line indices by the same map."""

    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValueError("mapping is not a bijection")

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def __len__(self) -> int:
        return len(self.mapping)

    def is_identity(self) -> bool:
        return all(v == k for k, v in enumerate(self.mapping))

    def inverse(self) -> PointPermutation:
        inv = [0] * len(self.mapping)
        for k, v in enumerate(self.mapping):
            inv[v] = k
        return PointPermutation(tuple(inv))

    def compose(self, other: PointPermutation) -> PointPermutation:
        """self after other: (self.compose(other))(x) == self(other(x))."""
        return PointPermutation(tuple(self.mapping[other.mapping[x]] for x in range(len(self.mapping))))

    def order(self) -> int:
        k = 1
        cur = self
        while not cur.is_identity():
            cur = cur.compose(self)
            k += 1
        return k


def shift_permutation_matrix(p: int) -> np.ndarray:
    """p x p matrix for the cyclic shift a -> a+1 mod p: entry (a+1 mod p, a) is 1."""
    p = _as_p(p)
    c = np.zeros((p, p), dtype=np.uint8)
    for a in range(p):
        c[(a + 1) % p, a] = 1
    return c


def build_incidence(matrix: ExponentMatrix) -> IncidencePlane:
    """Assemble the order-p plane attached to a fully normalized difference matrix.

    Layout (0-based): point/line 0 is the distinguished flag; points/lines
    1..p index the row/column blocks; point p+1+i*p+a and line p+1+j*p+b are
    the grid cells, incident iff a = b + E[i][j] (mod p).
    """
    if not is_difference_matrix(matrix):
        raise ValueError("matrix is not a difference matrix")
    if not is_fully_normalized(matrix):
        raise ValueError("matrix is not fully normalized")
    p = matrix.p
    size = p * p + p + 1
    rows = [0] * size
    # distinguished point: on line 0 and the p block lines 1..p
    rows[0] = (1 << (p + 1)) - 1
    # row points 1+k: on line 0 and on every grid line of line-block k
    for k in range(p):
        mask = 1
        base = p + 1 + k * p
        for b in range(p):
            mask |= 1 << (base + b)
        rows[1 + k] = mask
    # grid points: block line 1+i, plus one grid line per block j
    for i in range(p):
        row_e = matrix.rows[i]
        for a in range(p):
            mask = 1 << (1 + i)
            for j in range(p):
                b = (a - row_e[j]) % p
                mask |= 1 << (p + 1 + j * p + b)
            rows[p + 1 + i * p + a] = mask
    return IncidencePlane(p, tuple(rows))


def elation_symmetry(p: int) -> PointPermutation:
    """The order-p symmetry: identity on the first p+1 indices, a cyclic
    shift inside each of the p following blocks of size p."""
    p = _as_p(p)
    size = p * p + p + 1
    mapping = list(range(size))
    for i in range(p):
        base = p + 1 + i * p
        for a in range(p):
            mapping[base + a] = base + (a + 1) % p
    return PointPermutation(tuple(mapping))


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str
    witness: tuple
    detail: str


@dataclass(frozen=True)
class PlaneReport:
    n: int
    violations: tuple[AxiomViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_text(self, per_axiom: int = 5) -> str:
        lines = [f"plane order {self.n}: {'PASS' if self.ok else 'FAIL'}"]
        by_axiom: dict[str, list[AxiomViolation]] = {}
        for v in self.violations:
            by_axiom.setdefault(v.axiom, []).append(v)
        for axiom, items in by_axiom.items():
            lines.append(f"  {axiom}: {len(items)} violation(s)")
            for v in items[:per_axiom]:
                lines.append(f"    at {v.witness}: {v.detail}")
            if len(items) > per_axiom:
                lines.append(f"    ... and {len(items) - per_axiom} more")
        return "\n".join(lines) + "\n"


def _coerce_plane(matrix) -> tuple[int | None, int, tuple[int, ...]]:
    """Accept an IncidencePlane or any square 0/1 matrix; returns
    (claimed order or None, size, per-line point masks)."""
    if isinstance(matrix, IncidencePlane):
        return matrix.n, matrix.size, matrix.col_masks
    rows = [list(r) for r in matrix]
    size = len(rows)
    if any(len(r) != size for r in rows):
        raise ValueError("incidence matrix must be square")
    if any(e not in (0, 1) for r in rows for e in r):
        raise ValueError("incidence matrix must be 0/1")
    cols = [0] * size
    for x, row in enumerate(rows):
        for l, e in enumerate(row):
            if e:
                cols[l] |= 1 << x
    return None, size, tuple(cols)


def verify_plane_axioms(plane) -> PlaneReport:
    """Exhaustively check the three defining axioms, reporting witnesses.

    (1) point and line counts are n^2+n+1 for the plane order n, (2) every
    line carries exactly n+1 points, (3) any two distinct lines meet in
    exactly one point.  Accepts an IncidencePlane or a raw square 0/1
    matrix (rows = points); for raw input the order is inferred from the
    size when possible.
    """
    claimed, size, cols = _coerce_plane(plane)
    violations: list[AxiomViolation] = []
    if claimed is None:
        # size must be n^2+n+1 for an integral n >= 2
        n = int((math.isqrt(4 * size - 3) - 1) // 2)
        if n < 2 or n * n + n + 1 != size:
            violations.append(
                AxiomViolation(
                    "point-line-count",
                    (size,),
                    f"{size} is not of the form n^2+n+1 for any order n >= 2",
                )
            )
            n = None
    else:
        n = claimed  # IncidencePlane guarantees the count axiom by construction
    if n is not None:
        for l, col in enumerate(cols):
            k = col.bit_count()
            if k != n + 1:
                violations.append(
                    AxiomViolation(
                        "points-per-line", (l,), f"line {l} has {k} points, expected {n + 1}"
                    )
                )
    for l1 in range(size):
        c1 = cols[l1]
        for l2 in range(l1 + 1, size):
            meet = (c1 & cols[l2]).bit_count()
            if meet != 1:
                violations.append(
                    AxiomViolation(
                        "pairwise-meet", (l1, l2), f"lines meet in {meet} points, expected 1"
                    )
                )
    return PlaneReport(n if n is not None else 0, tuple(violations))


def line_permutation(plane: IncidencePlane, sigma: PointPermutation) -> PointPermutation:
    """The induced map on lines, or raises if sigma is not an automorphism."""
    if len(sigma) != plane.size:
        raise ValueError("permutation size does not match the plane")
    by_points: dict[int, int] = {mask: l for l, mask in enumerate(plane.col_masks)}
    mapping = []
    for l, mask in enumerate(plane.col_masks):
        moved = 0
        m = mask
        while m:
            low = m & -m
            moved |= 1 << sigma(low.bit_length() - 1)
            m ^= low
        target = by_points.get(moved)
        if target is None:
            raise ValueError(f"not an automorphism: image of line {l} is not a line")
        mapping.append(target)
    return PointPermutation(tuple(mapping))


def find_elation_frame(plane: IncidencePlane, sigma: PointPermutation) -> tuple[int, int]:
    """Locate the unique center point and axis line of an order-p elation.

    The axis is the line all of whose points are fixed; the center is the
    point all of whose lines are fixed setwise.  Raises if sigma is not an
    automorphism, is the identity, has order not dividing the plane order,
    or fixes no (or more than one) such flag.
    """
    lperm = line_permutation(plane, sigma)
    if sigma.is_identity():
        raise ValueError("identity permutation rejected: an elation here must have order p")
    order = sigma.order()
    if plane.n % order != 0:
        raise ValueError(f"permutation order {order} does not divide the plane order {plane.n}")
    fixed_points = 0
    for x in range(plane.size):
        if sigma(x) == x:
            fixed_points |= 1 << x
    axes = [l for l, mask in enumerate(plane.col_masks) if mask & ~fixed_points == 0]
    fixed_lines = {l for l in range(plane.size) if lperm(l) == l}
    centers = [
        x
        for x, row in enumerate(plane.row_masks)
        if all((row >> l & 1) == 0 or l in fixed_lines for l in range(plane.size))
    ]
    if len(axes) != 1 or len(centers) != 1:
        raise ValueError(
            f"not an elation: found {len(centers)} center(s) and {len(axes)} axis candidate(s)"
        )
    x, axis = centers[0], axes[0]
    if not plane.incident(x, axis):
        raise ValueError("center does not lie on the axis; not an elation")
    return x, axis


@dataclass(frozen=True)
class PlaneFrame:
    """A plane with an order-p elation and base points pinning an exponent chart.

    base_lines[i] joins y to the i-th shift of z; base_points[i] is where
    base_lines[0] meets the (-i)-th shift of base_lines[1].  base_points[0]
    is y and base_points[1] is z.
    """

    plane: IncidencePlane
    sigma: PointPermutation
    line_perm: PointPermutation
    center: int
    axis: int
    y: int
    z: int
    base_lines: tuple[int, ...]
    base_points: tuple[int, ...]


def build_frame(plane: IncidencePlane, sigma: PointPermutation, y: int, z: int) -> PlaneFrame:
    """Validate (plane, sigma, y, z) and derive the frame's lines and points."""
    p = plane.n
    center, axis = find_elation_frame(plane, sigma)
    axis_points = plane.col_masks[axis]
    for name, pt in (("y", y), ("z", z)):
        if axis_points >> pt & 1:
            raise ValueError(f"base point {name}={pt} lies on the axis")
    if y == z:
        raise ValueError("base points must be distinct")
    if plane.incident(center, plane.line_through(y, z)):
        raise ValueError("center, y and z are collinear")
    lperm = line_permutation(plane, sigma)
    # orbit of z under sigma
    z_orbit = [z]
    for _ in range(p - 1):
        z_orbit.append(sigma(z_orbit[-1]))
    base_lines = tuple(plane.line_through(y, zi) for zi in z_orbit)
    lperm_inv = lperm.inverse()
    base_points = []
    shifted = base_lines[1]
    for i in range(p):
        common = plane.col_masks[base_lines[0]] & plane.col_masks[shifted]
        if i == 0:
            base_points.append(y)
        else:
            if common == 0 or common & (common - 1):
                raise ValueError(f"frame degenerate: base point {i} is not unique")
            base_points.append(common.bit_length() - 1)
        shifted = lperm_inv(shifted)
    if base_points[1] != z:
        raise ValueError("frame inconsistency: second base point is not z")
    return PlaneFrame(
        plane, sigma, lperm, center, axis, y, z, base_lines, tuple(base_points)
    )


def extract_exponent_matrix(frame: PlaneFrame) -> ExponentMatrix:
    """Read the exponent matrix out of a frame: entry (i,j) is the unique
    shift power moving base point i onto base line j."""
    plane = frame.plane
    p = plane.n
    rows = []
    for i in range(p):
        point_orbit = [frame.base_points[i]]
        for _ in range(p - 1):
            point_orbit.append(frame.sigma(point_orbit[-1]))
        row = []
        for j in range(p):
            line_mask = 1 << frame.base_lines[j]
            hits = [e for e in range(p) if plane.row_masks[point_orbit[e]] & line_mask]
            if len(hits) != 1:
                raise ValueError(
                    f"frame invariant violated: {len(hits)} shift powers move base point "
                    f"{i} onto base line {j}, expected exactly 1"
                )
            row.append(hits[0])
        rows.append(tuple(row))
    return ExponentMatrix(p, tuple(rows))


def canonical_frame(plane: IncidencePlane) -> PlaneFrame:
    """The frame used for round trips on built planes: the block-shift
    symmetry with base points at the first cells of grid blocks 0 and 1."""
    p = plane.n
    return build_frame(plane, elation_symmetry(p), p + 1, 2 * p + 1)


def plane_to_text(plane: IncidencePlane) -> str:
    size = plane.size
    lines = [f"n={plane.n}"]
    for row in plane.row_masks:
        lines.append("".join("1" if row >> l & 1 else "0" for l in range(size)))
    return "\n".join(lines) + "\n"


def plane_from_text(text: str) -> IncidencePlane:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise ValueError("expected a first line of the form n=<order>")
    n = int(lines[0][2:])
    size = n * n + n + 1
    if len(lines) != size + 1:
        raise ValueError(f"expected {size} rows, found {len(lines) - 1}")
    masks = []
    for k, ln in enumerate(lines[1:], start=2):
        if len(ln) != size or set(ln) - {"0", "1"}:
            raise ValueError(f"bad 0/1 row at line {k}")
        masks.append(sum(1 << l for l, ch in enumerate(ln) if ch == "1"))
    return IncidencePlane(n, tuple(masks))


def symmetry_preserves_incidence(plane: IncidencePlane, sigma: PointPermutation) -> bool:
    """Exact check that conjugating points and lines by sigma fixes the matrix."""
    try:
        lperm = line_permutation(plane, sigma)
    except ValueError:
        return False
    for x, row in enumerate(plane.row_masks):
        moved = 0
        m = row
        while m:
            low = m & -m
            moved |= 1 << lperm(low.bit_length() - 1)
            m ^= low
        if moved != plane.row_masks[sigma(x)]:
            return False
    return True
