"""Total orders on the core index set {(i,j) : 2 <= i,j <= p-1}.

An order is admissible when it starts at (2,2) and every index dominated
componentwise by (i,j) appears no later than (i,j).  That guarantees the
candidate computation at (i,j) only reads already-assigned entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import _as_p

DIAGONAL1 = "diagonal1"
DIAGONAL2 = "diagonal2"
HORIZONTAL = "horizontal"
CUSTOM = "custom"

BUILTIN_KINDS = (DIAGONAL1, DIAGONAL2, HORIZONTAL)

_ALIASES = {
    "d": DIAGONAL1,
    "d1": DIAGONAL1,
    "diagonal1": DIAGONAL1,
    "d2": DIAGONAL2,
    "diagonal2": DIAGONAL2,
    "h": HORIZONTAL,
    "horizontal": HORIZONTAL,
}


def canonical_kind(name: str) -> str:
    try:
        return _ALIASES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown order kind {name!r}; expected one of D, D2, H") from None


def core_indices(p: int) -> set[tuple[int, int]]:
    return {(i, j) for i in range(2, p) for j in range(2, p)}


def is_admissible(sequence: list[tuple[int, int]] | tuple[tuple[int, int], ...], p: int) -> bool:
    """Brute-force check of both admissibility conditions."""
    seq = list(sequence)
    if sorted(seq) != sorted(core_indices(p)):
        raise ValueError("sequence is not a permutation of the core index set")
    if not seq:
        return True
    if seq[0] != (2, 2):
        return False
    position = {ij: k for k, ij in enumerate(seq)}
    for (i, j), pos in position.items():
        for k in range(2, i + 1):
            for l in range(2, j + 1):
                if position[(k, l)] > pos:
                    return False
    return True


@dataclass(frozen=True)
class AdmissibleOrder:
    """A validated admissible total order over the core indices."""

    p: int
    sequence: tuple[tuple[int, int], ...]
    kind: str = CUSTOM
    _position: dict[tuple[int, int], int] = field(
        init=False, repr=False, compare=False, hash=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        p = _as_p(self.p)
        if p > 2 and not is_admissible(self.sequence, p):
            raise ValueError("sequence violates the admissibility conditions")
        if p == 2 and self.sequence:
            raise ValueError("core index set is empty for p=2")
        self._position.update({ij: k for k, ij in enumerate(self.sequence)})

    def __len__(self) -> int:
        return len(self.sequence)

    def position(self, index: tuple[int, int]) -> int:
        try:
            return self._position[index]
        except KeyError:
            raise ValueError(f"{index} is not a core index of this order") from None

    def __contains__(self, index: tuple[int, int]) -> bool:
        return index in self._position

    def last(self) -> tuple[int, int]:
        return self.sequence[-1]


def _diagonal1_sequence(p: int) -> list[tuple[int, int]]:
    # growing square shells: for shell k, new column cells, new row cells, corner
    seq: list[tuple[int, int]] = []
    for k in range(2, p):
        seq.extend((i, k) for i in range(2, k))
        seq.extend((k, j) for j in range(2, k))
        seq.append((k, k))
    return seq


def _diagonal2_sequence(p: int) -> list[tuple[int, int]]:
    # anti-diagonals i+j = 4, 5, ..., i increasing within each
    seq: list[tuple[int, int]] = []
    for s in range(4, 2 * p - 1):
        for i in range(max(2, s - (p - 1)), min(p - 1, s - 2) + 1):
            seq.append((i, s - i))
    return seq


def _horizontal_sequence(p: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(2, p) for j in range(2, p)]


def builtin_order(kind: str, p: int) -> AdmissibleOrder:
    """One of the three stock orders: diagonal1, diagonal2, horizontal."""
    p = _as_p(p)
    kind = canonical_kind(kind)
    if p < 3:
        raise ValueError("builtin orders need p >= 3")
    if kind == DIAGONAL1:
        seq = _diagonal1_sequence(p)
    elif kind == DIAGONAL2:
        seq = _diagonal2_sequence(p)
    elif kind == HORIZONTAL:
        seq = _horizontal_sequence(p)
    else:  # pragma: no cover - canonical_kind already rejects others
        raise ValueError(f"unknown order kind {kind!r}")
    return AdmissibleOrder(p, tuple(seq), kind)
