import pytest

from butson.orders import (
    BUILTIN_KINDS,
    AdmissibleOrder,
    builtin_order,
    canonical_kind,
    core_indices,
    is_admissible,
)


def test_diagonal1_prefix():
    order = builtin_order("D", 7)
    assert order.sequence[:9] == (
        (2, 2), (2, 3), (3, 2), (3, 3), (2, 4), (3, 4), (4, 2), (4, 3), (4, 4),
    )


def test_diagonal2_prefix():
    order = builtin_order("D2", 7)
    assert order.sequence[:6] == ((2, 2), (2, 3), (3, 2), (2, 4), (3, 3), (4, 2))


def test_horizontal_p5_full():
    order = builtin_order("H", 5)
    assert order.sequence == (
        (2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4), (4, 2), (4, 3), (4, 4),
    )


@pytest.mark.parametrize("kind", BUILTIN_KINDS)
@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17])
def test_builtin_orders_are_admissible(kind, p):
    order = builtin_order(kind, p)
    assert len(order) == (p - 2) ** 2
    assert is_admissible(order.sequence, p)


def test_column_major_is_admissible():
    p = 7
    seq = [(i, j) for j in range(2, p) for i in range(2, p)]
    assert seq[:3] == [(2, 2), (3, 2), (4, 2)]
    assert is_admissible(seq, p)


def test_reversed_horizontal_not_admissible():
    p = 7
    seq = list(reversed(builtin_order("H", p).sequence))
    assert seq[0] == (p - 1, p - 1)
    assert not is_admissible(seq, p)


def test_is_admissible_requires_permutation():
    with pytest.raises(ValueError):
        is_admissible([(2, 2), (2, 3)], 7)
    with pytest.raises(ValueError):
        is_admissible([(2, 2)] * 25, 7)


def test_admissible_order_constructor_validates():
    p = 5
    good = builtin_order("H", p).sequence
    AdmissibleOrder(p, good)
    bad = (good[1], good[0]) + good[2:]
    with pytest.raises(ValueError):
        AdmissibleOrder(p, bad)


def test_kind_aliases():
    assert canonical_kind("h") == "horizontal"
    assert canonical_kind("D2") == "diagonal2"
    assert canonical_kind("diagonal1") == "diagonal1"
    with pytest.raises(ValueError):
        canonical_kind("vertical")
    with pytest.raises(ValueError):
        builtin_order("H", 2)


def test_position_lookup():
    order = builtin_order("H", 5)
    assert order.position((2, 2)) == 0
    assert order.position((3, 2)) == 3
    assert order.last() == (4, 4)
    assert (4, 4) in order and (1, 1) not in order
    with pytest.raises(ValueError):
        order.position((1, 2))
    assert core_indices(4) == {(2, 2), (2, 3), (3, 2), (3, 3)}
