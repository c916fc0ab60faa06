import random

import pytest

from butson.algebra import ExponentMatrix, NormalizationTrace, apply_equivalence


def random_trace(p: int, rng: random.Random) -> NormalizationTrace:
    rows = list(range(p))
    cols = list(range(p))
    rng.shuffle(rows)
    rng.shuffle(cols)
    return NormalizationTrace(
        p,
        tuple(rows),
        tuple(cols),
        tuple(rng.randrange(p) for _ in range(p)),
        tuple(rng.randrange(p) for _ in range(p)),
    )


def scrambled(matrix: ExponentMatrix, rng: random.Random) -> ExponentMatrix:
    return apply_equivalence(matrix, random_trace(matrix.p, rng))


def random_matrix(p: int, rng: random.Random) -> ExponentMatrix:
    return ExponentMatrix(
        p, tuple(tuple(rng.randrange(p) for _ in range(p)) for _ in range(p))
    )


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xBADA55)
