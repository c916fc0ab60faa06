import cmath
import math
import random

import pytest

from butson.algebra import (
    CandidateSet,
    ExponentMatrix,
    NormalizationTrace,
    PrimeModulus,
    apply_equivalence,
    check_bh_equivalence,
    cyclotomic_sum_is_zero,
    fourier_exponents,
    fully_normalize,
    is_difference_matrix,
    is_fully_normalized,
    matrices_from_text,
    matrices_to_text,
    matrix_from_text,
    matrix_to_text,
    transpose,
)
from conftest import random_matrix, random_trace, scrambled

SMALL_PRIMES = [2, 3, 5, 7, 11, 13]
ALL_PRIMES = SMALL_PRIMES + [17, 19, 23, 29, 31]


def row_pair_differences_cover_field(m: ExponentMatrix, i: int, j: int) -> bool:
    # independent multiset check, straight from the definition
    diffs = sorted((m.rows[i][k] - m.rows[j][k]) % m.p for k in range(m.p))
    return diffs == list(range(m.p))


def test_prime_modulus_validation():
    assert PrimeModulus(31).p == 31
    for bad in (0, 1, 4, 9, 15, 33, 37):
        with pytest.raises(ValueError):
            PrimeModulus(bad)


def test_fourier_small_values():
    assert fourier_exponents(3).rows == ((0, 0, 0), (0, 1, 2), (0, 2, 1))
    assert fourier_exponents(2).rows == ((0, 0), (0, 1))
    assert fourier_exponents(5).rows[2] == (0, 2, 4, 1, 3)


@pytest.mark.parametrize("p", ALL_PRIMES)
def test_fourier_is_difference_matrix_and_normalized(p):
    f = fourier_exponents(p)
    assert is_difference_matrix(f)
    assert is_fully_normalized(f)
    assert transpose(f) == f


def test_difference_matrix_rejects_constant_rows():
    zero = ExponentMatrix(5, tuple((0,) * 5 for _ in range(5)))
    assert not is_difference_matrix(zero)


def test_difference_matrix_detects_single_entry_change():
    f = fourier_exponents(11)
    rows = [list(r) for r in f.rows]
    rows[3][4] = (rows[3][4] + 1) % 11
    bumped = ExponentMatrix(11, tuple(tuple(r) for r in rows))
    assert not is_difference_matrix(bumped)
    # the damage is visible in the row pair (0,3) already
    assert row_pair_differences_cover_field(f, 0, 3)
    assert not row_pair_differences_cover_field(bumped, 0, 3)


def test_cyclotomic_sum_small_cases():
    assert cyclotomic_sum_is_zero([0, 1, 2, 3, 4], 5)
    assert not cyclotomic_sum_is_zero([0, 0, 1, 2, 3, 4], 5)
    with pytest.raises(ValueError):
        cyclotomic_sum_is_zero([], 5)
    f = fourier_exponents(7)
    for i in range(7):
        for j in range(7):
            if i != j:
                diffs = [(f.rows[i][k] - f.rows[j][k]) % 7 for k in range(7)]
                assert cyclotomic_sum_is_zero(diffs, 7)


def test_cyclotomic_sum_matches_numeric_evaluation(rng):
    # numeric oracle: evaluate the actual complex sum
    for p in (3, 5, 7):
        zeta = cmath.exp(2j * math.pi / p)
        for _ in range(300):
            exps = [rng.randrange(p) for _ in range(rng.randrange(1, 3 * p))]
            numeric = abs(sum(zeta**e for e in exps)) < 1e-9
            assert cyclotomic_sum_is_zero(exps, p) == numeric


def test_check_bh_equivalence_examples():
    assert check_bh_equivalence(fourier_exponents(5))
    rows = list(fourier_exponents(5).rows)
    rows[3] = rows[2]
    assert not check_bh_equivalence(ExponentMatrix(5, tuple(rows)))


def test_check_bh_equivalence_agrees_with_difference_test(rng):
    hits = 0
    for _ in range(1000):
        m = random_matrix(7, rng)
        got = check_bh_equivalence(m)  # raises internally on any disagreement
        assert got == is_difference_matrix(m)
        hits += got
    # random matrices are essentially never difference matrices; exercise the
    # true branch explicitly through scrambles
    for _ in range(50):
        m = scrambled(fourier_exponents(7), rng)
        assert check_bh_equivalence(m)
        assert is_difference_matrix(m)


def test_apply_equivalence_identity_and_dimension_check():
    f = fourier_exponents(5)
    assert apply_equivalence(f, NormalizationTrace.identity(5)) == f
    with pytest.raises(ValueError):
        apply_equivalence(f, NormalizationTrace.identity(7))


def test_apply_equivalence_preserves_difference_property(rng):
    f = fourier_exponents(7)
    # add 1 to every entry of row 0
    shifts = [0] * 7
    shifts[0] = 1
    t = NormalizationTrace(7, tuple(range(7)), tuple(range(7)), tuple(shifts), (0,) * 7)
    assert is_difference_matrix(apply_equivalence(f, t))
    # swap rows 2 and 3
    perm = [0, 1, 3, 2, 4, 5, 6]
    t = NormalizationTrace(7, tuple(perm), tuple(range(7)), (0,) * 7, (0,) * 7)
    assert is_difference_matrix(apply_equivalence(f, t))
    for _ in range(100):
        assert is_difference_matrix(scrambled(f, rng))


def test_transpose_involution_and_difference_preservation(rng):
    for p in (5, 7):
        for _ in range(50):
            m = random_matrix(p, rng)
            assert transpose(transpose(m)) == m
            assert is_difference_matrix(m) == is_difference_matrix(transpose(m))
        m = scrambled(fourier_exponents(p), rng)
        assert is_difference_matrix(transpose(m))


def test_is_fully_normalized_examples():
    assert is_fully_normalized(fourier_exponents(13))
    f = fourier_exponents(5)
    rows = list(f.rows)
    rows[2], rows[3] = rows[3], rows[2]
    assert not is_fully_normalized(ExponentMatrix(5, tuple(rows)))


def test_fully_normalize_fixes_fourier():
    f = fourier_exponents(7)
    normalized, trace = fully_normalize(f)
    assert normalized == f
    assert trace == NormalizationTrace.identity(7)


def test_fully_normalize_specific_scramble():
    # add 3 to column 2 of the p=5 matrix, then swap rows 1 and 4
    f = fourier_exponents(5)
    shifts = [0] * 5
    shifts[2] = 3
    t1 = NormalizationTrace(5, tuple(range(5)), tuple(range(5)), (0,) * 5, tuple(shifts))
    t2 = NormalizationTrace(5, (0, 4, 2, 3, 1), tuple(range(5)), (0,) * 5, (0,) * 5)
    scrambled_m = apply_equivalence(apply_equivalence(f, t1), t2)
    normalized, trace = fully_normalize(scrambled_m)
    assert normalized == f
    assert apply_equivalence(scrambled_m, trace) == normalized


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_fully_normalize_recovers_fourier_from_scrambles(p, rng):
    f = fourier_exponents(p)
    for _ in range(25):
        m = scrambled(f, rng)
        normalized, trace = fully_normalize(m)
        assert normalized == f
        assert is_fully_normalized(normalized)
        # the trace reproduces the output from the input, exactly
        assert apply_equivalence(m, trace) == normalized


def test_fully_normalize_rejects_non_difference_matrix():
    zero = ExponentMatrix(5, tuple((0,) * 5 for _ in range(5)))
    with pytest.raises(ValueError):
        fully_normalize(zero)


def test_matrix_text_round_trip(rng):
    f = fourier_exponents(7)
    text = matrix_to_text(f)
    assert text.splitlines()[0] == "7"
    assert matrix_from_text(text) == f
    assert matrix_to_text(matrix_from_text(text)) == text
    batch = [fourier_exponents(5), scrambled(fourier_exponents(5), rng), fourier_exponents(3)]
    blob = matrices_to_text(batch)
    assert matrices_from_text(blob) == batch
    assert matrices_to_text(matrices_from_text(blob)) == blob


def test_matrix_text_errors():
    with pytest.raises(ValueError):
        matrix_from_text("x\n")
    with pytest.raises(ValueError):
        matrix_from_text("3\n0 0 0\n0 1 2\n")  # truncated
    with pytest.raises(ValueError):
        matrix_from_text("3\n0 0 0\n0 1 2\n0 2\n")  # short row
    with pytest.raises(ValueError):
        matrix_from_text(matrix_to_text(fourier_exponents(3)) * 2)  # two records


def test_candidate_set_basics():
    full = CandidateSet.full(7)
    assert len(full) == 7 and full.smallest() == 0
    c = CandidateSet.from_values(7, [5, 1, 5])
    assert sorted(c) == [1, 5]
    assert 5 in c and 2 not in c
    assert c.smallest() == 1
    with pytest.raises(ValueError):
        CandidateSet(5, 1 << 5)
    with pytest.raises(ValueError):
        CandidateSet(5, 0).smallest()


def test_exponent_matrix_validation():
    with pytest.raises(ValueError):
        ExponentMatrix(5, ((0,) * 5,) * 4)
    with pytest.raises(ValueError):
        ExponentMatrix(5, tuple((0, 0, 0, 0, 5) for _ in range(5)))


def test_normalization_trace_validation():
    with pytest.raises(ValueError):
        NormalizationTrace(5, (0, 0, 1, 2, 3), tuple(range(5)), (0,) * 5, (0,) * 5)
    with pytest.raises(ValueError):
        NormalizationTrace(5, tuple(range(5)), tuple(range(5)), (0,) * 4, (0,) * 5)
