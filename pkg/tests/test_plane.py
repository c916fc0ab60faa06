import numpy as np
import pytest

from butson.algebra import fourier_exponents, transpose
from butson.plane import (
    IncidencePlane,
    PointPermutation,
    build_frame,
    build_incidence,
    canonical_frame,
    elation_symmetry,
    extract_exponent_matrix,
    find_elation_frame,
    line_permutation,
    plane_from_text,
    plane_to_text,
    shift_permutation_matrix,
    symmetry_preserves_incidence,
    verify_plane_axioms,
)
from butson.search import enumerate_solutions


def test_shift_matrix_values():
    assert shift_permutation_matrix(2).tolist() == [[0, 1], [1, 0]]
    c3 = shift_permutation_matrix(3)
    assert np.array_equal(np.linalg.matrix_power(c3, 3), np.eye(3, dtype=c3.dtype))
    # column a carries the image of a: C^a applied to e_0 gives e_a
    for p in (3, 5, 7):
        c = shift_permutation_matrix(p)
        e0 = np.zeros(p, dtype=int)
        e0[0] = 1
        for a in range(p):
            ea = np.linalg.matrix_power(c.astype(int), a) @ e0
            expected = np.zeros(p, dtype=int)
            expected[a] = 1
            assert np.array_equal(ea, expected)


def test_build_incidence_fano():
    plane = build_incidence(fourier_exponents(2))
    assert plane.size == 7
    report = verify_plane_axioms(plane)
    assert report.ok, report.as_text()
    for col in plane.col_masks:
        assert col.bit_count() == 3


def test_build_incidence_order5_column_sums():
    plane = build_incidence(fourier_exponents(5))
    assert plane.size == 31
    for col in plane.col_masks:
        assert col.bit_count() == 6
    for row in plane.row_masks:
        assert row.bit_count() == 6
    assert verify_plane_axioms(plane).ok


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13])
def test_enumerated_solutions_yield_planes(p):
    sols, _ = enumerate_solutions(p)
    for m in sols:
        plane = build_incidence(m)
        assert verify_plane_axioms(plane).ok
        assert symmetry_preserves_incidence(plane, elation_symmetry(p))


def test_build_incidence_preconditions():
    f = fourier_exponents(5)
    rows = [list(r) for r in f.rows]
    rows[2], rows[3] = rows[3], rows[2]
    from butson.algebra import ExponentMatrix

    shuffled = ExponentMatrix(5, tuple(tuple(r) for r in rows))
    with pytest.raises(ValueError):
        build_incidence(shuffled)  # difference matrix but not normalized
    zero = ExponentMatrix(5, tuple((0,) * 5 for _ in range(5)))
    with pytest.raises(ValueError):
        build_incidence(zero)


def test_elation_symmetry_cycle_structure():
    sigma = elation_symmetry(3)
    assert [sigma(k) for k in range(4)] == [0, 1, 2, 3]
    assert [sigma(k) for k in (4, 5, 6)] == [5, 6, 4]
    assert [sigma(k) for k in (7, 8, 9)] == [8, 9, 7]
    assert [sigma(k) for k in (10, 11, 12)] == [11, 12, 10]
    assert sigma.order() == 3
    for p in (2, 5, 7):
        assert elation_symmetry(p).order() == p


def test_symmetry_is_exact_matrix_identity():
    for p in (2, 3, 5, 7):
        plane = build_incidence(fourier_exponents(p))
        sigma = elation_symmetry(p)
        # independent check with explicit matrices: R Q R^T == Q
        q = plane.as_array().astype(int)
        size = plane.size
        r = np.zeros((size, size), dtype=int)
        for x in range(size):
            r[sigma(x), x] = 1
        assert np.array_equal(r @ q @ r.T, q)
        assert symmetry_preserves_incidence(plane, sigma)


def test_verify_axioms_flipped_entry():
    plane = build_incidence(fourier_exponents(3))
    masks = list(plane.row_masks)
    masks[5] ^= 1 << 7  # flip one incidence
    broken = IncidencePlane(3, tuple(masks))
    report = verify_plane_axioms(broken)
    assert not report.ok
    axioms = {v.axiom for v in report.violations}
    assert "pairwise-meet" in axioms
    witness = next(v for v in report.violations if v.axiom == "pairwise-meet")
    assert len(witness.witness) == 2
    assert "FAIL" in report.as_text()


def test_verify_axioms_all_zero_matrix():
    report = verify_plane_axioms([[0] * 7 for _ in range(7)])
    assert not report.ok
    axioms = {v.axiom for v in report.violations}
    assert {"points-per-line", "pairwise-meet"} <= axioms


def test_verify_axioms_raw_input_validation():
    with pytest.raises(ValueError):
        verify_plane_axioms([[0, 1], [1, 0], [0, 0]])
    with pytest.raises(ValueError):
        verify_plane_axioms([[0, 2], [1, 0]])
    # a size with no valid plane order
    report = verify_plane_axioms([[1] * 5 for _ in range(5)])
    assert any(v.axiom == "point-line-count" for v in report.violations)


def test_verify_axioms_accepts_raw_fano_array():
    plane = build_incidence(fourier_exponents(2))
    report = verify_plane_axioms(plane.as_array().tolist())
    assert report.ok and report.n == 2


def test_find_elation_frame_examples():
    plane = build_incidence(fourier_exponents(5))
    sigma = elation_symmetry(5)
    assert find_elation_frame(plane, sigma) == (0, 0)
    with pytest.raises(ValueError):
        find_elation_frame(plane, PointPermutation(tuple(range(plane.size))))
    # powers of an elation share center and axis
    sq = sigma.compose(sigma)
    assert find_elation_frame(plane, sq) == (0, 0)
    plane7 = build_incidence(fourier_exponents(7))
    sigma7 = elation_symmetry(7)
    assert find_elation_frame(plane7, sigma7.compose(sigma7)) == (0, 0)


def test_find_elation_frame_rejects_non_automorphism():
    plane = build_incidence(fourier_exponents(3))
    mapping = list(range(plane.size))
    mapping[0], mapping[4] = mapping[4], mapping[0]
    with pytest.raises(ValueError):
        line_permutation(plane, PointPermutation(tuple(mapping)))
    with pytest.raises(ValueError):
        find_elation_frame(plane, PointPermutation(tuple(mapping)))


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_exponent_round_trip_fourier(p):
    plane = build_incidence(fourier_exponents(p))
    frame = build_frame(plane, elation_symmetry(p), p + 1, 2 * p + 1)
    assert frame.center == 0 and frame.axis == 0
    assert frame.base_points[0] == frame.y
    assert frame.base_points[1] == frame.z
    extracted = extract_exponent_matrix(frame)
    assert extracted == fourier_exponents(p)
    # borders come out zero / identity by construction
    assert all(extracted.rows[0][k] == 0 and extracted.rows[k][0] == 0 for k in range(p))


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_exponent_round_trip_enumerated(p):
    sols, _ = enumerate_solutions(p)
    for m in sols + [transpose(s) for s in sols]:
        plane = build_incidence(m)
        assert extract_exponent_matrix(canonical_frame(plane)) == m


def test_extraction_from_noncanonical_frames():
    # any valid base-point pair must yield a fully normalized difference
    # matrix; for these orders that matrix is forced to be the standard one
    from butson.algebra import is_difference_matrix, is_fully_normalized

    for p in (3, 5, 7):
        plane = build_incidence(fourier_exponents(p))
        sigma = elation_symmetry(p)
        pairs = [
            (p + 2, 2 * p + 1),          # shifted y inside grid block 0
            (p + 1, 2 * p + 2),          # shifted z inside grid block 1
            (p + 1, 3 * p + 1 if p > 2 else 2 * p + 2),  # z from a later block
        ]
        for y, z in pairs:
            extracted = extract_exponent_matrix(build_frame(plane, sigma, y, z))
            assert is_fully_normalized(extracted)
            assert is_difference_matrix(extracted)
            assert extracted == fourier_exponents(p)


def test_extraction_with_power_of_shift_symmetry():
    from butson.algebra import is_difference_matrix, is_fully_normalized

    p = 5
    plane = build_incidence(fourier_exponents(p))
    sigma = elation_symmetry(p).compose(elation_symmetry(p))  # still order p
    extracted = extract_exponent_matrix(build_frame(plane, sigma, p + 1, 2 * p + 1))
    assert is_fully_normalized(extracted)
    assert is_difference_matrix(extracted)


def test_frame_validation_errors():
    p = 5
    plane = build_incidence(fourier_exponents(p))
    sigma = elation_symmetry(p)
    with pytest.raises(ValueError):
        build_frame(plane, sigma, 1, 2 * p + 1)  # y on the axis
    with pytest.raises(ValueError):
        build_frame(plane, sigma, p + 1, p + 1)  # y == z
    with pytest.raises(ValueError):
        build_frame(plane, sigma, p + 1, p + 2)  # x, y, z collinear


def test_plane_text_round_trip():
    plane = build_incidence(fourier_exponents(3))
    text = plane_to_text(plane)
    assert text.startswith("n=3\n")
    again = plane_from_text(text)
    assert again == plane
    assert plane_to_text(again) == text
    with pytest.raises(ValueError):
        plane_from_text("m=3\n")
    with pytest.raises(ValueError):
        plane_from_text("n=3\n010\n")
    bad = text.replace("1", "2", 1)
    with pytest.raises(ValueError):
        plane_from_text(bad)


def test_point_permutation_basics():
    sigma = elation_symmetry(3)
    inv = sigma.inverse()
    assert inv.compose(sigma).is_identity()
    assert sigma.compose(inv).is_identity()
    with pytest.raises(ValueError):
        PointPermutation((0, 0, 1))
