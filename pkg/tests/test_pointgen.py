import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qunet.constructions import faure_matrices, hammersley_matrices, lp_matrices, vdc_matrices
from qunet.pointgen import (
    NetPoints,
    ShiftVector,
    box_counts_ok,
    compositions,
    digital_shift,
    generate_points,
    point_digits,
    point_of_index,
    read_points,
    shift_point,
    write_points,
)


def radical_inverse(n, b, m):
    """Digits of n reversed, as an integer scaled by b^m."""
    out = 0
    for _ in range(m):
        n, r = divmod(n, b)
        out = out * b + r
    return out


@pytest.mark.parametrize("b,m", [(2, 1), (2, 6), (3, 4), (5, 3), (7, 2)])
def test_van_der_corput_is_the_radical_inverse(b, m):
    pts = generate_points(vdc_matrices(b, m))
    assert pts.coords[:, 0].tolist() == [radical_inverse(n, b, m) for n in range(b**m)]


def test_hammersley_second_axis_is_the_index():
    pts = generate_points(hammersley_matrices(3, 4))
    assert pts.coords[:, 1].tolist() == list(range(81))


def test_single_points_match_the_batch():
    spec = faure_matrices(5, 4)
    pts = generate_points(spec)
    for n in (0, 1, 17, 311, 624):
        assert point_of_index(spec, n) == tuple(pts.coords[n].tolist())
    assert point_digits(faure_matrices(3, 2), 1) == [[1, 0]] * 3
    with pytest.raises(ValueError):
        point_of_index(spec, 625)


def test_prefix_and_count():
    spec = lp_matrices(2, 5)
    full = generate_points(spec)
    assert generate_points(spec, 7) == full.prefix(7)
    with pytest.raises(ValueError):
        generate_points(spec, 33)


@given(st.sampled_from([2, 3, 5]), st.integers(1, 4), st.integers(0, 2**31))
@settings(max_examples=60, deadline=None)
def test_digital_shift_is_a_bijection_and_an_involution_up_to_negation(b, m, seed):
    rng = np.random.default_rng(seed)
    pts = generate_points(lp_matrices(b, m))
    delta = ShiftVector.random(b, m, 2, rng)
    shifted = digital_shift(pts, delta)
    for j in range(2):
        assert sorted(shifted.coords[:, j].tolist()) == list(range(b**m))
    neg = ShiftVector(b, m, (-delta.digits) % b)
    assert digital_shift(shifted, neg) == pts
    for n in (0, b**m - 1):
        assert shift_point(tuple(pts.coords[n].tolist()), delta) == tuple(shifted.coords[n].tolist())


def test_shift_vector_conversions():
    delta = ShiftVector.from_ints(3, 3, [5, 26])
    assert delta.digits.tolist() == [[0, 1, 2], [2, 2, 2]]
    assert delta.to_ints() == [5, 26]
    with pytest.raises(ValueError):
        ShiftVector(2, 3, [[0, 2, 1]])


def test_box_counts_identify_t():
    assert box_counts_ok(generate_points(lp_matrices(3, 4)), 0)
    same = NetPoints(2, 3, np.repeat(np.arange(8)[:, None], 2, axis=1))
    assert not box_counts_ok(same, 0)
    assert box_counts_ok(same, 2)
    with pytest.raises(ValueError):
        box_counts_ok(same.prefix(4), 0)


def test_compositions():
    assert list(compositions(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert len(list(compositions(5, 3))) == 21


def test_point_file_round_trip(tmp_path):
    pts = generate_points(faure_matrices(3, 3))
    path = tmp_path / "pts.txt"
    write_points(pts, path)
    assert read_points(path) == pts
    path.write_text("2 2 1 3\n0\n1\n")
    with pytest.raises(ValueError):
        read_points(path)


def test_coordinates_validated():
    with pytest.raises(ValueError):
        NetPoints(2, 2, [[4]])
