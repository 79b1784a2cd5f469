from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qunet.constructions import hammersley_matrices, lp_matrices, vdc_matrices
from qunet.geometry import (
    INF,
    analyze,
    covering_radius_1d_exact,
    covering_radius_bracket,
    mesh_ratio_ok,
    pair_distance,
    separation_radius,
    tmd_net_covering_bound,
    volume_bounds,
)
from qunet.pointgen import NetPoints, ShiftVector, digital_shift, generate_points


@st.composite
def point_sets(draw, max_d=3):
    b = draw(st.sampled_from([2, 3]))
    m = draw(st.integers(1, 4))
    d = draw(st.integers(1, max_d))
    n = draw(st.integers(2, min(b**m, 24)))
    flat = draw(st.lists(st.integers(0, b**m - 1), min_size=n * d, max_size=n * d))
    return NetPoints(b, m, np.array(flat).reshape(n, d))


def slow_min_distance(points, p, toroidal):
    c = points.coords.tolist()
    return min(pair_distance(c[i], c[j], points.scale, p, toroidal)
               for i in range(len(c)) for j in range(i + 1, len(c)))


@given(point_sets(), st.sampled_from([1, 2, INF]), st.booleans())
@settings(max_examples=150, deadline=None)
def test_separation_methods_agree_with_all_pairs(points, p, toroidal):
    dist = slow_min_distance(points, p, toroidal)
    want = dist / 4 if p == 2 else dist / 2
    methods = ["bruteforce", "kdtree"] + (["sorted"] if points.d == 1 else [])
    for method in methods:
        q, (i, j) = separation_radius(points, p, toroidal, method)
        assert q == want, method
        assert i < j
        c = points.coords.tolist()
        assert pair_distance(c[i], c[j], points.scale, p, toroidal) == dist


@given(point_sets(), st.sampled_from([1, 2, INF]))
@settings(max_examples=80, deadline=None)
def test_wrapping_never_increases_separation(points, p):
    assert separation_radius(points, p, True)[0] <= separation_radius(points, p, False)[0]


def test_sorted_method_needs_one_dimension():
    pts = generate_points(lp_matrices(2, 3))
    with pytest.raises(ValueError):
        separation_radius(pts, INF, False, "sorted")
    with pytest.raises(ValueError):
        separation_radius(pts, INF, False, "octree")
    with pytest.raises(ValueError):
        separation_radius(pts, 3)


def grid_lower_oracle(points, p, r, toroidal):
    """Max over all cell centres and vertices of the nearest-point distance, pair by pair."""
    b, d = points.b, points.d
    den = 2 * b ** max(points.m, r)
    step = den // b**r
    vertices = product(range(0, den + 1, step), repeat=d)
    centres = product(range(step // 2, den, step), repeat=d)
    pts = (points.coords * (den // points.scale)).tolist()
    best = Fraction(0)
    for y in list(vertices) + list(centres):
        near = min(pair_distance(y, x, den, p, toroidal) for x in pts)
        best = max(best, near)
    return best


@given(point_sets(max_d=2), st.sampled_from([1, 2, INF]), st.booleans(), st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_covering_lower_end_matches_exhaustive_grid_scan(points, p, toroidal, r):
    lo, hi = covering_radius_bracket(points, p, r, toroidal)
    assert lo == grid_lower_oracle(points, p, r, toroidal)
    assert lo <= hi


@given(point_sets(max_d=1), st.booleans(), st.integers(1, 6))
@settings(max_examples=100, deadline=None)
def test_one_dimensional_bracket_contains_the_exact_value(points, toroidal, r):
    exact = covering_radius_1d_exact(points, toroidal)
    lo, hi = covering_radius_bracket(points, INF, r, toroidal)
    assert lo <= exact <= hi


def test_bracket_tightens_with_resolution():
    pts = generate_points(hammersley_matrices(2, 4))
    widths = [hi - lo for lo, hi in (covering_radius_bracket(pts, INF, r) for r in (2, 4, 6))]
    assert widths[0] >= widths[1] >= widths[2]
    with pytest.raises(ValueError):
        covering_radius_bracket(pts, INF, 0)
    with pytest.raises(ValueError):
        covering_radius_bracket(pts, INF, 14)


def test_van_der_corput_mesh_ratio_is_two():
    rep = analyze(generate_points(vdc_matrices(2, 5)))
    assert rep.q == Fraction(1, 64)
    assert rep.h_lower == rep.h_upper == Fraction(1, 32)
    assert rep.rho_upper == 2 and mesh_ratio_ok(rep, 2) and not mesh_ratio_ok(rep, Fraction(3, 2))


def test_euclidean_reports_are_squared():
    pts = generate_points(lp_matrices(2, 4))
    rep2 = analyze(pts, 2)
    q_inf = analyze(pts, INF).q
    assert rep2.squared
    # one point per row and column: the closest pair differs in both axes
    assert q_inf * q_inf <= rep2.q <= 2 * q_inf * q_inf
    assert rep2.h_lower <= rep2.h_upper


def test_shifts_preserve_the_toroidal_separation_of_lattice_like_nets(rng):
    pts = generate_points(lp_matrices(3, 3))
    delta = ShiftVector.random(3, 3, 2, rng)
    moved = digital_shift(pts, delta)
    assert separation_radius(moved, INF, True)[0] >= Fraction(1, 2 * 27)


def test_closed_form_bounds():
    assert tmd_net_covering_bound(2, 4, 2, 0) == Fraction(3, 8)
    assert tmd_net_covering_bound(2, 4, 1, 0) == Fraction(1, 16)
    assert tmd_net_covering_bound(3, 4, 2, 0) == Fraction(16, 81)
    with pytest.raises(ValueError):
        tmd_net_covering_bound(2, 4, 2, 5)
    vb = volume_bounds(64, 2)
    assert vb.h_volume_lower == pytest.approx(1 / 16)
    assert vb.q_volume_upper == pytest.approx(1 / 14)
    eu = volume_bounds(100, 2, 2)
    assert eu.h_volume_lower == pytest.approx(np.sqrt(1 / (100 * np.pi)))
    with pytest.raises(ValueError):
        volume_bounds(1, 2)


def test_pair_distance_wraps():
    assert pair_distance((0, 0), (7, 1), 8, INF, True) == Fraction(1, 8)
    assert pair_distance((0, 0), (7, 1), 8, 1, False) == 1
    assert pair_distance((0, 0), (3, 4), 8, 2) == Fraction(25, 64)
    with pytest.raises(ValueError):
        pair_distance((0,), (0, 0), 8)
