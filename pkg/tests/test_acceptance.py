"""End-to-end acceptance checks, one test per criterion.

The conftest prints a PASS/FAIL line for each entry of ``CRITERIA``.
"""

from fractions import Fraction
from itertools import product

import numpy as np

from qunet.constructions import (
    NetSpec,
    fibonacci_lattice_matrices,
    hammersley_matrices,
    lp_matrices,
    pascal_power_matrix,
    polylattice_matrices,
    random_lower_triangular,
    sobol2_scrambled,
    vdc_matrices,
)
from qunet.geometry import (
    INF,
    covering_radius_bracket,
    default_resolution,
    pair_distance,
    separation_radius,
    tmd_net_covering_bound,
)
from qunet.gf import FieldMatrix, mat_mul
from qunet.poly import PolyFb, cf_expand, fibonacci_poly, poly_gcd
from qunet.pointgen import ShiftVector, box_counts_ok, digital_shift, generate_points
from qunet.repro import (
    lucas_shift_holds,
    pascal_row_sums_vanish,
    power_sum_vanishes,
    lp_separation_c,
    repro_faure,
    repro_fibonacci,
    repro_hammersley,
    repro_sobol_scrambled,
    repro_vdc_mesh,
    sobol_pair,
)
from qunet.separation import (
    criterion_check,
    criterion_system,
    CriterionInapplicable,
    is_c_separated_bruteforce,
    min_kappa_bruteforce,
    min_kappa_criterion,
    t_value,
)

CRITERIA = {
    "test_lp_nets_separated_under_random_shifts": (1, "LP nets separated at c = (ceil(m/2)+1, floor(m/2)+1) under random shifts"),
    "test_hammersley_near_pair_and_radius": (2, "Hammersley near pair and separation radius bound"),
    "test_scrambled_sobol_near_pairs": (3, "scrambled Sobol' near pairs"),
    "test_faure_near_points": (4, "Faure near points"),
    "test_fibonacci_lattice_near_pair": (5, "Fibonacci polynomial lattice near pair"),
    "test_criterion_matches_pairwise_oracle": (6, "criterion equals the pairwise oracle"),
    "test_kappa_and_separation_radius_consistent": (7, "kappa and separation radius consistency"),
    "test_covering_bracket_under_net_bound": (8, "covering bracket under the (t,m,d)-net bound"),
    "test_t_values": (9, "t-values"),
    "test_closed_forms": (10, "closed forms and auxiliary identities"),
    "test_van_der_corput_prefix_mesh_ratio": (11, "van der Corput prefix mesh ratio"),
    "test_property_suite": (12, "property suite"),
}


def _failed(result):
    return [(c.name, c.claimed, c.as_dict()["measured"]) for c in result.failures]


def test_lp_nets_separated_under_random_shifts():
    rng = np.random.default_rng(1)
    cases = [(2, m) for m in range(4, 13)] + [(3, m) for m in range(4, 9)]
    bad = []
    for b, m in cases:
        spec = lp_matrices(b, m)
        P0 = generate_points(spec)
        c = lp_separation_c(m)
        for _ in range(20):
            delta = ShiftVector.random(b, m, 2, rng)
            res = criterion_check(spec, delta, c, toroidal=True)
            if res.separated is not True:
                bad.append((b, m, delta.to_ints(), res.status, res.reason))
                continue
            if b**m <= 2**14:
                ok, viol = is_c_separated_bruteforce(digital_shift(P0, delta), c, toroidal=True)
                if not ok:
                    bad.append((b, m, delta.to_ints(), "pairwise test disagrees", viol))
    assert not bad, bad


def test_hammersley_near_pair_and_radius():
    bad = []
    for b in (2, 3, 5):
        for m in range(3, 9):
            res = repro_hammersley(b, m)
            stated = [c for c in res.checks if c.name in
                      (f"distance of points {b ** (m - 1) + 1} and {b ** (m - 1) - b}", "separation radius q_inf")]
            assert len(stated) == 2
            bad += [(b, m, c.name, c.claimed, c.as_dict()["measured"]) for c in stated if not c.passed]
    assert not bad, bad


def test_scrambled_sobol_near_pairs():
    for w in (2, 3):
        for variant in ("LP", "ILP"):
            res = repro_sobol_scrambled(w, variant, trials=50, seed=3)
            assert res.verdict == "pass", _failed(res)
            m = 2**w
            i, k = sobol_pair(m, variant)
            assert res.data["pair"] == [i, k]
    # the pair itself, spelled out for the unscrambled (L,P) case with w = 2
    P = generate_points(sobol2_scrambled(4))
    assert pair_distance(P.coords[1].tolist(), P.coords[9].tolist(), 16) <= Fraction(1, 8)


def test_faure_near_points():
    for b, w in ((2, 2), (3, 1), (3, 2), (5, 1)):
        res = repro_faure(b, w)
        assert res.verdict == "pass", (b, w, _failed(res))
        names = {c.name for c in res.checks}
        assert "first coordinate of x_n" in names and "second coordinate of x_n" in names
        assert sum(n.startswith("coordinate ") for n in names) == b - 2


def test_fibonacci_lattice_near_pair():
    r4 = repro_fibonacci(4)
    assert r4.verdict == "pass", _failed(r4)
    measured = {c.name: c.measured for c in r4.checks}
    assert measured["distance of points 4095 and 4097"] == Fraction(1, 2**14)
    assert measured["separation radius q_inf (full scan)"] <= Fraction(1, 2**15)
    r5 = repro_fibonacci(5)
    assert r5.verdict == "pass", _failed(r5)
    n, n2 = r5.params["n"], r5.params["n_prime"]
    assert {c.name: c.measured for c in r5.checks}[f"distance of points {n} and {n2}"] == Fraction(1, 2**28)


def test_criterion_matches_pairwise_oracle():
    rng = np.random.default_rng(6)
    compared = disagreements = 0
    while compared < 240:
        b = int(rng.choice([2, 3]))
        m = int(rng.choice([4, 5, 6]))
        mats = tuple(FieldMatrix(rng.integers(0, b, (m, m)), b) for _ in range(2))
        spec = NetSpec(b, m, mats)
        c = tuple(int(v) for v in rng.integers(0, m + 1, 2))
        delta = ShiftVector.random(b, m, 2, rng)
        try:
            criterion_system(spec, delta, c)
        except CriterionInapplicable:
            continue
        res = criterion_check(spec, delta, c, toroidal=True)
        ok, _ = is_c_separated_bruteforce(digital_shift(generate_points(spec), delta), c, toroidal=True)
        compared += 1
        disagreements += ok != res.separated
    assert disagreements == 0


def _analyzed_nets():
    rng = np.random.default_rng(7)
    nets = []
    for b, m in ((2, 6), (2, 8), (3, 5)):
        spec = lp_matrices(b, m)
        for _ in range(3):
            nets.append((spec, ShiftVector.random(b, m, 2, rng)))
    for b, m in ((2, 6), (3, 4), (5, 3)):
        nets.append((hammersley_matrices(b, m), None))
    for variant in ("LP", "ILP"):
        nets.append((sobol2_scrambled(8, random_lower_triangular(8, rng), variant), None))
    nets.append((fibonacci_lattice_matrices(15), None))
    nets.append((fibonacci_lattice_matrices(10), ShiftVector.random(2, 10, 2, rng)))
    nets.append((vdc_matrices(3, 5), None))
    return nets


def test_kappa_and_separation_radius_consistent():
    bad = []
    for spec, delta in _analyzed_nets():
        b = spec.b
        delta = delta or ShiftVector.zero(b, spec.m, spec.d)
        P = digital_shift(generate_points(spec), delta)
        for toroidal in (False, True):
            q, _ = separation_radius(P, INF, toroidal=toroidal)
            rep = min_kappa_bruteforce(P, toroidal=toroidal)
            if rep.kappa is None or rep.q_lower > q:
                bad.append((spec.label, toroidal, "lower", rep.kappa, q))
            if rep.violation_level is not None and q > rep.q_upper_from_violation:
                bad.append((spec.label, toroidal, "upper", rep.violation_level, q))
        crit = min_kappa_criterion(spec, delta, toroidal=True)
        if crit.kappa is not None:
            qT, _ = separation_radius(P, INF, toroidal=True)
            if crit.q_lower > qT:
                bad.append((spec.label, "criterion", crit.kappa, qT))
            # toroidal separation of the net bounds q_T of every digital shift of it
            other = ShiftVector.random(b, spec.m, spec.d, np.random.default_rng(spec.m))
            qS, _ = separation_radius(digital_shift(P, other), INF, toroidal=True)
            if crit.q_lower > qS:
                bad.append((spec.label, "reshifted", crit.kappa, qS))
    assert not bad, bad


def _nets_for_covering():
    for m in range(1, 15):
        yield lp_matrices(2, m)
        yield hammersley_matrices(2, m)
        yield sobol2_scrambled(m)
        yield fibonacci_lattice_matrices(m)
    for m in range(1, 8):
        yield lp_matrices(3, m)
        yield hammersley_matrices(3, m)


def test_covering_bracket_under_net_bound():
    bad = []
    for spec in _nets_for_covering():
        P = generate_points(spec)
        t = t_value(spec)
        r = default_resolution(P)
        lo, hi = covering_radius_bracket(P, INF, r)
        bound = tmd_net_covering_bound(spec.b, spec.m, 2, t)
        if not (lo <= bound and lo <= hi and hi - lo <= Fraction(1, spec.b**r)):
            bad.append((spec.label, spec.b, spec.m, t, lo, hi, bound))
    assert not bad, bad


def _random_coprime_pairs(rng, count):
    out = []
    while len(out) < count:
        deg = int(rng.integers(1, 11))
        p = PolyFb(list(rng.integers(0, 2, deg)) + [1], 2)
        q = PolyFb(list(rng.integers(0, 2, deg)), 2)
        if q.is_zero() or poly_gcd(p, q).deg != 0:
            continue
        out.append((p, q))
    return out


def test_t_values():
    for m in range(1, 17):
        assert t_value(lp_matrices(2, m)) == 0
        assert t_value(hammersley_matrices(2, m)) == 0
        assert t_value(fibonacci_lattice_matrices(m)) == 0
    rng = np.random.default_rng(9)
    for p, q in _random_coprime_pairs(rng, 50):
        spec = polylattice_matrices(p, [PolyFb((1,), 2), q])
        A = cf_expand(q, p).max_partial_degree
        assert t_value(spec) == A - 1, (p, q)


def test_closed_forms():
    for b in (2, 3, 5, 7):
        for m in (1, 2, 5, 12, 32):
            P = pascal_power_matrix(b, m, 1)
            acc = FieldMatrix.identity(m, b)
            for k in range(b):
                assert pascal_power_matrix(b, m, k) == acc, (b, m, k)
                acc = mat_mul(acc, P)
    for k in range(1, 8):
        odd = PolyFb((), 2)
        for ell in range(1, k + 1):
            odd = odd + PolyFb.x_power(2**k - 2**ell, 2)
        assert fibonacci_poly(2**k - 1) == odd
        assert fibonacci_poly(2**k) == PolyFb.x_power(2**k - 1, 2)
    primes = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)
    assert all(power_sum_vanishes(b, w) for b in primes for w in range(1, 5))
    assert all(lucas_shift_holds(b, w) for b, w in ((2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2), (7, 1)))
    for b, w in ((2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1)):
        assert pascal_row_sums_vanish(b, w) == (True, True), (b, w)


def test_van_der_corput_prefix_mesh_ratio():
    for b in (2, 3):
        res = repro_vdc_mesh(b, 4096)
        assert res.verdict == "pass", _failed(res)


def _monotone_in_c(P, toroidal):
    m = P.m
    top = m + 1
    sep = {c: is_c_separated_bruteforce(P, c, toroidal)[0] for c in product(range(top + 1), repeat=P.d)}
    for c, ok in sep.items():
        if not ok:
            continue
        for j in range(P.d):
            up = list(c)
            up[j] += 1
            if tuple(up) in sep and not sep[tuple(up)]:
                return False
    return True


def test_property_suite():
    rng = np.random.default_rng(12)
    # monotonicity of separation in c, every c up to m+1 on each axis
    for b, m in ((2, 2), (2, 4), (2, 6), (3, 2), (3, 4), (3, 5)):
        for _ in range(3):
            spec = NetSpec(b, m, tuple(FieldMatrix(rng.integers(0, b, (m, m)), b) for _ in range(2)))
            P = digital_shift(generate_points(spec), ShiftVector.random(b, m, 2, rng))
            assert _monotone_in_c(P, False) and _monotone_in_c(P, True), (b, m)
    # toroidal radii never exceed plain ones
    for spec in (lp_matrices(2, 8), hammersley_matrices(3, 4), sobol2_scrambled(6)):
        P = generate_points(spec)
        assert separation_radius(P, INF, True)[0] <= separation_radius(P, INF, False)[0]
        assert covering_radius_bracket(P, INF, toroidal=True)[0] <= covering_radius_bracket(P, INF)[1]
    # prefix monotonicity of q and of the covering bracket on a fixed grid
    P = generate_points(sobol2_scrambled(8))
    prev_q = prev_h = None
    for i in range(2, 257, 7):
        q = separation_radius(P.prefix(i))[0]
        h = covering_radius_bracket(P.prefix(i), INF, 6)
        if prev_q is not None:
            assert q <= prev_q and h[0] <= prev_h[0] and h[1] <= prev_h[1]
        prev_q, prev_h = q, h
    # digital shifts permute the grid and preserve the (0,m,d)-net property
    for b, m in ((2, 12), (3, 7), (5, 4)):
        spec = lp_matrices(b, m)
        P = generate_points(spec)
        assert box_counts_ok(P, 0)
        for _ in range(3):
            S = digital_shift(P, ShiftVector.random(b, m, 2, rng))
            for j in range(2):
                assert np.array_equal(np.sort(S.coords[:, j]), np.arange(b**m))
            assert box_counts_ok(S, 0)
