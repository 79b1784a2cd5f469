"""Named reproductions of the quantitative results on specific digital nets.

Each scenario returns a :class:`ReproResult` holding a list of exact checks
(claimed relation, measured value, pass/fail).  Scenarios default to the
smallest interesting instance; ``sweep=True`` in :func:`run_scenario` widens
the parameter ranges.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from .constructions import (
    NetSpec,
    faure_matrices,
    fibonacci_lattice_matrices,
    hammersley_matrices,
    lp_matrices,
    pascal_power_matrix,
    random_lower_triangular,
    sobol2_scrambled,
    vdc_matrices,
)
from .geometry import (
    INF,
    analyze,
    covering_radius_bracket,
    pair_distance,
    separation_radius,
)
from .gf import FieldMatrix, mat_mul
from .poly import PolyFb, cf_expand, fibonacci_poly
from .pointgen import (
    NetPoints,
    ShiftVector,
    digital_shift,
    generate_points,
    point_of_index,
)
from .separation import (
    IntervalSpec,
    criterion_check,
    is_c_separated_bruteforce,
    t_value,
)


def ratio_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass
class Check:
    name: str
    claimed: str
    measured: Any
    passed: bool

    def as_dict(self) -> dict:
        m = self.measured
        if isinstance(m, Fraction):
            out = {"measured": ratio_str(m), "measured_approx": float(m)}
        elif isinstance(m, (bool, int, str)) or m is None:
            out = {"measured": m}
        else:
            out = {"measured": str(m)}
        return {"name": self.name, "claimed": self.claimed, **out, "passed": self.passed}


@dataclass
class ReproResult:
    scenario: str
    params: dict
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    runtime: float = 0.0
    seed: int | None = None

    @property
    def verdict(self) -> str:
        return "pass" if self.checks and all(c.passed for c in self.checks) else "fail"

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def add(self, name: str, claimed: str, measured, passed: bool) -> None:
        self.checks.append(Check(name, claimed, measured, bool(passed)))

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "params": self.params,
            "seed": self.seed,
            "verdict": self.verdict,
            "runtime_seconds": round(self.runtime, 4),
            "checks": [c.as_dict() for c in self.checks],
            "data": self.data,
        }


class _Timer:
    def __init__(self, result: ReproResult):
        self.result = result

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.result

    def __exit__(self, *exc):
        self.result.runtime = time.perf_counter() - self.t0
        return False


def prefix_mesh_profile(points: NetPoints, indices: list[int], max_cells: int = 2**20) -> list[dict]:
    """Mesh-ratio bracket of the prefixes ``Q_i`` for the listed ``i``, as plain data.

    Each entry also carries the growth ratios ``i_{k+1}/i_k`` and ``i_k/i_{k+1}``
    to the next listed prefix, so a reader can judge which growth condition a
    subsequence satisfies.  The covering grid drops one level of resolution
    when it would exceed ``max_cells``; prefixes that still do not fit are left
    out, and so is everything after them.
    """
    rows = []
    for pos, i in enumerate(indices):
        digits = math.ceil(math.log(i, points.b) - 1e-9)
        fits = [r for r in (-(-digits // points.d) + 1, -(-digits // points.d)) if
                r >= 1 and points.b ** (r * points.d) <= max_cells]
        if not fits:
            break
        res_ = fits[0]
        P = points.prefix(i)
        q, _ = separation_radius(P)
        h_lo, h_hi = covering_radius_bracket(P, INF, res_)
        row = {"i": i, "q": ratio_str(q), "rho_lower": ratio_str(h_lo / q), "rho_upper": ratio_str(h_hi / q),
               "rho_upper_approx": float(h_hi / q)}
        if pos + 1 < len(indices):
            nxt = indices[pos + 1]
            row["next_over_this"] = ratio_str(Fraction(nxt, i))
            row["this_over_next"] = ratio_str(Fraction(i, nxt))
        rows.append(row)
    return rows


# -- van der Corput ------------------------------------------------------------------

def repro_vdc_mesh(b: int = 2, i_max: int = 4096) -> ReproResult:
    """Mesh-ratio upper bracket of every prefix ``Q_i``, ``2 <= i <= i_max``, against ``2b``."""
    if not 2 <= i_max <= 2**14:
        raise ValueError("i_max must lie in [2, 2^14]")
    res = ReproResult("vdc", {"b": b, "i_max": i_max})
    with _Timer(res):
        m = 1
        while b**m < i_max:
            m += 1
        pts = generate_points(vdc_matrices(b, m), i_max)
        bound = Fraction(2 * b)
        worst, worst_i, tight = Fraction(0), None, []
        for i in range(2, i_max + 1):
            P = pts.prefix(i)
            q, _ = separation_radius(P)
            _, h_up = covering_radius_bracket(P, INF, m + 2)
            rho = h_up / q
            if rho > worst:
                worst, worst_i = rho, i
            if rho == bound:
                tight.append(i)
        res.add("max prefix mesh ratio (upper bracket)", f"<= {2 * b}", worst, worst <= bound)
        res.data.update(worst_prefix=worst_i, prefixes_at_bound=len(tight),
                        first_prefixes_at_bound=tight[:8])
        full = [b**k for k in range(1, m + 1) if b**k <= i_max]
        for n in full[-1:]:
            P = pts.prefix(n)
            q, _ = separation_radius(P)
            h = covering_radius_bracket(P, INF, m + 2)[1]
            res.add(f"mesh ratio of the first {n} points", "= 2", h / q, h / q == 2)
    return res


# -- Hammersley ----------------------------------------------------------------------

def hammersley_pair(b: int, m: int) -> tuple[int, int]:
    if m < 2:
        raise ValueError("the near pair needs m >= 2")
    return b ** (m - 1) + 1, b ** (m - 1) - b


def repro_hammersley(b: int = 2, m: int = 4) -> ReproResult:
    """Near pair and separation radius of the Hammersley net.

    The stated relations are checked as given.  The pair's digit expansions
    put the two points ``(b+1)/b^m`` apart on both axes, so the corrected
    relations are reported alongside.
    """
    res = ReproResult("hammersley", {"b": b, "m": m})
    with _Timer(res):
        n, k = hammersley_pair(b, m)
        spec = hammersley_matrices(b, m)
        xn, xk = point_of_index(spec, n), point_of_index(spec, k)
        dist = pair_distance(xn, xk, b**m)
        stated = Fraction(b - 1, b**m)
        actual = Fraction(b + 1, b**m)
        res.add(f"distance of points {n} and {k}", f"= {ratio_str(stated)}", dist, dist == stated)
        res.add(f"distance of points {n} and {k} from their digit expansions",
                f"= {ratio_str(actual)}", dist, dist == actual)
        c = (m // 2, m - m // 2)
        J = IntervalSpec(c, (b ** (c[0] - 1), b ** (c[1] - 1)), (1, 1), b, toroidal=False)
        both = J.admissible() and J.contains(xn, m) and J.contains(xk, m)
        res.add(f"shifted interval at c={c} holds both points", "true", both, both)
        if b**m <= 2**20:
            q, wit = separation_radius(generate_points(spec))
            bound = stated / 2
            res.add("separation radius q_inf", f"<= {ratio_str(bound)}", q, q <= bound)
            res.add("separation radius q_inf (corrected bound)", f"<= {ratio_str(actual / 2)}", q, q <= actual / 2)
            res.data["q_witness"] = list(wit)
    return res


# -- scrambled Sobol' ----------------------------------------------------------------

def sobol_pair(m: int, variant: str) -> tuple[int, int]:
    return (1, 2 ** (m - 1) + 1) if variant.upper() == "LP" else (1, 2**m - 2)


def repro_sobol_scrambled(w: int = 2, variant: str = "LP", trials: int = 50, seed: int = 0) -> ReproResult:
    m = 2**w
    if m > 16:
        raise ValueError("m = 2^w must be <= 16")
    res = ReproResult("sobol", {"w": w, "m": m, "variant": variant.upper(), "trials": trials}, seed=seed)
    with _Timer(res):
        rng = np.random.default_rng(seed)
        i, k = sobol_pair(m, variant)
        near = Fraction(2, 2**m)
        bound = Fraction(1, 2**m)
        scrambles = [FieldMatrix.identity(m, 2)] + [random_lower_triangular(m, rng) for _ in range(trials)]
        worst_d, worst_q = Fraction(0), Fraction(0)
        witnesses = set()
        for L in scrambles:
            spec = sobol2_scrambled(m, L, variant)
            P = generate_points(spec)
            dist = pair_distance(P.coords[i].tolist(), P.coords[k].tolist(), P.scale)
            q, wit = separation_radius(P)
            worst_d, worst_q = max(worst_d, dist), max(worst_q, q)
            witnesses.add(tuple(wit))
        res.add(f"max distance of points {i} and {k} over scrambles", f"<= {ratio_str(near)}",
                worst_d, worst_d <= near)
        res.add("max separation radius over scrambles", f"<= {ratio_str(bound)}", worst_q, worst_q <= bound)
        res.data.update(pair=[i, k], scrambles=len(scrambles),
                        distinct_minimizing_pairs=len(witnesses))
        base = generate_points(sobol2_scrambled(m, variant=variant))
        res.data["prefix_mesh_profile"] = prefix_mesh_profile(base, [2**k for k in range(1, min(m, 10) + 1)])
    return res


def search_scramble_pairs(m: int, trials: int = 100, seed: int = 0) -> dict:
    """Random search over scramble pairs ``(L1, L2 P)`` for a large base-2 separation radius.

    Each trial draws two lower-triangular ``L`` and measures the exact ``q_inf``
    of the resulting ``2^m`` points.  Finding nothing good says nothing about
    whether a good pair exists.
    """
    if not 1 <= m <= 16:
        raise ValueError("need 1 <= m <= 16")
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    P = pascal_power_matrix(2, m, 1)
    scaled: dict[str, int] = {}
    best = None
    for trial in range(trials):
        L1, L2 = random_lower_triangular(m, rng), random_lower_triangular(m, rng)
        spec = NetSpec(2, m, (L1, mat_mul(L2, P)), label="scrambled-pair")
        q, _ = separation_radius(generate_points(spec))
        key = ratio_str(q * 2**m)
        scaled[key] = scaled.get(key, 0) + 1
        if best is None or q > best[0]:
            best = (q, trial, L1, L2)
    q, trial, L1, L2 = best
    return {"m": m, "trials": trials, "seed": seed, "best_q": q, "best_trial": trial,
            "best_L1": L1.tolist(), "best_L2": L2.tolist(),
            "scaled_q_histogram": dict(sorted(scaled.items(), key=lambda kv: Fraction(kv[0])))}


# -- Faure ---------------------------------------------------------------------------

def power_sum_vanishes(b: int, w: int) -> bool:
    """``sum_{c=0}^{b-2} k^(c b^w) = 0 mod b`` for every ``2 <= k <= b-1``."""
    return all(sum(pow(k, c * b**w, b) for c in range(b - 1)) % b == 0 for k in range(2, b))


def lucas_shift_holds(b: int, w: int) -> bool:
    """``C(c b^w + t, u) = C(t, u) mod b`` for ``0 <= c < b`` and ``0 <= t, u < b^w``."""
    B = b**w
    return all(math.comb(c * B + t, u) % b == math.comb(t, u) % b
               for c in range(b) for t in range(B) for u in range(B))


def pascal_row_sums_vanish(b: int, w: int) -> tuple[bool, bool]:
    """Row sums of ``P`` (rows ``1..b^w-1``) and of ``P^k``, ``2 <= k <= b-1``
    (rows ``1..b^w``), over the first ``m = (b-1) b^w`` columns vanish mod b."""
    m = (b - 1) * b**w
    P = pascal_power_matrix(b, m, 1).data
    first = bool(np.all(P[: b**w - 1].sum(axis=1) % b == 0))
    rest = all(bool(np.all(pascal_power_matrix(b, m, k).data[: b**w].sum(axis=1) % b == 0))
               for k in range(2, b))
    return first, rest


def repro_faure(b: int = 3, w: int = 1) -> ReproResult:
    m = (b - 1) * b**w
    if m > 128:
        raise ValueError("m = (b-1) b^w must be <= 128")
    res = ReproResult("faure", {"b": b, "w": w, "m": m})
    with _Timer(res):
        spec = faure_matrices(b, m)
        n = b**m - b
        S = b**m
        x1 = [Fraction(v, S) for v in point_of_index(spec, 1)]
        xn = [Fraction(v, S) for v in point_of_index(spec, n)]
        inv_b = Fraction(1, b)
        res.add("x_1", f"= (1/{b}, ...)", all(v == inv_b for v in x1), all(v == inv_b for v in x1))
        first = inv_b - Fraction(1, S)
        res.add("first coordinate of x_n", f"= {ratio_str(first)}", xn[0], xn[0] == first)
        hi2 = inv_b + Fraction(1, b ** (b**w - 1))
        ok = inv_b <= xn[1] < hi2
        res.add("second coordinate of x_n", f"in [1/{b}, {ratio_str(hi2)})", xn[1], ok)
        hik = inv_b + Fraction(1, b ** (b**w))
        for j in range(2, b):
            ok = inv_b <= xn[j] < hik
            res.add(f"coordinate {j + 1} of x_n", f"in [1/{b}, {ratio_str(hik)})", xn[j], ok)
        dist = max(abs(u - v) for u, v in zip(x1, xn))
        bound = Fraction(1, b ** (b**w - 1))
        res.add(f"distance of points 1 and {n}", f"<= {ratio_str(bound)}", dist, dist <= bound)
        # (b^m)^(1/(b-1)) = b^(b^w), so the radius bound is b/2 * b^-(b^w)
        qb = Fraction(b, 2) / b ** (b**w)
        res.add("implied bound on q_inf", f"<= {ratio_str(qb)}", dist / 2, dist / 2 <= qb)
        if b == 2:
            same = spec.matrices == sobol2_scrambled(m).matrices
            res.add("coincides with the unscrambled Sobol' net", "true", same, same)
        if b**w <= 64:
            r1, rk = pascal_row_sums_vanish(b, w)
            res.add("row sums of P vanish", "true", r1, r1)
            res.add("row sums of P^k vanish", "true", rk, rk)
        res.data["n"] = str(n)
        top = max(k for k in range(1, m + 1) if b**k <= 4096)
        pts = generate_points(faure_matrices(b, top))
        res.data["prefix_mesh_profile"] = prefix_mesh_profile(pts, [b**k for k in range(1, top + 1)])
    return res


# -- Fibonacci polynomial lattice ----------------------------------------------------

def fibonacci_pair(k: int) -> tuple[int, int, int, int]:
    """``(m, m', n, n')`` for ``k >= 4``."""
    if k < 4:
        raise ValueError("k must be >= 4")
    m = 2**k - 1
    mp = 2 ** (k - 3) - 1
    base = 2 ** (m - mp - 2)
    half = Fraction(2) ** (mp - 1)
    if half.denominator != 1:
        raise ValueError("n, n' are not integers for this k")
    return m, mp, base - int(half), base + int(half)


def repro_fibonacci(k: int = 4) -> ReproResult:
    m, mp, n, n2 = fibonacci_pair(k)
    res = ReproResult("fibonacci", {"k": k, "m": m, "m_prime": mp, "n": n, "n_prime": n2})
    with _Timer(res):
        spec = fibonacci_lattice_matrices(m)
        F1, F2 = (F.data for F in spec.matrices)
        anti = bool(np.array_equal(F1, np.eye(m, dtype=np.int64)[::-1]))
        res.add("first generating matrix is the reversal", "true", anti, anti)
        idx = np.arange(1, m + 1)
        s = idx[:, None] + idx[None, :]
        pattern = ((s & (s - 1)) == 0).astype(np.int64)
        ok = bool(np.array_equal(F2, pattern))
        res.add("second matrix is 1 exactly where i+j is a power of two", "true", ok, ok)
        dist = pair_distance(point_of_index(spec, n), point_of_index(spec, n2), 2**m)
        target = Fraction(1, 2 ** (m - mp))
        res.add(f"distance of points {n} and {n2}", f"= {ratio_str(target)}", dist, dist == target)
        qb = Fraction(1, 2 ** (m - mp + 1))
        # 2^(-15/8) N^(-7/8) with N = 2^m equals 2^-(7m+15)/8, an integer power since 8 | m+1
        rate = Fraction(1, 2 ** ((7 * m + 15) // 8))
        res.add("implied q bound equals 2^(-15/8) N^(-7/8)", f"= {ratio_str(rate)}", qb, qb == rate)
        if m <= 20:
            q, wit = separation_radius(generate_points(spec))
            res.add("separation radius q_inf (full scan)", f"<= {ratio_str(qb)}", q, q <= qb)
            res.data["q_witness"] = list(wit)
            t = t_value(spec)
            A = cf_expand(fibonacci_poly(m), fibonacci_poly(m + 1)).max_partial_degree
            res.add("t-value", f"= {A - 1} (continued fraction)", t, t == 0 == A - 1)
    return res


# -- Larcher-Pillichshammer net ------------------------------------------------------

def lp_separation_c(m: int) -> tuple[int, int]:
    return (-(-m // 2) + 1, m // 2 + 1)


def mesh_bound_holds(rho: Fraction, b: int, d: int, t: int, kappa: int, m: int) -> bool:
    """``rho <= 2 b^((t-1)/d + kappa - m/d + 2) / (b-1)``, compared exactly after raising to the d-th power.

    The constant is the covering bound ``b^((d+t-1)/d) b^(-m/d)`` divided by
    the separation bound ``(b-1) b^(-kappa) / (2b)``.
    """
    lhs = (rho * (b - 1) / 2) ** d
    e = t - 1 + d * kappa - m + 2 * d
    return lhs <= Fraction(b) ** e


def mesh_bound_value(b: int, d: int, t: int, kappa: int, m: int) -> float:
    return 2 * b ** ((t - 1) / d + kappa - m / d + 2) / (b - 1)


def repro_lp(b: int = 2, m: int = 6, shifts: int = 20, seed: int = 0, mesh: bool = True) -> ReproResult:
    if b**m > 2**20:
        raise ValueError("b^m must be <= 2^20")
    res = ReproResult("lp", {"b": b, "m": m, "shifts": shifts}, seed=seed)
    with _Timer(res):
        spec = lp_matrices(b, m)
        c = lp_separation_c(m)
        kappa = max(c)
        rng = np.random.default_rng(seed)
        P0 = generate_points(spec)
        crit_ok = brute_ok = q_ok = mesh_ok = True
        brute_runs = 0
        q_min, rho_max = None, Fraction(0)
        q_floor = Fraction(b - 1, 2 * b) / Fraction(b) ** kappa
        for _ in range(shifts):
            delta = ShiftVector.random(b, m, 2, rng)
            r = criterion_check(spec, delta, c, toroidal=True)
            crit_ok &= r.separated is True
            P = digital_shift(P0, delta)
            if b**m <= 2**14:
                brute_runs += 1
                brute_ok &= is_c_separated_bruteforce(P, c, toroidal=True)[0] == bool(r.separated)
            qT, _ = separation_radius(P, INF, toroidal=True)
            q_min = qT if q_min is None else min(q_min, qT)
            q_ok &= qT >= q_floor
            if mesh:
                rep = analyze(P, INF, toroidal=False, resolution=-(-m // 2) + 1)
                rho_max = max(rho_max, rep.rho_upper)
                mesh_ok &= mesh_bound_holds(rep.rho_upper, b, 2, 0, kappa, m)
        res.add(f"criterion separates at c={c} for every shift", "true", crit_ok, crit_ok)
        if brute_runs:
            res.add("pairwise test agrees", "true", brute_ok, brute_ok)
        res.add("min toroidal q_inf over shifts", f">= {ratio_str(q_floor)}", q_min, q_ok)
        if mesh:
            bound = mesh_bound_value(b, 2, 0, kappa, m)
            res.add("max mesh-ratio upper bracket over shifts", f"<= {bound:.6g}", rho_max, mesh_ok)
        t = t_value(spec) if m <= 20 else None
        res.add("t-value", "= 0", t, t == 0)
    return res


def repro_lp_generalization(b: int = 2, m: int = 8, trials: int = 20, seed: int = 0) -> ReproResult:
    """Random rows below the leading ``c_j + 1`` rows of one LP matrix, kept
    when the result is still a (0,m,2)-net, must keep the criterion's verdict."""
    res = ReproResult("lp-generalization", {"b": b, "m": m, "trials": trials}, seed=seed)
    with _Timer(res):
        rng = np.random.default_rng(seed)
        base = lp_matrices(b, m)
        c = lp_separation_c(m)
        kept = 0
        ok = True
        for _ in range(trials):
            j = int(rng.integers(0, 2))
            start = c[j] + 1
            if start >= m:
                continue
            D = base.matrices[j].data.copy()
            row = int(rng.integers(start, m))
            D[row] = rng.integers(0, b, size=m)
            mats = list(base.matrices)
            mats[j] = FieldMatrix(D, b)
            spec = NetSpec(b, m, tuple(mats), label="lp-variant")
            if t_value(spec) != 0:
                continue
            kept += 1
            delta = ShiftVector.random(b, m, 2, rng)
            ok &= criterion_check(spec, delta, c).separated is True
        res.add("variants that are still (0,m,2)-nets", ">= 1", kept, kept >= 1)
        res.add(f"criterion separates every kept variant at c={c}", "true", ok, ok)
    return res


# -- registry ------------------------------------------------------------------------

SCENARIOS = ("vdc", "hammersley", "sobol", "faure", "fibonacci", "lp")


def _plan(name: str, sweep: bool, seed: int) -> list[Callable[[], ReproResult]]:
    if name == "vdc":
        cases = [(2, 4096), (3, 4096)] if sweep else [(2, 4096), (3, 2187)]
        return [lambda b=b, i=i: repro_vdc_mesh(b, i) for b, i in cases]
    if name == "hammersley":
        cases = [(b, m) for b in (2, 3, 5) for m in range(3, 9)] if sweep else [(2, 4), (3, 3)]
        return [lambda b=b, m=m: repro_hammersley(b, m) for b, m in cases]
    if name == "sobol":
        ws = (2, 3) if sweep else (2,)
        return [lambda w=w, v=v: repro_sobol_scrambled(w, v, 50, seed) for w in ws for v in ("LP", "ILP")]
    if name == "faure":
        cases = [(2, 2), (3, 1), (3, 2), (5, 1)] if sweep else [(2, 2), (3, 1)]
        return [lambda b=b, w=w: repro_faure(b, w) for b, w in cases]
    if name == "fibonacci":
        ks = (4, 5) if sweep else (4,)
        return [lambda k=k: repro_fibonacci(k) for k in ks]
    if name == "lp":
        if sweep:
            cases = [(2, m) for m in range(3, 13)] + [(3, m) for m in range(4, 9)]
        else:
            cases = [(2, 3), (2, 6)]
        plan = [lambda b=b, m=m: repro_lp(b, m, 20, seed) for b, m in cases]
        plan.append(lambda: repro_lp_generalization(2, 8, 20, seed))
        return plan
    raise ValueError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)} or 'all'")


def run_scenario(name: str, sweep: bool = False, seed: int = 0) -> list[ReproResult]:
    names = SCENARIOS if name == "all" else (name,)
    out = []
    for nm in names:
        out.extend(f() for f in _plan(nm, sweep, seed))
    return out
