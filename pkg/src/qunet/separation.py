"""kappa-separation of digital nets.

Two independent routes decide whether a point set has at most one point in
every shifted (toroidal) b-adic elementary interval at resolution ``c``:

* :func:`is_c_separated_bruteforce` works on the points.  On one axis the
  admissible intervals at level ``c`` are ``[s/D, (s+b)/D)`` with ``D = b^(c+1)``
  and ``s`` ranging over ``[0, D-b]`` (plain) or all residues mod ``D``
  (toroidal, wrapped).  Two coordinates share such an interval iff the largest
  start ``s <= x*D`` still reaches past ``y``, which is a constant-time integer
  test per pair.  A pair violates iff it shares an interval on every axis.

* :func:`criterion_check` works on the generating matrices only.  The toroidal
  interval splits into ``b^d`` disjoint elementary intervals at level ``c+1``;
  a point lies in one of them iff a linear system ``F_{c+1} n = B`` is
  solvable, and with ``rank F_{c+1} = m`` each solvable system has exactly one
  solution.  Solvability is tested against a left-nullspace basis of
  ``F_{c+1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb
from typing import Sequence

import numpy as np

from .constructions import NetSpec
from .gf import FieldMatrix, _rank_gf2_bits, nullspace_matrix, pack_rows_gf2, rank, solve_affine
from .pointgen import NetPoints, ShiftVector, compositions, shift_point, point_of_index


# -- intervals -----------------------------------------------------------------------

def digits_msf(v: int, length: int, b: int) -> list[int]:
    """Base-b digits of ``v``, most significant first, padded to ``length``."""
    out = [0] * length
    for k in range(length - 1, -1, -1):
        v, out[k] = divmod(v, b)
    return out


@dataclass(frozen=True)
class IntervalSpec:
    """Shifted b-adic elementary interval ``J_{c,a,e}`` (wrapped mod 1 if toroidal).

    On axis j it is ``[s_j / b^(c_j+1), s_j / b^(c_j+1) + b^-c_j)`` with anchor
    ``s_j = b*a_j - e_j``.
    """

    c: tuple[int, ...]
    a: tuple[int, ...]
    e: tuple[int, ...]
    b: int
    toroidal: bool = True

    @property
    def anchors(self) -> tuple[int, ...]:
        return tuple(self.b * a - e for a, e in zip(self.a, self.e))

    def admissible(self) -> bool:
        b = self.b
        for c, a, e, s in zip(self.c, self.a, self.e, self.anchors):
            if c < 0 or not 0 <= e < b:
                return False
            if self.toroidal:
                if not 0 <= a < b**c:
                    return False
            elif not (0 <= a <= b**c and 0 <= s <= b ** (c + 1) - b):
                return False
        return True

    def bounds(self) -> list[tuple[Fraction, Fraction]]:
        """Per-axis ``[lo, hi)``; toroidal intervals may have ``lo < 0`` (wrapped)."""
        out = []
        for c, s in zip(self.c, self.anchors):
            D = self.b ** (c + 1)
            out.append((Fraction(s, D), Fraction(s + self.b, D)))
        return out

    def contains(self, x: Sequence[int], m: int) -> bool:
        """Does the scaled point ``x`` (coordinates ``X/b^m``) lie inside?"""
        bm = self.b**m
        for X, c, s in zip(x, self.c, self.anchors):
            D = self.b ** (c + 1)
            off = X * D - s * bm
            if self.toroidal:
                off %= D * bm
            if not 0 <= off < self.b * bm:
                return False
        return True


def interval_from_anchor(c: int, s: int, b: int, toroidal: bool) -> tuple[int, int]:
    """Recover ``(a, e)`` with ``s = b*a - e`` (``a`` reduced mod ``b^c`` if toroidal)."""
    a = -(-s // b)
    e = b * a - s
    if toroidal:
        a %= b**c
    return a, e


@dataclass
class Violation:
    interval: IntervalSpec
    pair: tuple[int, int]

    def as_dict(self) -> dict:
        return {"c": list(self.interval.c), "a": list(self.interval.a), "e": list(self.interval.e),
                "pair": list(self.pair), "toroidal": self.interval.toroidal}


# -- brute-force route ---------------------------------------------------------------

def _axis_share(X: np.ndarray, Y: np.ndarray, b: int, m: int, c: int, toroidal: bool) -> np.ndarray:
    """Elementwise: do coordinates ``X`` and ``Y`` share an admissible level-c interval?"""
    c = min(c, m)  # at c >= m intervals hold a single grid value either way
    D = b ** (c + 1)
    bm = b**m
    if toroidal:
        xs, ys = X * D, Y * D
        fx, fy = xs // bm, ys // bm
        mod = D * bm
        return ((ys - fx * bm) % mod < b * bm) | ((xs - fy * bm) % mod < b * bm)
    lo, hi = np.minimum(X, Y), np.maximum(X, Y)
    s = np.minimum((lo * D) // bm, D - b)
    return hi * D < (s + b) * bm


def _shared_anchor(x: int, y: int, b: int, m: int, c: int, toroidal: bool) -> int:
    D = b ** (c + 1)
    bm = b**m
    xs, ys = x * D, y * D
    if toroidal:
        fx = xs // bm
        if (ys - fx * bm) % (D * bm) < b * bm:
            return fx % D
        return (ys // bm) % D
    lo = min(xs, ys)
    return min(lo // bm, D - b)


def _candidate_offsets(col: np.ndarray, window: int, scale: int, toroidal: bool):
    """Yield index pairs (as two arrays) whose axis-0 gap is below ``window``."""
    order = np.argsort(col, kind="stable")
    v = col[order]
    N = len(v)
    for k in range(1, N):
        if toroidal:
            j = (np.arange(N) + k) % N
            gap = (v[j] - v) % scale
            sel = np.flatnonzero(gap < window)
            if sel.size == 0:
                return
            yield order[sel], order[j[sel]]
        else:
            gap = v[k:] - v[:-k]
            sel = np.flatnonzero(gap < window)
            if sel.size == 0:
                return
            yield order[sel], order[sel + k]


def find_violations(points: NetPoints, c: Sequence[int], toroidal: bool = False,
                    first_only: bool = True) -> list[tuple[int, int]]:
    """Index pairs sharing an admissible shifted interval at resolution ``c``."""
    b, m, d = points.b, points.m, points.d
    c = tuple(int(v) for v in c)
    if len(c) != d:
        raise ValueError(f"c has {len(c)} entries for a {d}-dimensional point set")
    if any(v < 0 for v in c):
        raise ValueError("resolutions must be non-negative")
    X = points.coords
    c0 = min(c[0], m)
    window = b ** (m - c0)  # interval length b^-c in units of b^-m
    found: list[tuple[int, int]] = []
    for i, j in _candidate_offsets(X[:, 0], window, points.scale, toroidal):
        ok = np.ones(len(i), dtype=bool)
        for ax in range(d):
            ok &= _axis_share(X[i, ax], X[j, ax], b, m, c[ax], toroidal)
        if np.any(ok):
            lo = np.minimum(i[ok], j[ok])
            hi = np.maximum(i[ok], j[ok])
            pairs = sorted(set(zip(lo.tolist(), hi.tolist())))
            if first_only:
                return [pairs[0]]
            found.extend(pairs)
    return sorted(set(found))


def violation_for_pair(points: NetPoints, pair: tuple[int, int], c: Sequence[int], toroidal: bool) -> Violation:
    b, m = points.b, points.m
    x, y = (points.coords[k].tolist() for k in pair)
    a, e = [], []
    for X, Y, cj in zip(x, y, c):
        s = _shared_anchor(X, Y, b, m, cj, toroidal)
        aj, ej = interval_from_anchor(cj, s, b, toroidal)
        a.append(aj)
        e.append(ej)
    J = IntervalSpec(tuple(c), tuple(a), tuple(e), b, toroidal)
    return Violation(J, tuple(sorted(pair)))


def is_c_separated_bruteforce(points: NetPoints, c: Sequence[int], toroidal: bool = False) -> tuple[bool, Violation | None]:
    pairs = find_violations(points, c, toroidal, first_only=True)
    if not pairs:
        return True, None
    return False, violation_for_pair(points, pairs[0], c, toroidal)


def enumerate_interval_counts(points: NetPoints, c: Sequence[int], toroidal: bool = False) -> int:
    """Largest point count over all admissible intervals at ``c``, by listing them.

    Exponential in ``sum(c)``; meant as a test oracle for tiny inputs.
    """
    b, m, d = points.b, points.m, points.d
    per_axis = []
    for cj in c:
        opts = []
        a_hi = b**cj if toroidal else b**cj + 1
        for a in range(a_hi):
            for e in range(b):
                J = IntervalSpec((cj,), (a,), (e,), b, toroidal)
                if J.admissible():
                    opts.append((a, e))
        per_axis.append(opts)
    best = 0
    pts = points.coords.tolist()
    for choice in product(*per_axis):
        J = IntervalSpec(tuple(c), tuple(a for a, _ in choice), tuple(e for _, e in choice), b, toroidal)
        best = max(best, sum(J.contains(x, m) for x in pts))
    return best


@dataclass
class SeparationReport:
    kappa: int | None
    c_witness: tuple[int, ...] | None
    method: str
    b: int
    toroidal: bool
    violation: Violation | None = None  # evidence at level kappa - 1
    violation_level: int | None = None
    inapplicable: list[tuple[int, ...]] = field(default_factory=list)
    budget: int | None = None

    @property
    def q_lower(self) -> Fraction | None:
        if self.kappa is None:
            return None
        return Fraction(self.b - 1, 2 * self.b) / Fraction(self.b) ** self.kappa

    @property
    def q_upper_from_violation(self) -> Fraction | None:
        if self.violation_level is None:
            return None
        return Fraction(1, 2) / Fraction(self.b) ** self.violation_level

    def as_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "c_witness": list(self.c_witness) if self.c_witness is not None else None,
            "method": self.method,
            "toroidal": self.toroidal,
            "violation": self.violation.as_dict() if self.violation else None,
            "violation_level": self.violation_level,
            "q_lower": _frac(self.q_lower),
            "q_upper_from_violation": _frac(self.q_upper_from_violation),
            "inapplicable": [list(c) for c in self.inapplicable],
            "budget": self.budget,
        }


def _frac(x: Fraction | None) -> str | None:
    return None if x is None else f"{x.numerator}/{x.denominator}"


def min_kappa_bruteforce(points: NetPoints, toroidal: bool = False) -> SeparationReport:
    """Smallest kappa with ``c = (kappa, ..., kappa)`` separated (None if duplicates)."""
    b, m, d = points.b, points.m, points.d
    if points.n < 2:
        raise ValueError("need at least two points")
    top = m + 1
    ok, viol = is_c_separated_bruteforce(points, (top,) * d, toroidal)
    if not ok:
        return SeparationReport(None, None, "bruteforce", b, toroidal, viol, top, budget=top)
    last_viol, last_level = None, None
    for kappa in range(top + 1):
        ok, viol = is_c_separated_bruteforce(points, (kappa,) * d, toroidal)
        if ok:
            return SeparationReport(kappa, (kappa,) * d, "bruteforce", b, toroidal, last_viol, last_level, budget=top)
        last_viol, last_level = viol, kappa
    raise AssertionError("unreachable: level m+1 separates distinct points")


# -- algebraic route -----------------------------------------------------------------

class CriterionInapplicable(ValueError):
    pass


@dataclass
class CriterionSystem:
    """Stacked first ``c_j + 1`` rows of each ``F_j`` and its left nullspace."""

    spec: NetSpec
    c: tuple[int, ...]
    F_stack: FieldMatrix
    nullbasis: np.ndarray  # (k, R)
    delta_digits: list[np.ndarray]  # per axis, length c_j + 1
    offsets: list[int]  # first stacked row of each axis

    @property
    def b(self) -> int:
        return self.spec.b


def criterion_system(spec: NetSpec, delta: ShiftVector, c: Sequence[int]) -> CriterionSystem:
    b, m, d = spec.b, spec.m, spec.d
    c = tuple(int(v) for v in c)
    if len(c) != d:
        raise ValueError(f"c has {len(c)} entries for {d} generating matrices")
    if any(v < 0 for v in c):
        raise ValueError("resolutions must be non-negative")
    if (delta.b, delta.m, delta.d) != (b, m, d):
        raise ValueError("shift does not match the net")
    if sum(c) + d <= m:
        raise CriterionInapplicable(f"c={c}: need c_1+...+c_d + d > m = {m}")
    blocks, digs, offsets = [], [], []
    row = 0
    for F, cj, dj in zip(spec.matrices, c, delta.digits):
        blk = np.zeros((cj + 1, m), dtype=np.int64)
        take = min(cj + 1, m)
        blk[:take] = F.data[:take]
        blocks.append(blk)
        dv = np.zeros(cj + 1, dtype=np.int64)
        dv[:take] = dj[:take]
        digs.append(dv)
        offsets.append(row)
        row += cj + 1
    F_stack = FieldMatrix(np.vstack(blocks), b)
    rk = rank(F_stack)
    if rk != m:
        raise CriterionInapplicable(f"c={c}: rank of the stacked matrix is {rk} < m = {m}")
    return CriterionSystem(spec, c, F_stack, nullspace_matrix(F_stack), digs, offsets)


def interval_digit_vector(a: int, e: int, g: int, c: int, b: int) -> list[int]:
    """Base-b digits of ``(b*a - e + g) mod b^(c+1)`` via the carry rule.

    The leading ``c`` digits are those of ``a`` when ``g >= e`` and of
    ``(a - 1) mod b^c`` otherwise; the last digit is ``(g - e) mod b``.
    """
    top = a if g >= e else (a - 1) % b**c
    return digits_msf(top, c, b) + [(g - e) % b]


def build_B(system: CriterionSystem, a: Sequence[int], e: Sequence[int], g: Sequence[int]) -> np.ndarray:
    b = system.b
    parts = []
    for cj, aj, ej, gj, dj in zip(system.c, a, e, g, system.delta_digits):
        parts.append((np.array(interval_digit_vector(aj, ej, gj, cj, b)) - dj) % b)
    return np.concatenate(parts)


def consistent_g(system: CriterionSystem, a: Sequence[int], e: Sequence[int]) -> list[tuple[int, ...]]:
    """All ``g`` whose right-hand side obeys every dependence relation of ``F_{c+1}``."""
    b, d = system.b, len(system.c)
    out = []
    for g in product(range(b), repeat=d):
        B = build_B(system, a, e, g)
        if not np.any((system.nullbasis @ B) % b):
            out.append(g)
    return out


def count_points_by_solving(system: CriterionSystem, a: Sequence[int], e: Sequence[int]) -> int:
    """Total number of solutions over all ``g`` (solved one system at a time)."""
    b, d = system.b, len(system.c)
    return sum(solve_affine(system.F_stack, build_B(system, a, e, g)).count
               for g in product(range(b), repeat=d))


def _axis_syndromes(system: CriterionSystem, j: int, toroidal: bool) -> tuple[np.ndarray, np.ndarray]:
    """Syndromes ``N_j A_j`` for every admissible (a_j, e_j) and every g_j.

    Returns ``(S, ae)`` with ``S`` of shape ``(n_ae, b, k)`` and ``ae`` the
    matching ``(n_ae, 2)`` table of ``(a_j, e_j)``.
    """
    b, cj = system.b, system.c[j]
    r0 = system.offsets[j]
    Nj = system.nullbasis[:, r0:r0 + cj + 1]
    k = Nj.shape[0]
    na = b**cj
    a_all = np.arange(na, dtype=np.int64)
    if cj:
        w = np.array([b ** (cj - 1 - t) for t in range(cj)], dtype=np.int64)
        digs = (a_all[:, None] // w) % b
        T0 = (digs @ Nj[:, :cj].T) % b
    else:
        T0 = np.zeros((1, k), dtype=np.int64)
    Tm1 = np.roll(T0, 1, axis=0)  # row a holds the syndrome of (a - 1) mod b^c
    last = Nj[:, cj]
    e_idx = np.arange(b)
    g_idx = np.arange(b)
    carry = g_idx[None, :] >= e_idx[:, None]  # (e, g)
    lastv = ((g_idx[None, :] - e_idx[:, None]) % b)[..., None] * last  # (e, g, k)
    S = np.where(carry[None, :, :, None], T0[:, None, None, :], Tm1[:, None, None, :]) + lastv[None]
    S %= b  # (a, e, g, k)
    ae = np.stack(np.meshgrid(a_all, e_idx, indexing="ij"), axis=-1).reshape(-1, 2)
    S = S.reshape(-1, b, k)
    if not toroidal:
        keep = ~((ae[:, 0] == 0) & (ae[:, 1] != 0))
        S, ae = S[keep], ae[keep]
    return S, ae


def _encode(rows: np.ndarray, b: int) -> np.ndarray:
    k = rows.shape[-1]
    if b**k < 2**62:
        w = np.array([b**t for t in range(k)], dtype=np.int64)
        return rows @ w
    flat = rows.reshape(-1, k)
    _, inv = np.unique(flat, axis=0, return_inverse=True)
    return inv.reshape(rows.shape[:-1])


@dataclass
class CriterionResult:
    status: str  # "separated" | "violated" | "inapplicable"
    c: tuple[int, ...]
    violation: Violation | None = None
    reason: str = ""
    g_pair: tuple[tuple[int, ...], tuple[int, ...]] | None = None

    @property
    def applicable(self) -> bool:
        return self.status != "inapplicable"

    @property
    def separated(self) -> bool | None:
        return None if self.status == "inapplicable" else self.status == "separated"


def _solution_index(system: CriterionSystem, B: np.ndarray) -> int:
    sol = solve_affine(system.F_stack, B)
    n_vec = sol.representative
    return int(sum(int(v) * system.b**i for i, v in enumerate(n_vec)))


def criterion_check(spec: NetSpec, delta: ShiftVector, c: Sequence[int], toroidal: bool = True) -> CriterionResult:
    """Decide separation at ``c`` from the generating matrices and the shift.

    For each admissible ``(a, e)``, counts the ``g`` whose system is consistent;
    separated iff every count is at most one.  With ``toroidal=False`` only the
    intervals that do not wrap around are examined.
    """
    c = tuple(int(v) for v in c)
    try:
        system = criterion_system(spec, delta, c)
    except CriterionInapplicable as exc:
        return CriterionResult("inapplicable", c, reason=str(exc))
    b, d = spec.b, spec.d
    k = system.nullbasis.shape[0]
    sigma = np.zeros(k, dtype=np.int64)
    for j in range(d):
        r0 = system.offsets[j]
        sigma += system.nullbasis[:, r0:r0 + c[j] + 1] @ system.delta_digits[j]
    sigma %= b

    per_axis = [_axis_syndromes(system, j, toroidal) for j in range(d)]
    # fold all axes but the last into one table of partial syndromes
    S_left, ae_left = per_axis[0]
    ae_left = ae_left[:, None, :]  # (n, axes, 2)
    for j in range(1, d - 1):
        Sj, aej = per_axis[j]
        n0, G0 = S_left.shape[:2]
        S_left = (S_left[:, None, :, None, :] + Sj[None, :, None, :, :]) % b
        S_left = S_left.reshape(n0 * len(Sj), G0 * b, k)
        ae_left = np.concatenate([np.repeat(ae_left, len(aej), axis=0),
                                  np.tile(aej[:, None, :], (n0, 1, 1))], axis=1)
    if d == 1:
        S_right = np.zeros((1, 1, k), dtype=np.int64)
        ae_right = np.zeros((1, 0, 2), dtype=np.int64)
    else:
        S_right, ae_r = per_axis[-1]
        ae_right = ae_r[:, None, :]
    target = (sigma[None, None, :] - S_right) % b

    nL, GL = S_left.shape[:2]
    nR, GR = target.shape[:2]
    codes = _encode(np.concatenate([S_left.reshape(-1, k), target.reshape(-1, k)]), b)
    codeL, codeR = codes[:nL * GL], codes[nL * GL:]
    oL = np.argsort(codeL, kind="stable")
    oR = np.argsort(codeR, kind="stable")
    cL, cR = codeL[oL], codeR[oR]
    lo = np.searchsorted(cR, cL, "left")
    hi = np.searchsorted(cR, cL, "right")
    cnt = hi - lo
    total = int(cnt.sum())
    if total:
        eL = np.repeat(oL, cnt)  # flat (row, g) ids on the left
        start = np.repeat(lo - (np.cumsum(cnt) - cnt), cnt)
        eR = oR[np.arange(total) + start]
        keys = (eL // GL) * nR + eR // GR
        uniq, counts = np.unique(keys, return_counts=True)
        bad = np.flatnonzero(counts > 1)
    else:
        bad = np.array([], dtype=np.int64)
    if bad.size == 0:
        return CriterionResult("separated", c)

    key = int(uniq[bad[0]])
    iL, iR = divmod(key, nR)
    ae = np.concatenate([ae_left[iL], ae_right[iR]], axis=0)
    a = tuple(int(v) for v in ae[:, 0])
    e = tuple(int(v) for v in ae[:, 1])
    gs = consistent_g(system, a, e)
    idx = sorted(_solution_index(system, build_B(system, a, e, g)) for g in gs)
    J = IntervalSpec(c, a, e, b, toroidal)
    return CriterionResult("violated", c, Violation(J, (idx[0], idx[1])),
                           reason=f"{len(gs)} consistent g", g_pair=(gs[0], gs[1]))


def min_kappa_criterion(spec: NetSpec, delta: ShiftVector, budget: int | None = None,
                        toroidal: bool = True) -> SeparationReport:
    """Smallest kappa <= budget at which the criterion certifies separation.

    ``c = (kappa, ..., kappa)`` dominates every ``c`` with ``max c_j <= kappa``
    componentwise and contains all their rows, so it is the decisive choice at
    each level.  Levels where the rank hypothesis fails are listed in
    ``inapplicable``; ``kappa`` is None when the budget is exhausted.
    """
    b, m, d = spec.b, spec.m, spec.d
    if budget is None:
        budget = m + 1
    report = SeparationReport(None, None, "criterion", b, toroidal, budget=budget)
    for kappa in range(budget + 1):
        c = (kappa,) * d
        res = criterion_check(spec, delta, c, toroidal)
        if res.status == "inapplicable":
            report.inapplicable.append(c)
        elif res.status == "separated":
            report.kappa, report.c_witness = kappa, c
            return report
        else:
            report.violation, report.violation_level = res.violation, kappa
    return report


# -- t-value -------------------------------------------------------------------------

def t_value(spec: NetSpec) -> int:
    """Smallest t such that, for every ``c`` with ``sum(c) = m - t``, the first
    ``c_j`` rows of the ``F_j`` are linearly independent."""
    b, m, d = spec.b, spec.m, spec.d
    if d > 5 or m > 20:
        raise ValueError(f"t-value search limited to d <= 5 and m <= 20 (got d={d}, m={m})")
    if b == 2:
        packed = [pack_rows_gf2(F.data) for F in spec.matrices]

        def full_rank(c):
            rows = [r for P, cj in zip(packed, c) for r in P[:cj]]
            return _rank_gf2_bits(rows) == len(rows)
    else:
        def full_rank(c):
            blocks = [F.data[:cj] for F, cj in zip(spec.matrices, c)]
            M = FieldMatrix(np.vstack(blocks), b)
            return rank(M) == M.rows

    for t in range(m + 1):
        if all(full_rank(c) for c in compositions(m - t, d)):
            return t
    return m


def composition_count(m: int, d: int) -> int:
    return comb(m + d - 1, d - 1)


def shifted_point(spec: NetSpec, delta: ShiftVector, n: int) -> tuple[int, ...]:
    return shift_point(point_of_index(spec, n), delta)
