"""Separation radius, covering radius and mesh ratio of integer-scaled point sets.

Every radius is an exact :class:`~fractions.Fraction`.  For the Euclidean norm
all radii are carried *squared* so they stay rational; ``RadiusReport.squared``
says which convention a report uses.

Nearest-neighbour searches go through :class:`scipy.spatial.cKDTree` on the
integer coordinates.  With integers below 2**53 the max- and sum-norm
distances it computes are exact; for the Euclidean norm only the returned
neighbour index is used and the distance is recomputed in integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .pointgen import NetPoints

INF = math.inf
MAX_CELLS = 2**26
_QUERY_CHUNK = 2**18


def _norm_p(p) -> float:
    if p in ("inf", "Inf", "INF", INF):
        return INF
    p = float(p)
    if p not in (1.0, 2.0):
        raise ValueError(f"unsupported norm p={p}; use 1, 2 or inf")
    return p


def _axis_gaps(x: np.ndarray, y: np.ndarray, scale: int, toroidal: bool) -> np.ndarray:
    g = np.abs(np.asarray(x, dtype=np.int64) - np.asarray(y, dtype=np.int64))
    if toroidal:
        g = np.minimum(g, scale - g)
    return g


def _combine(g: np.ndarray, p: float) -> np.ndarray:
    """Integer distance numerators along the last axis (squared for p=2)."""
    if p == INF:
        return g.max(axis=-1)
    if p == 1.0:
        return g.sum(axis=-1)
    return (g * g).sum(axis=-1)


def pair_distance(x: Sequence[int], y: Sequence[int], scale: int, p=INF, toroidal: bool = False) -> Fraction:
    """Exact distance between two scaled points (squared when ``p == 2``)."""
    if len(x) != len(y):
        raise ValueError("points have different dimensions")
    p = _norm_p(p)
    gaps = []
    for a, b in zip(x, y):
        g = abs(int(a) - int(b))
        if toroidal:
            g = min(g, scale - g)
        gaps.append(g)
    if p == INF:
        return Fraction(max(gaps, default=0), scale)
    if p == 1.0:
        return Fraction(sum(gaps), scale)
    return Fraction(sum(g * g for g in gaps), scale * scale)


@dataclass
class RadiusReport:
    """Exact radii of one point set.

    When ``squared`` is true (Euclidean norm) every radius and ratio field holds
    the square of the quantity.
    """

    q: Fraction
    q_witness: tuple[int, int]
    h_lower: Fraction
    h_upper: Fraction
    norm: float
    toroidal: bool
    resolution: int  # grid spacing is b**-resolution
    squared: bool = False
    rho_lower: Fraction | None = None
    rho_upper: Fraction | None = None

    def __post_init__(self):
        if self.q > 0:
            self.rho_lower = self.h_lower / self.q
            self.rho_upper = self.h_upper / self.q


@dataclass
class BoundsReport:
    N: int
    d: int
    p: float
    h_volume_lower: float
    q_volume_upper: float
    h_net_upper: Fraction | None = None
    extra: dict = field(default_factory=dict)


# -- separation radius ---------------------------------------------------------------

def _min_pairs_bruteforce(coords: np.ndarray, scale: int, p: float, toroidal: bool) -> tuple[int, tuple[int, int]]:
    N = coords.shape[0]
    best, witness = None, None
    for i in range(N - 1):
        g = _axis_gaps(coords[i][None, :], coords[i + 1:], scale, toroidal)
        dist = _combine(g, p)
        k = int(np.argmin(dist))
        v = int(dist[k])
        if best is None or v < best:
            best, witness = v, (i, i + 1 + k)
    return best, witness


def _min_pairs_kdtree(coords: np.ndarray, scale: int, p: float, toroidal: bool) -> tuple[int, tuple[int, int]]:
    data = coords.astype(np.float64)
    tree = cKDTree(data, boxsize=float(scale) if toroidal else None)
    _, nn = tree.query(data, k=2, p=p)
    nbr = nn[:, 1]
    # exact recomputation; the self-match can land in column 1 on duplicates
    g = _axis_gaps(coords, coords[nbr], scale, toroidal)
    exact = _combine(g, p)
    dup = nbr == np.arange(len(nbr))
    if np.any(dup):
        exact = np.where(dup, _combine(_axis_gaps(coords, coords[nn[:, 0]], scale, toroidal), p), exact)
    best = int(exact.min())
    if best == 0:
        # duplicates: the lexicographically smallest equal pair
        groups: dict[tuple, list[int]] = {}
        for i, row in enumerate(coords.tolist()):
            groups.setdefault(tuple(row), []).append(i)
        pairs = [(g[0], g[1]) for g in groups.values() if len(g) > 1]
        return 0, min(pairs)
    r = float(best) if p != 2.0 else math.sqrt(best) * (1 + 1e-12) + 1e-9
    cand = tree.query_pairs(r, p=p, output_type="ndarray")
    i, j = cand[:, 0], cand[:, 1]
    dist = _combine(_axis_gaps(coords[i], coords[j], scale, toroidal), p)
    hit = dist == best
    lo = np.minimum(i[hit], j[hit])
    hi = np.maximum(i[hit], j[hit])
    k = np.lexsort((hi, lo))[0]
    return best, (int(lo[k]), int(hi[k]))


def _min_pairs_sorted_1d(coords: np.ndarray, scale: int, p: float, toroidal: bool) -> tuple[int, tuple[int, int]]:
    x = coords[:, 0]
    order = np.argsort(x, kind="stable")
    v = x[order]
    gaps = np.diff(v)
    i, j = order[:-1], order[1:]
    if toroidal:
        gaps = np.append(gaps, v[0] + scale - v[-1])
        i, j = np.append(i, order[-1]), np.append(j, order[0])
    best = int(gaps.min())
    if best == 0:
        # duplicates: any equal pair, then the smallest one
        groups: dict[int, list[int]] = {}
        for k, val in enumerate(x.tolist()):
            groups.setdefault(val, []).append(k)
        return 0, min((g[0], g[1]) for g in groups.values() if len(g) > 1)
    hit = gaps == best
    lo, hi = np.minimum(i[hit], j[hit]), np.maximum(i[hit], j[hit])
    k = np.lexsort((hi, lo))[0]
    return (best * best if p == 2.0 else best), (int(lo[k]), int(hi[k]))


def separation_radius(points: NetPoints, p=INF, toroidal: bool = False, method: str = "auto") -> tuple[Fraction, tuple[int, int]]:
    """Half the minimal pairwise distance, with the lexicographically smallest witness.

    For ``p == 2`` the returned radius is squared.
    """
    p = _norm_p(p)
    if points.n < 2:
        raise ValueError("separation radius needs at least two points")
    if method == "auto":
        method = "sorted" if points.d == 1 else ("bruteforce" if points.n <= 256 else "kdtree")
    if method == "sorted":
        if points.d != 1:
            raise ValueError("the sorted method is for one-dimensional point sets")
        best, wit = _min_pairs_sorted_1d(points.coords, points.scale, p, toroidal)
    elif method == "bruteforce":
        best, wit = _min_pairs_bruteforce(points.coords, points.scale, p, toroidal)
    elif method == "kdtree":
        best, wit = _min_pairs_kdtree(points.coords, points.scale, p, toroidal)
    else:
        raise ValueError(f"unknown method {method!r}")
    if p == 2.0:
        return Fraction(best, 4 * points.scale**2), wit
    return Fraction(best, 2 * points.scale), wit


# -- covering radius -----------------------------------------------------------------

def default_resolution(points: NetPoints) -> int:
    return -(-points.m // points.d) + 2


def _lattice_max_1d(y: np.ndarray, den: int, step: int, offset: int, toroidal: bool) -> int:
    """Max over evaluation points ``offset + k*step`` in ``[0, den]`` of the
    distance to the nearest of the sorted integer positions ``y``."""
    y = np.unique(y)
    kmax = (den - offset) // step
    best = 0
    if toroidal:
        lo = y
        hi = np.append(y[1:], y[0] + den)
    else:
        # boundary stretches: nearest evaluation points to 0 and den
        first = offset
        last = offset + kmax * step
        best = max(int(y[0]) - first, 0, last - int(y[-1]))
        lo, hi = y[:-1], y[1:]
    if lo.size:
        mid2 = lo + hi  # twice the midpoint
        # candidate k around the midpoint, clipped into the gap
        kc = (mid2 - 2 * offset) // (2 * step)
        vals = []
        for dk in (0, 1):
            k = kc + dk
            pos = offset + k * step
            inside = (pos >= lo) & (pos <= hi)
            if not toroidal:
                inside &= (k >= 0) & (k <= kmax)
            f = np.minimum(pos - lo, hi - pos)
            vals.append(np.where(inside, f, 0))
        best = max(best, int(np.max(np.maximum(vals[0], vals[1]))))
    return best


def _grid_points(nper: int, step: int, offset: int, d: int, start: int, stop: int, den: int) -> np.ndarray:
    flat = np.arange(start, stop, dtype=np.int64)
    out = np.empty((flat.size, d), dtype=np.int64)
    for j in range(d - 1, -1, -1):
        flat, r = np.divmod(flat, nper)
        out[:, j] = offset + r * step
    return out


def _lattice_max_nd(tree: cKDTree, pts: np.ndarray, den: int, nper: int, step: int, offset: int,
                    p: float, toroidal: bool, d: int) -> int:
    total = nper**d
    best = 0
    for start in range(0, total, _QUERY_CHUNK):
        g = _grid_points(nper, step, offset, d, start, min(start + _QUERY_CHUNK, total), den)
        q = g % den if toroidal else g
        _, nn = tree.query(q.astype(np.float64), k=1, p=p)
        dist = _combine(_axis_gaps(q, pts[nn], den, toroidal), p)
        best = max(best, int(dist.max()))
    return best


def covering_radius_bracket(points: NetPoints, p=INF, resolution: int | None = None,
                            toroidal: bool = False) -> tuple[Fraction, Fraction]:
    """Bracket ``h_lower <= h <= h_upper`` on a grid of spacing ``s = b**-resolution``.

    The lower end is the largest nearest-point distance over cell centres and
    cell vertices.  The upper end adds ``s * w_p`` (the half-cell radius) to the
    largest distance over cell centres.  For ``p == 2`` both ends are squared and
    the irrational half-cell term is rounded outward.
    """
    p = _norm_p(p)
    if points.n < 1:
        raise ValueError("covering radius needs at least one point")
    r = default_resolution(points) if resolution is None else int(resolution)
    if r < 1:
        raise ValueError("resolution must be >= 1")
    b, m, d = points.b, points.m, points.d
    nper = b**r
    if nper**d > MAX_CELLS:
        raise ValueError(f"grid of {nper}^{d} cells exceeds the {MAX_CELLS}-cell limit; lower the resolution")
    den = 2 * b ** max(m, r)
    h0 = den // (2 * nper)  # half-cell in units of 1/den
    pts = points.coords * (den // points.scale)
    if d == 1:
        ys = pts[:, 0]
        centres = _lattice_max_1d(ys, den, 2 * h0, h0, toroidal)
        everything = _lattice_max_1d(ys, den, h0, 0, toroidal)
        if p == 2.0:
            centres, everything = centres * centres, everything * everything
    else:
        tree = cKDTree(pts.astype(np.float64), boxsize=float(den) if toroidal else None)
        centres = _lattice_max_nd(tree, pts, den, nper, 2 * h0, h0, p, toroidal, d)
        verts = _lattice_max_nd(tree, pts, den, nper + (0 if toroidal else 1), 2 * h0, 0, p, toroidal, d)
        everything = max(centres, verts)
    if p == INF:
        return Fraction(everything, den), Fraction(centres, den) + Fraction(h0, den)
    if p == 1.0:
        return Fraction(everything, den), Fraction(centres, den) + Fraction(d * h0, den)
    # squared: (sqrt(F) + s*sqrt(d)/2)^2 = F + 2*half*sqrt(d F) + d*half^2
    F = Fraction(centres, den * den)
    half = Fraction(h0, den)
    root = _sqrt_upper(d * F)
    return Fraction(everything, den * den), F + 2 * half * root + d * half * half


def _sqrt_upper(x: Fraction) -> Fraction:
    """Rational upper bound on ``sqrt(x)`` (exact when ``x`` is a rational square)."""
    n, dd = x.numerator, x.denominator
    prod = n * dd
    s = math.isqrt(prod)
    if s * s < prod:
        s += 1
    return Fraction(s, dd)


def covering_radius_1d_exact(points: NetPoints, toroidal: bool = False) -> Fraction:
    """Exact covering radius of a 1-d point set from its sorted gaps."""
    y = np.unique(points.coords[:, 0])
    S = points.scale
    if toroidal:
        gaps = np.diff(np.append(y, y[0] + S))
        return Fraction(int(gaps.max()), 2 * S)
    inner = int(np.diff(y).max()) if y.size > 1 else 0
    return max(Fraction(int(y[0]), S), Fraction(S - int(y[-1]), S), Fraction(inner, 2 * S))


def analyze(points: NetPoints, p=INF, toroidal: bool = False, resolution: int | None = None,
            method: str = "auto") -> RadiusReport:
    p = _norm_p(p)
    r = default_resolution(points) if resolution is None else resolution
    q, wit = separation_radius(points, p, toroidal, method)
    hl, hu = covering_radius_bracket(points, p, r, toroidal)
    return RadiusReport(q, wit, hl, hu, p, toroidal, r, squared=(p == 2.0))


# -- theoretical bounds --------------------------------------------------------------

def volume_bounds(N: int, d: int, p=INF) -> BoundsReport:
    """Ball-volume bounds: a lower bound on h and an upper bound on q (floats)."""
    p = _norm_p(p)
    if N < 2:
        raise ValueError("need N >= 2")
    if p == INF:
        g_d, g_1 = 1.0, 1.0
    else:
        g_d, g_1 = math.gamma(1 + d / p), math.gamma(1 + 1 / p)
    root = g_d ** (1 / d)
    h_low = N ** (-1 / d) * root / (2 * g_1)
    q_up = root / (2 * N ** (1 / d) * g_1 - 2 * root)
    return BoundsReport(N, d, p, h_low, q_up)


def _iroot_ceil(x: int, k: int) -> int:
    """Smallest integer r with r**k >= x."""
    if x <= 0:
        return 0
    r = int(round(x ** (1.0 / k)))
    while r**k < x:
        r += 1
    while r > 0 and (r - 1) ** k >= x:
        r -= 1
    return r


def tmd_net_covering_bound(b: int, m: int, d: int, t: int) -> Fraction:
    """``b^((d+t-1)/d) * b^(-m/d)``, rounded up to a multiple of ``b^-m`` when irrational."""
    if not 0 <= t <= m:
        raise ValueError("need 0 <= t <= m")
    e_num = d + t - 1 - m  # exponent is e_num / d
    if e_num % d == 0:
        return Fraction(b) ** (e_num // d)
    # k / b^m >= b^(e_num/d)  <=>  k^d >= b^(m d + e_num)
    X = b ** (m * d + e_num)
    return Fraction(_iroot_ceil(X, d), b**m)


def mesh_ratio_ok(report: RadiusReport, bound) -> bool:
    """``rho_upper <= bound``; for squared reports ``bound`` is compared squared."""
    if report.rho_upper is None:
        return False
    bound = Fraction(bound)
    return report.rho_upper <= (bound * bound if report.squared else bound)
