"""Digital nets as exact integer points.

A coordinate ``x = x_1/b + ... + x_m/b^m`` is stored as the integer
``X = x * b^m``, so the digit ``x_k`` is ``(X // b^(m-k)) % b``.  Point ``n``
always sits in row ``n``, which keeps sequence prefixes available.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .constructions import NetSpec

MAX_POINTS = 2**24
_CHUNK = 2**16


@dataclass(frozen=True, eq=False)
class NetPoints:
    b: int
    m: int
    coords: np.ndarray  # (N, d) int64, each entry in [0, b^m)
    label: str = ""

    def __post_init__(self):
        arr = np.array(self.coords, dtype=np.int64, copy=True)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.size and (arr.min() < 0 or arr.max() >= self.b**self.m):
            raise ValueError("coordinates must lie in [0, b^m)")
        arr.flags.writeable = False
        object.__setattr__(self, "coords", arr)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]

    @property
    def scale(self) -> int:
        return self.b**self.m

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other):
        if not isinstance(other, NetPoints):
            return NotImplemented
        return (self.b, self.m) == (other.b, other.m) and np.array_equal(self.coords, other.coords)

    def prefix(self, count: int) -> "NetPoints":
        return NetPoints(self.b, self.m, self.coords[:count], self.label)

    def point(self, n: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(v), self.scale) for v in self.coords[n])

    def as_float(self) -> np.ndarray:
        return self.coords / float(self.scale)


@dataclass(frozen=True, eq=False)
class ShiftVector:
    """Digit vectors ``(delta_{j,1}, ..., delta_{j,m})`` of a digital shift."""

    b: int
    m: int
    digits: np.ndarray  # (d, m)

    def __post_init__(self):
        arr = np.array(self.digits, dtype=np.int64, copy=True)
        if arr.ndim != 2 or arr.shape[1] != self.m:
            raise ValueError(f"shift digits must have shape (d, {self.m})")
        if arr.size and (arr.min() < 0 or arr.max() >= self.b):
            raise ValueError(f"shift digits must lie in [0, {self.b})")
        arr.flags.writeable = False
        object.__setattr__(self, "digits", arr)

    @property
    def d(self) -> int:
        return self.digits.shape[0]

    @classmethod
    def zero(cls, b: int, m: int, d: int) -> "ShiftVector":
        return cls(b, m, np.zeros((d, m), dtype=np.int64))

    @classmethod
    def random(cls, b: int, m: int, d: int, rng: np.random.Generator) -> "ShiftVector":
        return cls(b, m, rng.integers(0, b, size=(d, m)))

    @classmethod
    def from_ints(cls, b: int, m: int, values: Sequence[int]) -> "ShiftVector":
        """Build from scaled shifts ``delta_j * b^m``."""
        return cls(b, m, np.vstack([int_to_digits(int(v), b, m) for v in values]))

    def to_ints(self) -> list[int]:
        w = place_values(self.b, self.m)
        return [int(row @ w) for row in self.digits]


def place_values(b: int, m: int) -> np.ndarray:
    """``[b^(m-1), ..., b, 1]``: weight of digit k = 1..m."""
    return np.array([b ** (m - 1 - k) for k in range(m)], dtype=np.int64)


def int_to_digits(X: int, b: int, m: int) -> np.ndarray:
    """Most significant first: ``X = sum_k x_k b^(m-k)``."""
    out = np.zeros(m, dtype=np.int64)
    for k in range(m - 1, -1, -1):
        X, out[k] = divmod(X, b)
    return out


def coords_to_digits(X: np.ndarray, b: int, m: int) -> np.ndarray:
    """Digit expansion of an integer array; digits on a new trailing axis."""
    X = np.asarray(X, dtype=np.int64)
    w = place_values(b, m)
    return (X[..., None] // w) % b


def index_digits(n: np.ndarray, b: int, m: int) -> np.ndarray:
    """``(n_0, ..., n_{m-1})`` least significant first."""
    powers = np.array([b**k for k in range(m)], dtype=np.int64)
    return (np.asarray(n, dtype=np.int64)[:, None] // powers) % b


def generate_points(spec: NetSpec, count: int | None = None) -> NetPoints:
    N = spec.size if count is None else int(count)
    if spec.size > MAX_POINTS:
        raise ValueError(f"b^m = {spec.size} exceeds the {MAX_POINTS}-point limit; use point_of_index")
    if not 0 <= N <= spec.size:
        raise ValueError(f"count {N} outside [0, {spec.size}]")
    b, m = spec.b, spec.m
    w = place_values(b, m)
    FT = np.stack([F.data.T for F in spec.matrices])  # (d, m, m)
    out = np.empty((N, spec.d), dtype=np.int64)
    for start in range(0, N, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, N), dtype=np.int64)
        D = index_digits(idx, b, m)
        for j in range(spec.d):
            out[start:start + len(idx), j] = ((D @ FT[j]) % b) @ w
    return NetPoints(b, m, out, spec.label)


def point_of_index(spec: NetSpec, n: int) -> tuple[int, ...]:
    """Scaled integer coordinates of point ``n`` alone (exact for any ``b^m``)."""
    b, m = spec.b, spec.m
    if not 0 <= n < b**m:
        raise ValueError(f"index {n} outside [0, b^m)")
    digits = []
    for _ in range(m):
        n, r = divmod(n, b)
        digits.append(r)
    out = []
    for F in spec.matrices:
        x = 0
        for row in F.data.tolist():
            x = x * b + sum(a * c for a, c in zip(row, digits)) % b
        out.append(x)
    return tuple(out)


def point_digits(spec: NetSpec, n: int) -> list[list[int]]:
    """Digit vectors ``F_j n`` of point ``n`` (most significant first)."""
    b, m = spec.b, spec.m
    return [int_to_digits(X, b, m).tolist() for X in point_of_index(spec, n)]


def digital_shift(points: NetPoints, delta: ShiftVector) -> NetPoints:
    if (points.b, points.m, points.d) != (delta.b, delta.m, delta.d):
        raise ValueError("shift does not match the net's (b, m, d)")
    b, m = points.b, points.m
    if b == 2:
        return NetPoints(b, m, points.coords ^ np.array(delta.to_ints(), dtype=np.int64), points.label)
    D = coords_to_digits(points.coords, b, m)
    D = (D + delta.digits[None, :, :]) % b
    return NetPoints(b, m, D @ place_values(b, m), points.label)


def shift_point(x: Sequence[int], delta: ShiftVector) -> tuple[int, ...]:
    """Digitally shift a single scaled point (arbitrary-size ints)."""
    b, m = delta.b, delta.m
    out = []
    for X, row in zip(x, delta.digits.tolist()):
        digs = []
        for _ in range(m):
            X, r = divmod(X, b)
            digs.append(r)
        digs.reverse()
        v = 0
        for xk, dk in zip(digs, row):
            v = v * b + (xk + dk) % b
        out.append(v)
    return tuple(out)


def box_counts_ok(points: NetPoints, t: int = 0) -> bool:
    """True iff every elementary interval of volume ``b^(t-m)`` holds ``b^t`` points."""
    b, m, d = points.b, points.m, points.d
    if points.n != b**m:
        raise ValueError("the box-count test needs the full net")
    for c in compositions(m - t, d):
        cell = np.zeros(points.n, dtype=np.int64)
        for j, cj in enumerate(c):
            cell = cell * b**cj + points.coords[:, j] // b ** (m - cj)
        counts = np.bincount(cell, minlength=b ** (m - t))
        if not np.all(counts == b**t):
            return False
    return True


def compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
    """All ``(c_1, ..., c_parts)`` of non-negative integers summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


# -- point-file format ---------------------------------------------------------
# header "b m d N", then N lines of d scaled integers.

def write_points(points: NetPoints, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{points.b} {points.m} {points.d} {points.n}\n")
        for row in points.coords.tolist():
            fh.write(" ".join(str(v) for v in row) + "\n")


def read_points(path) -> NetPoints:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4:
            raise ValueError("point file header must be 'b m d N'")
        b, m, d, N = (int(v) for v in header)
        data = np.loadtxt(fh, dtype=np.int64, ndmin=2) if N else np.zeros((0, d), dtype=np.int64)
    if data.shape != (N, d):
        raise ValueError(f"point file declares {N}x{d} points, found {data.shape}")
    return NetPoints(b, m, data)
