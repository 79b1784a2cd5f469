"""Exact arithmetic and linear algebra over a prime field F_b.

Matrices are stored as read-only ``int64`` numpy arrays with entries in
``[0, b)``.  All elimination routines use first-nonzero pivoting; over a
field no pivoting heuristic is needed for exactness.

Supported moduli are the primes below 2**15, so every product of two
entries fits comfortably in an ``int64``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

MAX_MODULUS = 2**15


class FieldError(ValueError):
    """Raised for modulus or shape mismatches."""


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_modulus(b: int) -> int:
    b = int(b)
    if not is_prime(b):
        raise FieldError(f"modulus {b} is not prime")
    if b >= MAX_MODULUS:
        raise FieldError(f"modulus {b} exceeds the supported range (< 2**15)")
    return b


def inverse(v: int, b: int) -> int:
    """Multiplicative inverse of ``v`` modulo prime ``b`` (extended Euclid)."""
    v %= b
    if v == 0:
        raise ZeroDivisionError("0 has no inverse in F_b")
    r0, r1, s0, s1 = b, v, 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    return s0 % b


@lru_cache(maxsize=64)
def _inverse_table(b: int) -> np.ndarray:
    tab = np.zeros(b, dtype=np.int64)
    for v in range(1, b):
        tab[v] = inverse(v, b)
    return tab


@dataclass(frozen=True)
class FieldElement:
    """An element of F_b."""

    value: int
    modulus: int

    def __post_init__(self):
        check_modulus(self.modulus)
        if not 0 <= self.value < self.modulus:
            raise FieldError(f"value {self.value} not in [0, {self.modulus})")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.modulus != self.modulus:
                raise FieldError("modulus mismatch")
            return other.value
        return int(other) % self.modulus

    def __add__(self, other):
        return FieldElement((self.value + self._coerce(other)) % self.modulus, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement((self.value - self._coerce(other)) % self.modulus, self.modulus)

    def __rsub__(self, other):
        return FieldElement((self._coerce(other) - self.value) % self.modulus, self.modulus)

    def __mul__(self, other):
        return FieldElement((self.value * self._coerce(other)) % self.modulus, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement((-self.value) % self.modulus, self.modulus)

    def inverse(self) -> "FieldElement":
        return FieldElement(inverse(self.value, self.modulus), self.modulus)

    def __truediv__(self, other):
        return self * FieldElement(self._coerce(other), self.modulus).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return FieldElement(pow(self.value, k, self.modulus), self.modulus)

    def __int__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class FieldMatrix:
    """Dense matrix over F_b.

    ``data`` is normalised to a read-only ``int64`` array reduced mod ``b``.
    """

    data: np.ndarray
    b: int

    def __post_init__(self):
        check_modulus(self.b)
        arr = np.array(self.data, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            if arr.size == 0:
                arr = arr.reshape(0, 0)
            else:
                raise FieldError("FieldMatrix needs a 2-d array")
        arr %= self.b
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @classmethod
    def identity(cls, n: int, b: int) -> "FieldMatrix":
        return cls(np.eye(n, dtype=np.int64), b)

    @classmethod
    def zeros(cls, rows: int, cols: int, b: int) -> "FieldMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), b)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], b: int) -> "FieldMatrix":
        return cls(np.array(rows, dtype=np.int64), b)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def T(self) -> "FieldMatrix":
        return FieldMatrix(self.data.T, self.b)

    def __getitem__(self, idx):
        return self.data[idx]

    def __eq__(self, other):
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return self.b == other.b and self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.b, self.shape, self.data.tobytes()))

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        return mat_mul(self, other)

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        _same_field(self, other)
        if self.shape != other.shape:
            raise FieldError("shape mismatch")
        return FieldMatrix(self.data + other.data, self.b)

    def __repr__(self):
        return f"FieldMatrix(b={self.b}, shape={self.shape},\n{self.data})"

    def tolist(self) -> list[list[int]]:
        return self.data.tolist()

    def rowstack(self, other: "FieldMatrix") -> "FieldMatrix":
        _same_field(self, other)
        return FieldMatrix(np.vstack([self.data, other.data]), self.b)


def _same_field(A: FieldMatrix, B: FieldMatrix) -> None:
    if A.b != B.b:
        raise FieldError(f"modulus mismatch: {A.b} vs {B.b}")


def mat_mul(A: FieldMatrix, B: FieldMatrix) -> FieldMatrix:
    _same_field(A, B)
    if A.cols != B.rows:
        raise FieldError(f"dimension mismatch: {A.shape} x {B.shape}")
    # entries < 2**15, so each partial sum stays below 2**30 * cols
    return FieldMatrix((A.data @ B.data) % A.b, A.b)


def mat_vec(A: FieldMatrix, v: Sequence[int]) -> np.ndarray:
    v = np.asarray(v, dtype=np.int64)
    if v.shape != (A.cols,):
        raise FieldError(f"vector of length {v.shape} does not match {A.cols} columns")
    return (A.data @ v) % A.b


def row_reduce(M: np.ndarray, b: int, ncols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``M`` over F_b.

    Only the first ``ncols`` columns are used as pivot columns (default: all),
    which lets callers reduce augmented matrices.  Returns the reduced copy and
    the list of pivot columns.
    """
    R = np.array(M, dtype=np.int64, copy=True) % b
    nrows = R.shape[0]
    if ncols is None:
        ncols = R.shape[1]
    inv = _inverse_table(b)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            R[[r, p]] = R[[p, r]]
        R[r] = (R[r] * inv[R[r, c]]) % b
        col = R[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            R[rows] = (R[rows] - np.outer(col[rows], R[r])) % b
        pivots.append(c)
        r += 1
    return R, pivots


def _rank_gf2_bits(rows: Iterable[int]) -> int:
    """Rank over F_2 of rows packed into Python ints (xor basis)."""
    basis: dict[int, int] = {}
    for v in rows:
        while v:
            top = v.bit_length() - 1
            if top in basis:
                v ^= basis[top]
            else:
                basis[top] = v
                break
    return len(basis)


def pack_rows_gf2(M: np.ndarray) -> list[int]:
    weights = [1 << k for k in range(M.shape[1])]
    return [sum(w for w, bit in zip(weights, row) if bit) for row in M.tolist()]


def rank(A: FieldMatrix) -> int:
    if A.rows == 0 or A.cols == 0:
        return 0
    if A.b == 2:
        return _rank_gf2_bits(pack_rows_gf2(A.data))
    return len(row_reduce(A.data, A.b)[1])


def rank_generic(A: FieldMatrix) -> int:
    """Rank by plain elimination, bypassing the packed F_2 path."""
    if A.rows == 0 or A.cols == 0:
        return 0
    return len(row_reduce(A.data, A.b)[1])


@dataclass(frozen=True)
class SolveOutcome:
    """Classification of the solution set of ``A n = rhs``."""

    kind: str  # "inconsistent" | "unique" | "affine"
    representative: np.ndarray | None = field(default=None, compare=False)
    nullity: int = 0
    b: int = 2

    @property
    def consistent(self) -> bool:
        return self.kind != "inconsistent"

    @property
    def count(self) -> int:
        return 0 if self.kind == "inconsistent" else self.b**self.nullity


def solve_affine(A: FieldMatrix, rhs: Sequence[int]) -> SolveOutcome:
    rhs = np.asarray(rhs, dtype=np.int64) % A.b
    if rhs.shape != (A.rows,):
        raise FieldError(f"rhs length {rhs.shape} does not match {A.rows} rows")
    aug = np.hstack([A.data, rhs.reshape(-1, 1)])
    R, piv = row_reduce(aug, A.b, ncols=A.cols)
    rk = len(piv)
    if np.any(R[rk:, -1]):
        return SolveOutcome("inconsistent", None, 0, A.b)
    x = np.zeros(A.cols, dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = R[i, -1]
    nullity = A.cols - rk
    x.flags.writeable = False
    return SolveOutcome("unique" if nullity == 0 else "affine", x, nullity, A.b)


def left_nullspace(A: FieldMatrix) -> list[np.ndarray]:
    """Basis of ``{r : r^T A = 0}``; its size is ``rows - rank(A)``."""
    n = A.rows
    if n == 0:
        return []
    aug = np.hstack([A.data, np.eye(n, dtype=np.int64)])
    R, piv = row_reduce(aug, A.b, ncols=A.cols)
    rk = len(piv)
    basis = []
    for i in range(rk, n):
        v = R[i, A.cols:].copy()
        v.flags.writeable = False
        basis.append(v)
    return basis


def nullspace_matrix(A: FieldMatrix) -> np.ndarray:
    """Left nullspace basis stacked as a ``(rows - rank) x rows`` array."""
    basis = left_nullspace(A)
    if not basis:
        return np.zeros((0, A.rows), dtype=np.int64)
    return np.vstack(basis)


# -- text format -------------------------------------------------------------
# "b rows cols" header, then `rows` lines of `cols` digits in [0, b).

def parse_matrices(text: str) -> list[FieldMatrix]:
    """Parse one or more concatenated matrix blocks."""
    tokens = [line.split() for line in text.splitlines()]
    lines = [t for t in tokens if t and not t[0].startswith("#")]
    out = []
    i = 0
    while i < len(lines):
        head = lines[i]
        if len(head) != 3:
            raise FieldError(f"bad matrix header {' '.join(head)!r}; expected 'b rows cols'")
        b, rows, cols = (int(x) for x in head)
        body = lines[i + 1:i + 1 + rows]
        if len(body) != rows:
            raise FieldError("matrix block truncated")
        data = []
        for row in body:
            vals = [int(x) for x in row]
            if len(vals) != cols:
                raise FieldError(f"row has {len(vals)} entries, expected {cols}")
            if any(not 0 <= v < b for v in vals):
                raise FieldError(f"entry outside [0, {b})")
            data.append(vals)
        out.append(FieldMatrix(np.array(data, dtype=np.int64).reshape(rows, cols), b))
        i += 1 + rows
    return out


def format_matrix(A: FieldMatrix) -> str:
    lines = [f"{A.b} {A.rows} {A.cols}"]
    lines += [" ".join(str(int(v)) for v in row) for row in A.data]
    return "\n".join(lines) + "\n"
