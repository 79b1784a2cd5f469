"""Generating matrices for the digital nets studied here.

Infinite generating matrices (van der Corput, Sobol', Faure) are truncated to
their upper-left ``m x m`` block.  For the upper-triangular families this is
exact for the first ``b**m`` points; for a lower-triangular scramble ``L`` it
drops digits below ``b**-m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf import FieldError, FieldMatrix, check_modulus, mat_mul
from .poly import PolyFb, fibonacci_poly, laurent_coeffs


@dataclass(frozen=True)
class NetSpec:
    """Generating matrices ``(F_1, ..., F_d)``, each ``m x m`` over F_b."""

    b: int
    m: int
    matrices: tuple[FieldMatrix, ...]
    label: str = "custom"
    t_claimed: int | None = None

    def __post_init__(self):
        check_modulus(self.b)
        mats = tuple(self.matrices)
        if not mats:
            raise FieldError("a net needs at least one generating matrix")
        for F in mats:
            if F.b != self.b:
                raise FieldError(f"matrix over F_{F.b} in a net over F_{self.b}")
            if F.shape != (self.m, self.m):
                raise FieldError(f"generating matrix has shape {F.shape}, expected {(self.m, self.m)}")
        object.__setattr__(self, "matrices", mats)

    @property
    def d(self) -> int:
        return len(self.matrices)

    @property
    def size(self) -> int:
        return self.b**self.m


def _check_m(m: int) -> None:
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")


def anti_identity(m: int, b: int) -> FieldMatrix:
    return FieldMatrix(np.eye(m, dtype=np.int64)[::-1], b)


def vdc_matrices(b: int, m: int) -> NetSpec:
    _check_m(m)
    return NetSpec(b, m, (FieldMatrix.identity(m, b),), label="vdc", t_claimed=0)


def hammersley_matrices(b: int, m: int) -> NetSpec:
    _check_m(m)
    return NetSpec(b, m, (FieldMatrix.identity(m, b), anti_identity(m, b)), label="hammersley", t_claimed=0)


def lp_matrices(b: int, m: int) -> NetSpec:
    """Larcher-Pillichshammer net: ``F_2[k, l] = 1`` iff ``k + l <= m + 1`` (1-based)."""
    _check_m(m)
    k = np.arange(m)
    F2 = (k[:, None] + k[None, :] <= m - 1).astype(np.int64)
    return NetSpec(b, m, (FieldMatrix.identity(m, b), FieldMatrix(F2, b)), label="lp", t_claimed=0)


def binom_mod(n: int, k: int, b: int) -> int:
    """``C(n, k) mod b`` for prime ``b`` by Lucas's theorem."""
    if k < 0 or k > n:
        return 0
    out = 1
    while n or k:
        ni, ki = n % b, k % b
        if ki > ni:
            return 0
        # small binomial by multiplicative formula, exact in Python ints
        c = 1
        for t in range(ki):
            c = c * (ni - t) // (t + 1)
        out = (out * c) % b
        n //= b
        k //= b
    return out


def pascal_power_matrix(b: int, m: int, k: int) -> FieldMatrix:
    """``(P^k)_{i,j} = k^(j-i) C(j-1, i-1) mod b`` for ``j >= i`` (1-based); ``P^0 = I``."""
    check_modulus(b)
    if not 0 <= k < b:
        raise ValueError(f"power k={k} outside [0, {b})")
    M = np.zeros((m, m), dtype=np.int64)
    for i in range(m):
        for j in range(i, m):
            c = binom_mod(j, i, b)
            if c:
                M[i, j] = (pow(k, j - i, b) * c) % b
    return FieldMatrix(M, b)


def faure_matrices(b: int, m: int) -> NetSpec:
    _check_m(m)
    mats = tuple(pascal_power_matrix(b, m, k) for k in range(b))
    return NetSpec(b, m, mats, label="faure", t_claimed=0)


def _is_unit_lower_triangular(L: FieldMatrix) -> bool:
    D = L.data
    return bool(np.all(np.triu(D, 1) == 0) and np.all(np.diag(D) != 0))


def sobol2_scrambled(m: int, L: FieldMatrix | None = None, variant: str = "LP") -> NetSpec:
    """Scrambled 2-d Sobol' net over F_2 with matrices ``(L, P)`` or ``(I, L P)``."""
    _check_m(m)
    if L is None:
        L = FieldMatrix.identity(m, 2)
    if L.b != 2 or L.shape != (m, m):
        raise FieldError(f"scramble must be an {m}x{m} matrix over F_2")
    if not _is_unit_lower_triangular(L):
        raise FieldError("scramble must be nonsingular lower-triangular")
    P = pascal_power_matrix(2, m, 1)
    v = variant.upper()
    if v == "LP":
        mats = (L, P)
    elif v == "ILP":
        mats = (FieldMatrix.identity(m, 2), mat_mul(L, P))
    else:
        raise ValueError(f"unknown variant {variant!r}; use 'LP' or 'ILP'")
    return NetSpec(2, m, mats, label=f"sobol2-{v.lower()}", t_claimed=0)


def random_lower_triangular(m: int, rng: np.random.Generator) -> FieldMatrix:
    """Unit-diagonal lower-triangular matrix over F_2 with i.i.d. fair bits below."""
    M = np.tril(rng.integers(0, 2, size=(m, m)), -1) + np.eye(m, dtype=np.int64)
    return FieldMatrix(M, 2)


def hankel_from_laurent(q: PolyFb, p: PolyFb, m: int) -> FieldMatrix:
    """``F[k, l] = u_{k+l-1}`` (1-based) from the expansion of ``q/p``."""
    u = laurent_coeffs(q, p, 1, 2 * m - 1)
    idx = np.arange(m)
    return FieldMatrix(np.array(u, dtype=np.int64)[idx[:, None] + idx[None, :]], p.b)


def polylattice_matrices(p: PolyFb, qs: Sequence[PolyFb], label: str = "polylattice") -> NetSpec:
    if p.is_zero():
        raise ZeroDivisionError("polynomial lattice needs a nonzero modulus p")
    m = p.deg
    _check_m(m)
    if not qs:
        raise ValueError("at least one numerator polynomial is required")
    mats = tuple(hankel_from_laurent(q, p, m) for q in qs)
    return NetSpec(p.b, m, mats, label=label)


def fibonacci_lattice_matrices(m: int) -> NetSpec:
    _check_m(m)
    spec = polylattice_matrices(fibonacci_poly(m + 1), [PolyFb((1,), 2), fibonacci_poly(m)], label="fiblattice")
    return NetSpec(2, m, spec.matrices, label="fiblattice", t_claimed=0)


CONSTRUCTIONS = ("vdc", "hammersley", "lp", "faure", "sobol2", "polylattice", "fiblattice")
