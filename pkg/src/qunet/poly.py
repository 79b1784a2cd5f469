"""Univariate polynomials over F_b, Laurent expansions and continued fractions.

A polynomial is a tuple of coefficients in ascending powers, trimmed so the
leading coefficient is nonzero (the zero polynomial is the empty tuple).
Structural equality is therefore polynomial equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .gf import FieldError, check_modulus, inverse


def _trim(coeffs: Sequence[int], b: int) -> tuple[int, ...]:
    c = [int(v) % b for v in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class PolyFb:
    coeffs: tuple[int, ...]
    b: int = 2

    def __post_init__(self):
        check_modulus(self.b)
        object.__setattr__(self, "coeffs", _trim(self.coeffs, self.b))

    @classmethod
    def x_power(cls, k: int, b: int = 2) -> "PolyFb":
        return cls((0,) * k + (1,), b)

    @classmethod
    def const(cls, c: int, b: int = 2) -> "PolyFb":
        return cls((c,), b)

    @property
    def deg(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def _check(self, other: "PolyFb") -> None:
        if other.b != self.b:
            raise FieldError(f"modulus mismatch: {self.b} vs {other.b}")

    def __add__(self, other: "PolyFb") -> "PolyFb":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyFb([self[i] + other[i] for i in range(n)], self.b)

    def __neg__(self) -> "PolyFb":
        return PolyFb([-c for c in self.coeffs], self.b)

    def __sub__(self, other: "PolyFb") -> "PolyFb":
        return self + (-other)

    def __mul__(self, other: "PolyFb") -> "PolyFb":
        self._check(other)
        if self.is_zero() or other.is_zero():
            return PolyFb((), self.b)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, c in enumerate(other.coeffs):
                    out[i + j] += a * c
        return PolyFb(out, self.b)

    def shift(self, k: int) -> "PolyFb":
        """Multiply by x**k (k >= 0)."""
        if self.is_zero():
            return self
        return PolyFb((0,) * k + self.coeffs, self.b)

    def __divmod__(self, other: "PolyFb"):
        return poly_divmod(self, other)

    def __floordiv__(self, other: "PolyFb") -> "PolyFb":
        return poly_divmod(self, other)[0]

    def __mod__(self, other: "PolyFb") -> "PolyFb":
        return poly_divmod(self, other)[1]

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.deg, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
            terms.append(mono if c == 1 and i > 0 else (f"{c}" if i == 0 else f"{c}*{mono}"))
        return " + ".join(terms)


def poly_divmod(a: PolyFb, d: PolyFb) -> tuple[PolyFb, PolyFb]:
    a._check(d)
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    b = a.b
    r = list(a.coeffs)
    dd = d.deg
    lead_inv = inverse(d.coeffs[-1], b)
    q = [0] * max(len(r) - dd, 0)
    for k in range(len(r) - 1, dd - 1, -1):
        c = r[k] % b
        if not c:
            continue
        f = (c * lead_inv) % b
        q[k - dd] = f
        for i, dc in enumerate(d.coeffs):
            r[k - dd + i] = (r[k - dd + i] - f * dc) % b
    return PolyFb(q, b), PolyFb(r[:dd], b)


def poly_gcd(a: PolyFb, b_: PolyFb) -> PolyFb:
    """Monic gcd."""
    while not b_.is_zero():
        a, b_ = b_, poly_divmod(a, b_)[1]
    if a.is_zero():
        return a
    lc = inverse(a.coeffs[-1], a.b)
    return PolyFb([c * lc for c in a.coeffs], a.b)


@dataclass(frozen=True)
class LaurentPrefix:
    """Coefficients ``u_start, ..., u_{start+len-1}`` of ``q/p = sum u_i x^-i``."""

    start: int
    coeffs: tuple[int, ...]
    b: int = 2

    def u(self, i: int) -> int:
        """Coefficient of x**-i; zero before ``start``."""
        if i < self.start:
            return 0
        k = i - self.start
        if k >= len(self.coeffs):
            raise IndexError(f"u_{i} beyond the computed prefix")
        return self.coeffs[k]


def laurent_expand(q: PolyFb, p: PolyFb, nterms: int) -> LaurentPrefix:
    """Expand ``q/p`` in powers of ``1/x`` by long division.

    ``start`` is ``deg p - deg q`` (for ``q = 0`` it is taken as ``deg p``).
    """
    q._check(p)
    if p.is_zero():
        raise ZeroDivisionError("zero denominator")
    if nterms < 1:
        raise ValueError("nterms must be >= 1")
    w = p.deg - (q.deg if not q.is_zero() else 0)
    top = w + nterms - 1  # highest index needed
    # q x^N = Q p + R, so u_i = coeff of x^(N-i) in Q for i <= N
    N = max(top, 0)
    Q, _ = poly_divmod(q.shift(N), p)
    coeffs = tuple(Q[N - i] if N - i >= 0 else 0 for i in range(w, top + 1))
    return LaurentPrefix(w, coeffs, p.b)


def laurent_coeffs(q: PolyFb, p: PolyFb, lo: int, hi: int) -> list[int]:
    """``[u_lo, ..., u_hi]`` of ``q/p`` (zeros below the series start)."""
    pre = laurent_expand(q, p, max(hi - (p.deg - max(q.deg, 0)) + 1, 1))
    return [pre.u(i) for i in range(lo, hi + 1)]


@dataclass(frozen=True)
class CFExpansion:
    partial_quotients: tuple[PolyFb, ...]

    @property
    def max_partial_degree(self) -> int:
        """Largest degree among ``a_1..a_l`` (0 when there are none)."""
        return max((a.deg for a in self.partial_quotients[1:]), default=0)

    def reconstruct(self) -> tuple[PolyFb, PolyFb]:
        """Return ``(num, den)`` with ``num/den = [a_0; a_1, ..., a_l]``."""
        a = self.partial_quotients
        b = a[0].b
        num, den = a[-1], PolyFb((1,), b)
        for ai in reversed(a[:-1]):
            num, den = ai * num + den, num
        return num, den


def cf_expand(q: PolyFb, p: PolyFb) -> CFExpansion:
    q._check(p)
    if p.is_zero():
        raise ZeroDivisionError("zero denominator")
    g = poly_gcd(q, p)
    if g.deg > 0:
        raise ValueError(f"inputs share the factor {g}; reduce q/p first")
    quotients = []
    num, den = q, p
    while not den.is_zero():
        a, r = poly_divmod(num, den)
        quotients.append(a)
        num, den = den, r
    return CFExpansion(tuple(quotients))


def fibonacci_poly(n: int) -> PolyFb:
    """n-th Fibonacci polynomial over F_2: f_1 = 1, f_2 = x, f_{n+2} = x f_{n+1} + f_n."""
    if n < 1:
        raise ValueError("Fibonacci polynomials are indexed from 1")
    # packed as int bitmasks: bit i <-> x^i
    prev, cur = 1, 0b10
    if n == 1:
        return PolyFb((1,), 2)
    for _ in range(n - 2):
        prev, cur = cur, (cur << 1) ^ prev
    return PolyFb([(cur >> i) & 1 for i in range(cur.bit_length())], 2)


def parse_poly(text: str) -> PolyFb:
    """Parse ``"b: c0 c1 ... c_deg"`` (ascending powers)."""
    if ":" not in text:
        raise ValueError(f"polynomial {text!r} must look like 'b: c0 c1 ...'")
    head, body = text.split(":", 1)
    b = int(head.strip())
    coeffs = [int(t) for t in body.split()]
    if any(not 0 <= c < b for c in coeffs):
        raise ValueError(f"coefficient outside [0, {b}) in {text!r}")
    return PolyFb(coeffs, b)


def format_poly(p: PolyFb) -> str:
    return f"{p.b}: " + " ".join(str(c) for c in (p.coeffs or (0,)))
