"""Shared arithmetic: GF(2^n), balanced ternary, residues mod 2019, Dickson polynomials."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

CALC_MODULUS = 2019

# x^n + ... as (n+1)-bit masks; n=3 is X^3+X+1, n=8 is the AES polynomial.
DEFAULT_MODULI = {
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0x11B,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1002B,
}


def poly_degree(p: int) -> int:
    return p.bit_length() - 1


def poly_mod(a: int, m: int) -> int:
    """Remainder of a modulo m, both polynomials over GF(2) as bit masks."""
    dm = poly_degree(m)
    while a and poly_degree(a) >= dm:
        a ^= m << (poly_degree(a) - dm)
    return a


def is_irreducible(p: int) -> bool:
    """Exhaustive trial division by every polynomial of degree 1..deg(p)//2."""
    d = poly_degree(p)
    if d < 1:
        return False
    for q in range(2, 1 << (d // 2 + 1)):
        if poly_mod(p, q) == 0:
            return False
    return True


@dataclass(frozen=True)
class Gf2nField:
    """The field GF(2^n) = GF(2)[X]/(modulus). Elements are n-bit ints."""

    n: int
    modulus: int = 0
    _mul_table: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not 3 <= self.n <= 16:
            raise ValueError(f"extension degree must be in 3..16, got {self.n}")
        if self.modulus == 0:
            object.__setattr__(self, "modulus", DEFAULT_MODULI[self.n])
        if poly_degree(self.modulus) != self.n:
            raise ValueError(f"modulus {self.modulus:#x} does not have degree {self.n}")
        if not is_irreducible(self.modulus):
            raise ValueError(f"modulus {self.modulus:#x} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.n

    def check(self, x: int) -> int:
        if not 0 <= x < self.order:
            raise ValueError(f"{x} is not an element of GF(2^{self.n})")
        return x

    def mul(self, a: int, b: int) -> int:
        self.check(a)
        self.check(b)
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a >> self.n:
                a ^= self.modulus
        return r

    def pow(self, beta: int, e: int) -> int:
        return gf_pow(self, beta, e)

    def inv(self, a: int) -> int:
        if self.check(a) == 0:
            raise ZeroDivisionError("0 has no inverse")
        return gf_pow(self, a, self.order - 2)

    def mul_table(self) -> np.ndarray:
        """Full multiplication table, shape (2^n, 2^n). Only for n <= 10."""
        if self._mul_table is None:
            if self.n > 10:
                raise ValueError("multiplication table too large")
            q = self.order
            a = np.arange(q, dtype=np.int64)
            table = np.zeros((q, q), dtype=np.int64)
            shifted = a.copy()
            for bit in range(self.n):
                mask = ((np.arange(q) >> bit) & 1).astype(bool)
                table[:, mask] ^= shifted[:, None]
                shifted = shifted << 1
                over = (shifted >> self.n) & 1 == 1
                shifted[over] ^= self.modulus
            object.__setattr__(self, "_mul_table", table)
        return self._mul_table


def gf_pow(field: Gf2nField, beta: int, e: int) -> int:
    """beta**e in the field; 0**0 == 1."""
    field.check(beta)
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    result, base = 1, beta
    while e:
        if e & 1:
            result = field.mul(result, base)
        base = field.mul(base, base)
        e >>= 1
    return result


def balanced_encode(value: int) -> list[int]:
    """Balanced-ternary digits of value, least significant first, no trailing zeros."""
    if value < 0:
        raise ValueError("value must be nonnegative")
    trits = []
    while value:
        r = value % 3
        if r == 2:
            trits.append(-1)
            value = value // 3 + 1
        else:
            trits.append(r)
            value //= 3
    return trits


def balanced_decode(trits) -> int:
    v = 0
    for t in reversed(list(trits)):
        if t not in (-1, 0, 1):
            raise ValueError(f"not a trit: {t}")
        v = 3 * v + int(t)
    return v


def mod2019(x: int) -> int:
    return x % CALC_MODULUS


def dickson_eval(degree: int, y: int, a: int, modulus: int = CALC_MODULUS) -> int:
    """D_degree(y, a) mod modulus via D_k = y D_{k-1} - a D_{k-2}, D_0 = 2, D_1 = y."""
    if not 0 <= degree <= 64:
        raise ValueError("degree must be in 0..64")
    prev, cur = 2 % modulus, y % modulus
    if degree == 0:
        return prev
    for _ in range(degree - 1):
        prev, cur = cur, (y * cur - a * prev) % modulus
    return cur


def int_sqrt_exact(x: int) -> int | None:
    """r with r*r == x, or None when x is negative or not a perfect square."""
    if x < 0:
        return None
    r = math.isqrt(x)
    return r if r * r == x else None
