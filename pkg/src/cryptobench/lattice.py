"""Lagrange-Gauss reduction and factoring n from the hint h = 3^2019 p^2 + 5^2019 q^2 mod n^2 + 8*2019."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .algebra import int_sqrt_exact

log = logging.getLogger(__name__)

Vector = tuple[int, int]


def _dot(u: Vector, v: Vector) -> int:
    return u[0] * v[0] + u[1] * v[1]


def _round_div(a: int, b: int) -> int:
    """Nearest integer to a / b for b > 0 (ties toward +inf)."""
    return (2 * a + b) // (2 * b)


def lagrange_gauss(v1: Vector, v2: Vector) -> tuple[Vector, Vector]:
    """Reduced basis (u, w) of the same lattice with |u| <= |w| and u shortest."""
    if v1[0] * v2[1] - v1[1] * v2[0] == 0:
        raise ValueError("basis vectors are linearly dependent")
    u, w = tuple(v1), tuple(v2)
    if _dot(u, u) > _dot(w, w):
        u, w = w, u
    while True:
        mu = _round_div(_dot(u, w), _dot(u, u))
        w = (w[0] - mu * u[0], w[1] - mu * u[1])
        if _dot(w, w) >= _dot(u, u):
            return u, w
        u, w = w, u


@dataclass(frozen=True)
class FactoringInstance:
    n: int
    h: int

    @property
    def m(self) -> int:
        return self.n * self.n + 8 * 2019

    def __post_init__(self):
        if self.n <= 1 or self.n % 2 == 0:
            raise ValueError("n must be odd and > 1")
        if not 0 <= self.h < self.m:
            raise ValueError("h must be reduced modulo n^2 + 8*2019")


def make_hint(p: int, q: int) -> int:
    m = (p * q) ** 2 + 8 * 2019
    return (pow(3, 2019, m) * p * p + pow(5, 2019, m) * q * q) % m


def hint_lattice(inst: FactoringInstance) -> tuple[Vector, Vector]:
    m = inst.m
    t_inv = pow(pow(3, 2019, m), -1, m)
    return (1, pow(5, 2019, m) * t_inv % m), (0, m)


class NoFactorization(ArithmeticError):
    pass


Z_RANGE = 10


def _solve_for_p(a1: int, a2: int, C: int, n: int) -> int | None:
    """Root p of a1 p^4 - C p^2 + a2 n^2 = 0 with p | n, 1 < p < n."""
    if a1 == 0:
        return None
    disc = C * C - 4 * a1 * a2 * n * n
    s = int_sqrt_exact(disc)
    if s is None:
        return None
    for num in (C + s, C - s):
        if num % (2 * a1):
            continue
        p = int_sqrt_exact(num // (2 * a1))
        if p and 1 < p < n and n % p == 0:
            return p
    return None


def factor_with_hint(inst: FactoringInstance) -> tuple[int, int]:
    """Recover (p, q) from (n, h); p is the prime multiplied by 3^2019."""
    m, n = inst.m, inst.n
    try:
        t_inv = pow(pow(3, 2019, m), -1, m)
    except ValueError:
        raise NoFactorization("3^2019 is not invertible modulo m") from None
    (a1, a2), _ = lagrange_gauss(*hint_lattice(inst))
    if a1 < 0 or (a1 == 0 and a2 < 0):
        a1, a2 = -a1, -a2
    zs = sorted(range(-Z_RANGE, Z_RANGE + 1), key=lambda z: (abs(z), z))
    for b1, b2 in ((a1, a2), (-a1, -a2)):
        c0 = b1 * inst.h * t_inv % m
        for z in zs:
            p = _solve_for_p(b1, b2, c0 + z * m, n)
            if p is not None:
                log.debug("solved with z=%d", z)
                return p, n // p
    raise NoFactorization("no z in [-10, 10] gives an integer root")


def random_balanced_instance(bits: int, rng) -> tuple[int, int, FactoringInstance]:
    """Primes p, q in [2^(bits-1), 2^bits) and their hint instance."""
    from sympy import nextprime

    def prime():
        while True:
            c = nextprime(rng.getrandbits(bits) | (1 << (bits - 1)))
            if c < 1 << bits:
                return c

    p, q = prime(), prime()
    while q == p:
        q = prime()
    return p, q, FactoringInstance(p * q, make_hint(p, q))
