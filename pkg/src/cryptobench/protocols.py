"""Secure sum of private inputs, and two small number puzzles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class SecureSumSession:
    n: int
    modulus: int
    inputs: list[int]
    shares: np.ndarray                 # shares[i, j]: share of X_i sent to j
    messages: list[tuple[int, int, int]] = field(default_factory=list)  # (sender, receiver, share)
    published: list[int] = field(default_factory=list)

    def received_by(self, j: int) -> list[int]:
        return [s for (_, r, s) in self.messages if r == j]


def secure_sum(inputs, price: int, seed=None):
    """Each participant splits X_i into n additive shares mod N = n * price,
    keeps one, sends the others, and publishes the sum of what it holds.

    Returns (total mod N, total >= price, session).
    """
    xs = [int(x) for x in inputs]
    n = len(xs)
    if n < 2:
        raise ValueError("need at least two participants")
    if price <= 0:
        raise ValueError("price must be positive")
    if any(x < 0 or x >= price for x in xs):
        raise ValueError("every input must lie in [0, price)")
    N = n * price
    rng = np.random.default_rng(seed)
    shares = np.empty((n, n), dtype=object)
    for i, x in enumerate(xs):
        row = [int(v) for v in rng.integers(0, N, size=n - 1)]
        shares[i, :n - 1] = row
        shares[i, n - 1] = (x - sum(row)) % N
    session = SecureSumSession(n, N, xs, shares)
    for i in range(n):
        for j in range(n):
            if i != j:
                session.messages.append((i, j, int(shares[i, j])))
    session.published = [int(sum(shares[:, j]) % N) for j in range(n)]
    total = sum(session.published) % N
    return total, total >= price, session


# -- 1024-bit key ---------------------------------------------------------------------

KEY_BITS = 1024


@dataclass(frozen=True)
class KeyState:
    """Bits in reading order; bits[0] is the most significant."""

    bits: tuple[int, ...]

    @classmethod
    def from_string(cls, s: str) -> "KeyState":
        s = "".join(s.split())
        if set(s) - {"0", "1"}:
            raise ValueError("key must be a bit string")
        return cls(tuple(int(c) for c in s))

    @classmethod
    def zeros(cls, width: int = KEY_BITS) -> "KeyState":
        return cls((0,) * width)

    @classmethod
    def ones(cls, width: int = KEY_BITS) -> "KeyState":
        return cls((1,) * width)

    @classmethod
    def random(cls, rng, width: int = KEY_BITS) -> "KeyState":
        return cls(tuple(int(b) for b in rng.integers(0, 2, size=width)))

    @property
    def width(self) -> int:
        return len(self.bits)

    def value(self) -> int:
        return int("".join(map(str, self.bits)) or "0", 2)

    def __str__(self):
        return "".join(map(str, self.bits))


class IllegalMove(ValueError):
    pass


def keyflip_step(k: KeyState, i: int, j: int) -> KeyState:
    """Invert bits i..j (inclusive); both endpoints must be 0."""
    if not 0 <= i <= j < k.width:
        raise IllegalMove(f"bad segment [{i}, {j}]")
    if k.bits[i] or k.bits[j]:
        raise IllegalMove("segment endpoints must both be 0")
    flipped = tuple(1 - b for b in k.bits[i:j + 1])
    return KeyState(k.bits[:i] + flipped + k.bits[j + 1:])


def legal_moves_exist(k: KeyState) -> bool:
    return 0 in k.bits


def keyflip_terminal(width: int = KEY_BITS) -> KeyState:
    """The only state without a legal move."""
    return KeyState.ones(width)


def random_legal_step(k: KeyState, rng) -> KeyState:
    zeros = [t for t, b in enumerate(k.bits) if b == 0]
    if not zeros:
        raise IllegalMove("no legal move from the all-ones key")
    i, j = sorted(int(v) for v in rng.choice(zeros, size=2))
    return keyflip_step(k, i, j)


def keyflip_simulate(k: KeyState, rng, max_steps: int | None = None) -> tuple[KeyState, int]:
    """Random legal steps until none is left. Returns (final key, steps)."""
    limit = max_steps if max_steps is not None else 1 << k.width
    steps = 0
    while legal_moves_exist(k):
        if steps >= limit:
            raise RuntimeError("step limit reached")
        k = random_legal_step(k, rng)
        steps += 1
    return k, steps


# -- repunits ---------------------------------------------------------------------------

def repunit_multiple(modulus: int, zeros: int = 0) -> tuple[int, int]:
    """(a, k) with 1^a 0^k divisible by modulus, a minimal."""
    if modulus <= 0 or math.gcd(modulus, 10) != 1:
        raise ValueError("modulus must be positive and coprime to 10")
    if zeros < 0:
        raise ValueError("zeros must be nonnegative")
    r, a = 1 % modulus, 1
    while r:
        r = (10 * r + 1) % modulus
        a += 1
    return a, zeros


def digit_shape_value(a: int, k: int) -> int:
    return int("1" * a + "0" * k)
