"""TwinPeaks3: a 4-word generalized Feistel cipher and its slide attack.

Encryption applies 32 rounds (a,b,c,d) -> (b,c,d, a ^ F(b,c,d)) with F1 in
odd rounds and F2 in even ones. The incomplete decryption runs the same
rounds with F2 and F1 swapped. Writing g1, g2 for the two round maps,

    E = (g2 o g1)^16,  I = (g1 o g2)^16,
    I o g1 = g1 o E,   E o g2 = g2 o I,

so a pair x = (X,a,b,c), y = (a,b,c,X') with y = g1(x) is recognised by
I(y)[0:3] == E(x)[1:4], and then F1(a,b,c) = X ^ X'. The F2 case swaps
the roles of E and I.
"""

from __future__ import annotations

import hashlib
import logging
import threading
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

log = logging.getLogger(__name__)

MASK32 = 0xFFFFFFFF
ROUNDS = 32

RoundFunction = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


class Block128(NamedTuple):
    a: int
    b: int
    c: int
    d: int

    @classmethod
    def from_hex(cls, text: str) -> "Block128":
        text = text.strip().lower()
        if len(text) != 32:
            raise ValueError("a block is 32 hex digits")
        return cls(*(int(text[i:i + 8], 16) for i in range(0, 32, 8)))

    def hex(self) -> str:
        return "".join(f"{w:08x}" for w in self)

    def array(self) -> np.ndarray:
        return np.array(self, dtype=np.uint32)


def blocks_from_hex(text: str) -> np.ndarray:
    """ECB-style concatenated hex -> (N, 4) uint32, big-endian words."""
    text = text.strip().lower()
    if len(text) % 32:
        raise ValueError("hex length must be a multiple of 32")
    raw = bytes.fromhex(text)
    return np.frombuffer(raw, dtype=">u4").astype(np.uint32).reshape(-1, 4)


def blocks_to_hex(blocks: np.ndarray) -> str:
    return np.asarray(blocks, dtype=np.uint32).astype(">u4").tobytes().hex()


def _as_blocks(x) -> tuple[np.ndarray, bool]:
    if isinstance(x, Block128):
        return x.array()[None, :], True
    arr = np.asarray(x, dtype=np.uint32)
    if arr.ndim == 1:
        return arr.reshape(1, 4), True
    return arr.reshape(-1, 4), False


def forward_round(state, fval: int) -> Block128:
    a, b, c, d = state
    return Block128(b, c, d, (a ^ fval) & MASK32)


def invert_round(state, fval: int) -> Block128:
    """Undo one round given fval = F(a, b, c) of the state being peeled."""
    a, b, c, d = state
    return Block128((d ^ fval) & MASK32, a, b, c)


def apply_rounds(blocks: np.ndarray, schedule) -> np.ndarray:
    """Run the round map over (N, 4) uint32 blocks, one F per round."""
    a, b, c, d = (blocks[:, i].copy() for i in range(4))
    for F in schedule:
        a, b, c, d = b, c, d, a ^ F(b, c, d)
    return np.stack([a, b, c, d], axis=1)


_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        x = (x ^ (x >> np.uint64(30))) * _M1
        x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


class KeyedFunction:
    """Keyed pseudorandom stand-in for a secret round function (96 -> 32 bits)."""

    def __init__(self, key: bytes):
        words = np.frombuffer(hashlib.blake2b(key, digest_size=32).digest(), dtype="<u8")
        self._k = tuple(np.uint64(w) for w in words)

    def __call__(self, a, b, c):
        a = np.asarray(a, dtype=np.uint32).astype(np.uint64)
        b = np.asarray(b, dtype=np.uint32).astype(np.uint64)
        c = np.asarray(c, dtype=np.uint32).astype(np.uint64)
        k0, k1, k2, k3 = self._k
        h = _mix64(((a << np.uint64(32)) | b) ^ k0)
        with np.errstate(over="ignore"):
            h = _mix64(h ^ (c * k1) ^ k2) + k3
        return (h >> np.uint64(32)).astype(np.uint32) ^ h.astype(np.uint32)


def zero_function(a, b, c):
    return np.zeros(np.broadcast(np.asarray(a), np.asarray(b), np.asarray(c)).shape,
                    dtype=np.uint32)


class Oracle:
    """Encryption / incomplete-decryption server with query accounting.

    Counters count blocks, so a 10-block ECB request adds 10.
    """

    def __init__(self, f1: RoundFunction, f2: RoundFunction):
        self._f1, self._f2 = f1, f2
        self._lock = threading.Lock()
        self.encrypt_calls = 0
        self.decrypt_calls = 0

    @classmethod
    def from_seed(cls, seed: int | bytes) -> "Oracle":
        key = seed if isinstance(seed, bytes) else int(seed).to_bytes(16, "little", signed=True)
        return cls(KeyedFunction(b"F1" + key), KeyedFunction(b"F2" + key))

    @property
    def queries(self) -> int:
        return self.encrypt_calls + self.decrypt_calls

    def _run(self, x, first, second, counter: str):
        blocks, single = _as_blocks(x)
        out = apply_rounds(blocks, [first, second] * (ROUNDS // 2))
        with self._lock:
            setattr(self, counter, getattr(self, counter) + blocks.shape[0])
        return Block128(*map(int, out[0])) if single else out

    def encrypt(self, x):
        return self._run(x, self._f1, self._f2, "encrypt_calls")

    def incomplete_decrypt(self, x):
        return self._run(x, self._f2, self._f1, "decrypt_calls")

    def encrypt_hex(self, text: str) -> str:
        return blocks_to_hex(self.encrypt(blocks_from_hex(text)))

    def incomplete_decrypt_hex(self, text: str) -> str:
        return blocks_to_hex(self.incomplete_decrypt(blocks_from_hex(text)))


class QueryBudgetExceeded(RuntimeError):
    pass


def recover_f_value(o: Oracle, which: int, a: int, b: int, c: int, seed=None,
                    budget: int = 1 << 20, batch: int = 1 << 11) -> int:
    """F_which(a, b, c) by a birthday search for a slid pair.

    Each side draws fresh random 32-bit words: X for x = (X,a,b,c) and X'
    for y = (a,b,c,X'). For which=1, E(x)[1:4] is matched against I(y)[0:3];
    for which=2 the roles of E and I swap. A 96-bit match is accepted as is.
    """
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    x_side = o.encrypt if which == 1 else o.incomplete_decrypt
    y_side = o.incomplete_decrypt if which == 1 else o.encrypt

    def key(words: np.ndarray):
        w = words.astype(np.uint64)
        return (w[:, 0] << np.uint64(32)) | w[:, 1], words[:, 2]

    xs_key = np.empty(0, dtype=np.uint64)
    xs_lo = np.empty(0, dtype=np.uint32)
    xs_val = np.empty(0, dtype=np.uint32)
    ys_key, ys_lo, ys_val = xs_key.copy(), xs_lo.copy(), xs_val.copy()
    spent = 0
    while spent + 2 * batch <= budget:
        X = rng.integers(0, 1 << 32, size=batch, dtype=np.uint32)
        Xp = rng.integers(0, 1 << 32, size=batch, dtype=np.uint32)
        col = np.zeros(batch, dtype=np.uint32)
        x = np.stack([X, col + a, col + b, col + c], axis=1)
        y = np.stack([col + a, col + b, col + c, Xp], axis=1)
        kx, lx = key(x_side(x)[:, 1:4])
        ky, ly = key(y_side(y)[:, 0:3])
        spent += 2 * batch

        xs_key, xs_lo, xs_val = (np.concatenate(p) for p in
                                 ((xs_key, kx), (xs_lo, lx), (xs_val, X)))
        ys_key, ys_lo, ys_val = (np.concatenate(p) for p in
                                 ((ys_key, ky), (ys_lo, ly), (ys_val, Xp)))
        common, ix, iy = np.intersect1d(xs_key, ys_key, return_indices=True)
        for i, j in zip(ix, iy):
            if xs_lo[i] == ys_lo[j]:
                return int(xs_val[i] ^ ys_val[j])
    raise QueryBudgetExceeded(f"no slid pair within {budget} queries")


@dataclass
class AttackStats:
    queries: int
    values_recovered: int


def slide_attack_decrypt(o: Oracle, y, seed=None, budget_per_value: int = 1 << 20):
    """Decrypt y by peeling rounds 32..1, recovering each F value on demand.

    Returns (plaintext Block128, AttackStats).
    """
    rng = np.random.default_rng(seed)
    state = y if isinstance(y, Block128) else Block128(*map(int, y))
    start = o.queries
    for r in range(ROUNDS, 0, -1):
        which = 1 if r % 2 else 2
        a, b, c, _ = state
        fval = recover_f_value(o, which, a, b, c, seed=rng, budget=budget_per_value)
        state = invert_round(state, fval)
        log.debug("round %d: F%d(%08x,%08x,%08x) = %08x", r, which, a, b, c, fval)
    return state, AttackStats(o.queries - start, ROUNDS)


# Contest ciphertext and the published answer; the server's round functions
# are not available, so these serve as documentation only.
CONTEST_CIPHERTEXT = "e473f19a247429ab33b66268d57dd241"
CONTEST_PLAINTEXT_TEXT = "acherrypieplease"
