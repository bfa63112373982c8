"""Curl27 ternary sponge hash and the fragmentation collision attack.

Trits are exposed as int8 values in {-1, 0, 1}. Internally the round
function works on residues {0, 1, 2} (uint8) so that S-box lookups are a
single table index; 2 is the residue of -1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .algebra import balanced_encode

log = logging.getLogger(__name__)

STATE = 729
WORD = 243
ROUNDS = 27
STEP_LENGTHS = tuple(3 ** (6 - i) for i in range(1, 7))  # 243, 81, 27, 9, 3, 1


def _F(a: int, b: int, c: int) -> int:
    v = (a * a * b * b * c + a * a * b * c * c - a * b * b * c * c + a * a * b * b
         - a * a * b * c + a * a * c * c + a * b * b * c - a * a * c + a * b * b
         - a * c * c + b * b * c + b * c * c - a * a - b * b + b * c - c * c - c + 1)
    return v % 3


def _to_trit(r: int) -> int:
    return r if r < 2 else -1


def sbox_apply(a: int, b: int, c: int) -> tuple[int, int, int]:
    """S(a,b,c) = (F(a,b,c), F(b,c,a), F(c,a,b)) on trits."""
    for t in (a, b, c):
        if t not in (-1, 0, 1):
            raise ValueError(f"not a trit: {t}")
    return (_to_trit(_F(a, b, c)), _to_trit(_F(b, c, a)), _to_trit(_F(c, a, b)))


def _build_tables():
    table = np.zeros((27, 3), dtype=np.uint8)
    for a in range(3):
        for b in range(3):
            for c in range(3):
                table[9 * a + 3 * b + c] = (_F(a, b, c), _F(b, c, a), _F(c, a, b))
    diag = np.array([table[13 * r][0] for r in range(3)], dtype=np.uint8)
    return table, diag


# SBOX[9a+3b+c] -> residue triple; DIAG[r] is the common output trit of S(r,r,r).
SBOX, DIAG = _build_tables()


def to_residues(trits) -> np.ndarray:
    t = np.asarray(trits)
    if t.size and (t.min() < -1 or t.max() > 1):
        raise ValueError("trit values must be in {-1, 0, 1}")
    return (t.astype(np.int16) % 3).astype(np.uint8)


def to_trits(residues) -> np.ndarray:
    r = np.asarray(residues, dtype=np.int8)
    return np.where(r == 2, np.int8(-1), r).astype(np.int8)


def _group_step(s: np.ndarray, n: int) -> np.ndarray:
    """One grouping step on residue states of shape (B, L): words of length n,
    group (w, j) = positions (3wn+j, 3wn+n+j, 3wn+2n+j)."""
    B, L = s.shape
    v = s.reshape(B, L // (3 * n), 3, n)
    idx = 9 * v[:, :, 0, :] + 3 * v[:, :, 1, :] + v[:, :, 2, :]
    out = SBOX[idx]  # (B, G, n, 3)
    return np.ascontiguousarray(np.moveaxis(out, -1, 2)).reshape(B, L)


def _schedule(m: int):
    """Per-round step list on an m-compressed state.

    Steps with word length n >= m act as grouping steps with length n // m;
    steps with n < m act inside a fragment and reduce to r -> DIAG[r].
    Consecutive fragment-internal steps are merged into one lookup.
    """
    steps = []
    for n in STEP_LENGTHS:
        if n >= m:
            steps.append(("group", n // m))
        elif steps and steps[-1][0] == "diag":
            steps[-1] = ("diag", DIAG[steps[-1][1]])
        else:
            steps.append(("diag", DIAG.copy()))
    return steps


def _curlf_numpy(s: np.ndarray, m: int = 1) -> np.ndarray:
    steps = _schedule(m)
    for _ in range(ROUNDS):
        for kind, arg in steps:
            s = _group_step(s, arg) if kind == "group" else arg[s]
    return s


try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

if numba is not None:
    @numba.njit(cache=True, nogil=True)
    def _curlf_kernel(s, codes, diags, rounds, sbox):
        B, L = s.shape
        for b in range(B):
            row = s[b]
            for _ in range(rounds):
                for k in range(codes.shape[0]):
                    n = codes[k]
                    if n > 0:
                        for base in range(0, L, 3 * n):
                            for i in range(base, base + n):
                                t = 9 * row[i] + 3 * row[i + n] + row[i + 2 * n]
                                row[i] = sbox[t, 0]
                                row[i + n] = sbox[t, 1]
                                row[i + 2 * n] = sbox[t, 2]
                    else:
                        d = diags[-n - 1]
                        for i in range(L):
                            row[i] = d[row[i]]
        return s


def _compiled_schedule(m: int):
    codes, diags = [], []
    for kind, arg in _schedule(m):
        if kind == "group":
            codes.append(arg)
        else:
            diags.append(arg)
            codes.append(-len(diags))
    if not diags:
        diags.append(DIAG)
    return np.array(codes, dtype=np.int64), np.array(diags, dtype=np.uint8)


USE_NUMBA = numba is not None


def _curlf_residues(s: np.ndarray, m: int = 1) -> np.ndarray:
    """27 rounds on residue states of shape (B, 729 // m)."""
    if not USE_NUMBA:
        return _curlf_numpy(s, m)
    codes, diags = _compiled_schedule(m)
    return _curlf_kernel(np.array(s, dtype=np.uint8, order="C"), codes, diags, ROUNDS, SBOX)


def curlf(state) -> np.ndarray:
    """Curl27-f on a 729-trit state (or a batch of shape (B, 729))."""
    s = to_residues(state)
    if s.shape[-1] != STATE:
        raise ValueError(f"state must have {STATE} trits, got {s.shape[-1]}")
    batched = s.reshape(-1, STATE)
    out = _curlf_residues(batched)
    return to_trits(out.reshape(s.shape))


def initial_state(length: int) -> np.ndarray:
    """Residue state with W0 = W2 = 0 and W1 = balanced-ternary length."""
    enc = balanced_encode(length)
    if len(enc) > WORD:
        raise ValueError("message length does not fit in 243 trits")
    s = np.zeros(STATE, dtype=np.uint8)
    s[WORD:WORD + len(enc)] = to_residues(enc)
    return s


def curl_hash(x) -> np.ndarray:
    """Curl27 digest (243 trits) of a trit sequence of any length."""
    msg = to_residues(np.asarray(x, dtype=np.int8).reshape(-1))
    length = msg.size
    nblocks = -(-length // WORD)
    padded = np.zeros(nblocks * WORD, dtype=np.uint8)
    padded[:length] = msg
    s = initial_state(length)[None, :]
    for i in range(nblocks):
        s[:, :WORD] = padded[i * WORD:(i + 1) * WORD]
        s = _curlf_residues(s)
    return to_trits(s[0, :WORD])


def verify_collision(x, x2) -> bool:
    x = np.asarray(x, dtype=np.int8).reshape(-1)
    x2 = np.asarray(x2, dtype=np.int8).reshape(-1)
    if x.shape == x2.shape and np.array_equal(x, x2):
        return False
    return bool(np.array_equal(curl_hash(x), curl_hash(x2)))


def _check_power_of_3(m: int):
    if m < 1 or 3 ** round(np.log(m) / np.log(3)) != m:
        raise ValueError(f"{m} is not a power of 3")


def is_fragmented(word, m: int) -> bool:
    """True iff every aligned run of m trits is constant."""
    _check_power_of_3(m)
    w = np.asarray(word).reshape(-1)
    if w.size % m:
        raise ValueError(f"length {w.size} not divisible by {m}")
    runs = w.reshape(-1, m)
    return bool((runs == runs[:, :1]).all())


def is_expanded3(word) -> bool:
    """True iff the 243-trit word is (abc)^81."""
    w = np.asarray(word).reshape(-1)
    if w.size != WORD:
        raise ValueError(f"expected {WORD} trits, got {w.size}")
    return bool((w.reshape(81, 3) == w[:3]).all())


def fragment_expand(digits, m: int) -> np.ndarray:
    """u^[m]: repeat every trit of u m times."""
    return np.repeat(np.asarray(digits, dtype=np.int8), m)


# -- collision search -------------------------------------------------------

_FP_MUL = np.uint64(0x9E3779B97F4A7C15)
_FP_MIX = (np.uint64(0xBF58476D1CE4E5B9), np.uint64(0x94D049BB133111EB))


def _fingerprint(res: np.ndarray) -> np.ndarray:
    """64-bit fingerprint of each residue row (B, k)."""
    h = np.full(res.shape[0], 0x243F6A8885A308D3, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for col in res.T:
            h = (h ^ col.astype(np.uint64)) * _FP_MUL
            h ^= h >> np.uint64(29)
        h = (h ^ (h >> np.uint64(30))) * _FP_MIX[0]
        h = (h ^ (h >> np.uint64(27))) * _FP_MIX[1]
    return h ^ (h >> np.uint64(31))


@dataclass
class CollisionResult:
    x: np.ndarray
    x2: np.ndarray
    hashes: int
    fingerprint_false_positives: int = 0


class BudgetExhausted(RuntimeError):
    pass


MAX_MATERIALIZED = 10**7


def fragmentation_collision_attack(m: int = 9, budget: int = 8_000_000, seed: int = 0,
                                   batch_size: int = 1 << 15) -> CollisionResult:
    """Birthday search over m-fragmented messages of length (3^m - 1)/2.

    The length word is m ones, so the initial state is m-fragmented and
    stays so while every full m-fragment of the message is constant and the
    trailing partial fragment is zero. Hashing then runs on states compressed
    by m, and each digest is determined by its 243/m fragment trits.

    Only the fragments of the last full 243-block vary (all full fragments
    when the message is shorter than one block); the rest are zero.
    """
    _check_power_of_3(m)
    if m > WORD:
        raise ValueError("m must be at most 243")
    if budget < 2:
        raise ValueError("budget must be at least 2")
    length = (3 ** m - 1) // 2
    if length > MAX_MATERIALIZED:
        raise ValueError(f"messages of {length} trits are too long to materialize")

    per_block = WORD // m
    nblocks = -(-length // WORD)
    full_blocks = length // WORD
    if full_blocks:
        vary_block = full_blocks - 1
        vary = np.arange(vary_block * per_block, full_blocks * per_block)
    else:
        vary_block = 0
        vary = np.arange(length // m)
    nvary = vary.size

    s0 = initial_state(length)
    if not is_fragmented(s0, m):
        raise AssertionError("initial state is not m-fragmented")
    state = s0[::m][None, :].copy()
    for _ in range(vary_block):
        state[:, :per_block] = 0
        state = _curlf_residues(state, m)

    def digests(codes: np.ndarray) -> np.ndarray:
        s = np.repeat(state, codes.shape[0], axis=0)
        s[:, :per_block] = 0
        s[:, vary - vary_block * per_block] = codes
        s = _curlf_residues(s, m)
        for _ in range(vary_block + 1, nblocks):
            s[:, :per_block] = 0
            s = _curlf_residues(s, m)
        return s[:, :per_block]

    def materialize(code: np.ndarray) -> np.ndarray:
        frags = np.zeros(length // m, dtype=np.int8)
        frags[vary] = to_trits(code)
        msg = np.zeros(length, dtype=np.int8)
        msg[: frags.size * m] = fragment_expand(frags, m)
        return msg

    if nvary > 40:
        raise ValueError("too many free fragments to pack a message code")
    weights = (3 ** np.arange(nvary, dtype=np.uint64))[::-1]

    def unpack(code: int) -> np.ndarray:
        out = np.zeros(nvary, dtype=np.uint8)
        for k in range(nvary - 1, -1, -1):
            code, out[k] = divmod(code, 3)
        return out

    rng = np.random.default_rng(seed)
    seen_fp = np.empty(0, dtype=np.uint64)
    seen_code = np.empty(0, dtype=np.uint64)
    hashed = 0
    false_pos = 0
    while hashed < budget:
        b = min(batch_size, budget - hashed)
        rows = rng.integers(0, 3, size=(b, nvary), dtype=np.uint8)
        codes = rows.astype(np.uint64) @ weights
        fps = _fingerprint(digests(rows))
        hashed += b

        # candidate pairs (earlier code, later code), later ones in batch order
        candidates = []
        pos = np.searchsorted(seen_fp, fps)
        inside = pos < seen_fp.size
        hit = np.zeros(b, dtype=bool)
        hit[inside] = seen_fp[pos[inside]] == fps[inside]
        for i in np.nonzero(hit)[0]:
            candidates.append((int(i), int(seen_code[pos[i]]), int(codes[i])))
        order = np.argsort(fps, kind="stable")
        sfp = fps[order]
        same = np.nonzero(sfp[1:] == sfp[:-1])[0]
        first_of_run = np.ones(b, dtype=bool)
        first_of_run[1:] = sfp[1:] != sfp[:-1]
        run_start = np.maximum.accumulate(np.where(first_of_run, np.arange(b), 0))
        for d in same:
            i, j = int(order[run_start[d + 1]]), int(order[d + 1])
            candidates.append((j, int(codes[i]), int(codes[j])))
        for _, c1, c2 in sorted(candidates):
            if c1 == c2:
                continue  # same message drawn twice
            x, x2 = materialize(unpack(c1)), materialize(unpack(c2))
            if verify_collision(x, x2):
                log.info("collision after %d hashes", hashed)
                return CollisionResult(x, x2, hashed, false_pos)
            false_pos += 1

        # one representative per fingerprint keeps the table at O(budget)
        fresh = order[first_of_run & ~hit[order]]
        ins = np.searchsorted(seen_fp, fps[fresh])
        seen_fp = np.insert(seen_fp, ins, fps[fresh])
        seen_code = np.insert(seen_code, ins, codes[fresh])
    raise BudgetExhausted(f"no collision within {budget} hashes")


def parse_trit_line(line: str) -> np.ndarray:
    line = line.strip()
    if not line:
        return np.zeros(0, dtype=np.int8)
    vals = [int(tok) for tok in line.split(",")]
    arr = np.array(vals, dtype=np.int8)
    if arr.size and (arr.min() < -1 or arr.max() > 1):
        raise ValueError("trit values must be -1, 0 or 1")
    return arr


def format_trits(trits) -> str:
    return ",".join(str(int(t)) for t in np.asarray(trits).reshape(-1))
