"""Rotor machine and the 16QAM / Hamming(7,4) pipeline."""

from __future__ import annotations

import re
from collections import Counter

import numpy as np

ALPHABET = "OPRSTY"
ROTOR_ORDER = ["red", "white", "purple", "green", "yellow", "blue"]

# One substitution per rotor position, as (O, P, R, S, T, Y) images.
POSITION_TABLES = {
    "red": "TYSROP",
    "white": "RSOPYT",
    "purple": "YRPTSO",
    "green": "SRPOYT",
    "yellow": "STYOPR",
    "blue": "RTOYPS",
}


def check_tables(tables=POSITION_TABLES) -> None:
    """Each position must be a fixed-point-free involution (reflector)."""
    for colour, row in tables.items():
        m = dict(zip(ALPHABET, row))
        for ch in ALPHABET:
            if m[ch] == ch or m[m[ch]] != ch:
                raise ValueError(f"{colour} table is not a fixed-point-free involution")


def rotor_encrypt(key: str | int, text: str, order=ROTOR_ORDER, tables=POSITION_TABLES) -> str:
    """Letter t uses the table at position (key + t) mod 6."""
    start = order.index(key) if isinstance(key, str) else int(key)
    out = []
    for t, ch in enumerate(text):
        if ch not in ALPHABET:
            raise ValueError(f"invalid character {ch!r}")
        row = tables[order[(start + t) % len(order)]]
        out.append(row[ALPHABET.index(ch)])
    return "".join(out)


def rotor_bruteforce(ciphertext: str, order=ROTOR_ORDER, tables=POSITION_TABLES) -> list[tuple[str, str]]:
    # every position table is an involution, so decryption is encryption
    return [(k, rotor_encrypt(k, ciphertext, order, tables)) for k in order]


ROTOR_WORDS = frozenset("""
    POST TO TOP OOPS SORRY STOP ROTOR PORT SPOT POT POTS TOY TOYS TRY SPY STORY
    ROOT ROOTS TOO SO OR SORT SOY PRY TROY TOPS STOPS SPORT SPORTS ROSY ROT
    PROP PROPS POSY RYE TORT TORY TRYST POOR ROTORS TYPO TYPOS OPT OPTS
""".split())


def dictionary_coverage(text: str, words=ROTOR_WORDS, min_len: int = 2) -> float:
    """Fraction of characters covered by the best segmentation into words."""
    n = len(text)
    if n == 0:
        return 0.0
    best = [0] * (n + 1)
    for i in range(1, n + 1):
        best[i] = best[i - 1]
        for j in range(max(0, i - 8), i - min_len + 1):
            if text[j:i] in words:
                best[i] = max(best[i], best[j] + i - j)
    return best[n] / n


# -- Hamming(7,4) ------------------------------------------------------------

# Columns are 1..7 in binary, so a nonzero syndrome names the error position.
H = np.array([[0, 0, 0, 1, 1, 1, 1],
              [0, 1, 1, 0, 0, 1, 1],
              [1, 0, 1, 0, 1, 0, 1]], dtype=np.uint8)
G = np.array([[1, 1, 1, 0, 0, 0, 0],
              [1, 0, 0, 1, 1, 0, 0],
              [0, 1, 0, 1, 0, 1, 0],
              [1, 1, 0, 1, 0, 0, 1]], dtype=np.uint8)
DATA_POSITIONS = (3, 5, 6, 7)  # 1-based; identity columns of G


def _bits(word) -> np.ndarray:
    if isinstance(word, str):
        return np.array([int(c) for c in word], dtype=np.uint8)
    return np.asarray(word, dtype=np.uint8)


def hamming_encode(data) -> str:
    d = _bits(data)
    return "".join(map(str, (d @ G) % 2))


def hamming_decode(word) -> tuple[str, int]:
    """(data bits, corrected 1-based position or 0)."""
    w = _bits(word).copy()
    if w.size != 7:
        raise ValueError("codewords have 7 bits")
    s = (H @ w) % 2
    pos = int(s[0]) * 4 + int(s[1]) * 2 + int(s[2])
    if pos:
        w[pos - 1] ^= 1
    return "".join(str(w[i - 1]) for i in DATA_POSITIONS), pos


def hamming_correct(word) -> str:
    data, _ = hamming_decode(word)
    return hamming_encode(data)


_SUFFIX = re.compile(r"\(([01]+)\)_?2?$")


def hex_to_bits(text: str, drop_trailing: int = 0) -> str:
    """Hex digits expanded MSB-first; a trailing ``(bits)2`` annotation is appended
    as literal bits, then ``drop_trailing`` bits are removed."""
    text = "".join(text.split())
    extra = ""
    m = _SUFFIX.search(text)
    if m:
        extra = m.group(1)
        text = text[: m.start()]
    if not re.fullmatch(r"[0-9A-Fa-f]*", text):
        raise ValueError("invalid hex digit")
    if not 0 <= drop_trailing < 4:
        raise ValueError("drop_trailing must be in 0..3")
    bits = "".join(format(int(c, 16), "04b") for c in text) + extra
    if drop_trailing:
        bits = bits[:-drop_trailing]
    if len(bits) % 7:
        raise ValueError(f"{len(bits)} bits is not a whole number of 7-bit codewords")
    return bits


def split_codewords(bits: str, correct: bool = True) -> list[str]:
    words = [bits[i:i + 7] for i in range(0, len(bits), 7)]
    return [hamming_correct(w) for w in words] if correct else words


def codeword_frequencies(words) -> Counter:
    return Counter(words)


class UnmappedCodeword(KeyError):
    pass


def apply_substitution(words, key: dict[str, str]) -> str:
    out = []
    for w in words:
        if w not in key:
            raise UnmappedCodeword(w)
        out.append(key[w])
    return "".join(out)


def frequency_rank_key(words) -> dict[str, str]:
    """Codewords relabelled 0..F from most to least frequent (ties by first
    appearance)."""
    ranked = [w for w, _ in Counter(words).most_common()]
    return {w: "0123456789ABCDEF"[i] for i, w in enumerate(ranked)}


def interleave(consonants: str, others: str, layout: str) -> str:
    """Merge two symbol streams following a C/V layout string."""
    if layout.count("C") != len(consonants) or layout.count("V") != len(others):
        raise ValueError("layout does not match stream lengths")
    it_c, it_v = iter(consonants), iter(others)
    return "".join(next(it_c) if k == "C" else next(it_v) for k in layout)


# -- English scoring -----------------------------------------------------------

# Letter frequencies (percent) after Lewand, most to least common.
ENGLISH_FREQ = {
    "e": 12.702, "t": 9.056, "a": 8.167, "o": 7.507, "i": 6.966, "n": 6.749,
    "s": 6.327, "h": 6.094, "r": 5.987, "d": 4.253, "l": 4.025, "c": 2.782,
    "u": 2.758, "m": 2.406, "w": 2.360, "f": 2.228, "g": 2.015, "y": 1.974,
    "p": 1.929, "b": 1.492, "v": 0.978, "k": 0.772, "j": 0.153, "x": 0.150,
    "q": 0.095, "z": 0.074,
}
_REF = np.array([ENGLISH_FREQ[c] for c in "abcdefghijklmnopqrstuvwxyz"])
_REF = _REF / _REF.sum()


def score_english(text: str) -> float:
    """Chi-squared distance of the letter histogram from English; lower is
    closer. Uses proportions, so doubling the text leaves the score unchanged."""
    letters = [ord(c) - 97 for c in text.lower() if "a" <= c <= "z"]
    if not letters:
        return 0.0
    obs = np.bincount(letters, minlength=26) / len(letters)
    return float(((obs - _REF) ** 2 / _REF).sum())


# -- bundled pipeline ------------------------------------------------------------

def decode_part(part: int) -> list[str]:
    from . import bundle

    bits = hex_to_bits(bundle.read_text(f"qam{part}"))
    return split_codewords(bits)


def decode_plaintext(punctuation_as: str | None = "#") -> str:
    """Both parts decoded with the bundled keys and interleaved."""
    from . import bundle

    keys = bundle.load_json("qam-keys")
    consonants = apply_substitution(decode_part(1), keys["part1"])
    others = apply_substitution(decode_part(2), keys["part2"])
    if punctuation_as is not None:
        for g in keys["punctuation"]:
            others = others.replace(g, punctuation_as)
    return interleave(consonants, others, keys["layout"])
