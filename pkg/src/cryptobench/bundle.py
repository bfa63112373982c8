"""Bundled challenge vectors.

Files live in the package ``data`` directory unless ``CRYPTOBENCH_DATA``
points elsewhere. ``bundled:<name>`` strings used on the command line map to
the entries of ``ASSETS``.
"""

from __future__ import annotations

import hashlib
import json
import os
from importlib import resources
from pathlib import Path

import numpy as np

ENV_VAR = "CRYPTOBENCH_DATA"

ASSETS = {
    "collision": "curl27_collision.txt",
    "twinpeaks": "twinpeaks_contest.txt",
    "rotor": "rotor_ciphertext.txt",
    "rotor-tables": "rotor_tables.json",
    "qam1": "qam_part1.hex",
    "qam2": "qam_part2.hex",
    "qam-table4": "qam_table4.json",
    "qam-keys": "qam_keys.json",
    "qam-plaintext": "qam_plaintext.txt",
    "factoring2019": "factoring2019.txt",
    "factoring2019-solution": "factoring2019_solution.txt",
    "table6": "slp_table6.txt",
    "table7": "slp_table7.txt",
    "table7-printed": "slp_table7_printed.txt",
    "table8": "slp_table8.txt",
    "example-broken": "slp_example_broken.txt",
    "example-calc": "slp_example_calc.txt",
    "aes": "aes_sbox.txt",
}

CHECKSUM_FILE = "checksums.json"


def data_dir() -> Path:
    override = os.environ.get(ENV_VAR)
    if override:
        return Path(override)
    return Path(str(resources.files("cryptobench") / "data"))


def path(name: str) -> Path:
    if name.startswith("bundled:"):
        name = name[len("bundled:"):]
    if name not in ASSETS:
        raise KeyError(f"unknown bundled asset {name!r}")
    return data_dir() / ASSETS[name]


def resolve(arg: str) -> Path:
    """A command-line file argument: either ``bundled:<name>`` or a path."""
    return path(arg) if arg.startswith("bundled:") else Path(arg)


def read_text(name: str) -> str:
    return path(name).read_text()


def content_lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def sha256(p: Path) -> str:
    return hashlib.sha256(p.read_bytes()).hexdigest()


def compute_checksums() -> dict[str, str]:
    return {fname: sha256(data_dir() / fname) for fname in sorted(set(ASSETS.values()))}


def stored_checksums() -> dict[str, str]:
    return json.loads((data_dir() / CHECKSUM_FILE).read_text())


def verify_checksums() -> list[str]:
    """Names of files whose digest differs from the stored manifest."""
    stored = stored_checksums()
    return [f for f, digest in compute_checksums().items() if stored.get(f) != digest]


# -- typed loaders -----------------------------------------------------------

def _message_from_line(line: str) -> np.ndarray:
    from .curl27 import WORD, fragment_expand, parse_trit_line

    parts = line.split()
    if len(parts) == 4 and "," not in line:
        blocks, digits, m, tail = parts
        frag = fragment_expand([int(ch) for ch in digits], int(m))
        return np.concatenate([np.zeros(WORD * int(blocks), dtype=np.int8), frag,
                               np.zeros(int(tail), dtype=np.int8)])
    return parse_trit_line(line)


def load_messages(p: Path) -> list[np.ndarray]:
    """Trit messages, one per line: comma-separated trits, or the compact
    form ``<zero blocks> <fragment digits> <m> <trailing zeros>``."""
    return [_message_from_line(line) for line in content_lines(Path(p).read_text())]


def load_collision(p: Path | None = None) -> tuple[np.ndarray, np.ndarray]:
    msgs = load_messages(p or path("collision"))
    if len(msgs) != 2:
        raise ValueError("collision file must hold two messages")
    return msgs[0], msgs[1]


def load_factoring(p: Path | None = None) -> tuple[int, int]:
    n, h = (int(v) for v in content_lines((p or path("factoring2019")).read_text())[:2])
    return n, h


def load_factoring_solution() -> tuple[int, int]:
    p, q = (int(v) for v in content_lines(read_text("factoring2019-solution"))[:2])
    return p, q


def load_sbox(p: Path) -> list[int]:
    """Value table as whitespace- or comma-separated decimal or 0x-hex ints; # starts a comment."""
    vals = []
    for line in content_lines(Path(p).read_text()):
        vals.extend(int(tok, 16) if tok.lower().startswith("0x") else int(tok)
                    for tok in line.split("#")[0].replace(",", " ").split())
    return vals


def load_json(name: str):
    return json.loads(read_text(name))
