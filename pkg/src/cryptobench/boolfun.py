"""Vectorial Boolean functions: involutions, APN checks and S-box metrics."""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .algebra import Gf2nField


@dataclass(frozen=True, eq=False)
class VectorialMap:
    """s: F_2^n -> F_2^n as a lookup table."""

    n: int
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        if t.shape != (1 << self.n,):
            raise ValueError(f"table must have 2^{self.n} entries")
        if t.size and (t.min() < 0 or t.max() >= 1 << self.n):
            raise ValueError(f"outputs must be {self.n}-bit values")
        object.__setattr__(self, "table", t)

    @classmethod
    def from_values(cls, values) -> "VectorialMap":
        values = list(values)
        n = len(values).bit_length() - 1
        if 1 << n != len(values):
            raise ValueError("table length must be a power of two")
        return cls(n, np.array(values))

    @classmethod
    def identity(cls, n: int) -> "VectorialMap":
        return cls(n, np.arange(1 << n))

    def __call__(self, x):
        return self.table[x]

    def __eq__(self, other):
        return isinstance(other, VectorialMap) and self.n == other.n \
            and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.n, self.table.tobytes()))

    def compose(self, other: "VectorialMap") -> "VectorialMap":
        """self o other."""
        return VectorialMap(self.n, self.table[other.table])

    def is_permutation(self) -> bool:
        return np.unique(self.table).size == self.table.size

    def is_involution(self) -> bool:
        return bool(np.array_equal(self.table[self.table], np.arange(1 << self.n)))


def power_map(field: Gf2nField, e: int) -> VectorialMap:
    return VectorialMap(field.n, np.array([field.pow(x, e) for x in range(field.order)]))


def inverse_map(field: Gf2nField) -> VectorialMap:
    """x -> x^-1 with 0 -> 0."""
    return power_map(field, field.order - 2)


def bit_permutation(n: int, perm) -> VectorialMap:
    """Linear map sending bit i to bit perm[i]."""
    x = np.arange(1 << n)
    out = np.zeros_like(x)
    for i, j in enumerate(perm):
        out |= ((x >> i) & 1) << j
    return VectorialMap(n, out)


# -- involutions -----------------------------------------------------------------

@dataclass
class InvolutionProfile:
    fixed_points: frozenset
    transpositions: list[tuple[int, int]]
    lambda_multiset: Counter
    b_multiset: Counter

    @property
    def lambda_set(self) -> frozenset:
        return frozenset(self.lambda_multiset)

    @property
    def b_set(self) -> frozenset:
        return frozenset(self.b_multiset)


class NotAnInvolution(ValueError):
    pass


def involution_profile(g: VectorialMap) -> InvolutionProfile:
    if not g.is_involution():
        raise NotAnInvolution("g o g is not the identity")
    t = g.table
    fixed = [int(x) for x in range(t.size) if t[x] == x]
    pairs = [(int(x), int(t[x])) for x in range(t.size) if x < t[x]]
    lam = Counter(a ^ b for a, b in pairs)
    bset = Counter(u ^ v for u, v in combinations(fixed, 2))
    return InvolutionProfile(frozenset(fixed), pairs, lam, bset)


def enumerate_involutions(size: int):
    """All involutive permutations of range(size), fixed points allowed."""
    def rec(perm, free):
        if not free:
            yield tuple(perm)
            return
        i, rest = free[0], free[1:]
        perm[i] = i
        yield from rec(perm, rest)
        for k, j in enumerate(rest):
            perm[i], perm[j] = j, i
            yield from rec(perm, rest[:k] + rest[k + 1:])
            perm[j] = j
        perm[i] = i

    yield from rec(list(range(size)), list(range(size)))


# -- differential properties -------------------------------------------------------

def difference_count(g: VectorialMap, a: int, b: int) -> int:
    return sum(1 for x in range(1 << g.n) if g.table[x ^ a] ^ g.table[x] == b)


def ddt(g: VectorialMap) -> np.ndarray:
    """Difference distribution table, ddt[a, b] = d_{a,b}(g)."""
    q = 1 << g.n
    x = np.arange(q)
    diffs = g.table[x[None, :] ^ x[:, None]] ^ g.table[None, :]
    out = np.zeros((q, q), dtype=np.int64)
    np.add.at(out, (np.repeat(x, q), diffs.ravel()), 1)
    return out


def differential_uniformity(g: VectorialMap) -> int:
    return int(ddt(g)[1:].max())


def is_apn(g: VectorialMap) -> bool:
    return differential_uniformity(g) <= 2


class PreconditionError(ValueError):
    pass


def fixed_point_bound_check(g: VectorialMap) -> bool:
    """|FixP(g)| <= 1 + sqrt(2^(n-1) - 1) and B(g), Lambda(g) disjoint."""
    if not g.is_involution() or not is_apn(g):
        raise PreconditionError("expected an APN involution")
    prof = involution_profile(g)
    bound = 1 + math.sqrt((1 << (g.n - 1)) - 1)
    return len(prof.fixed_points) <= bound and not (prof.b_set & prof.lambda_set)


def enumerate_apn_involutions(n: int) -> list[VectorialMap]:
    """Every APN involution of F_2^n for n in {2, 3}."""
    if n not in (2, 3):
        raise ValueError("enumeration is only supported for n = 2, 3")
    out = []
    for perm in enumerate_involutions(1 << n):
        g = VectorialMap(n, np.array(perm))
        if is_apn(g):
            out.append(g)
    return out


# -- S-box metrics -----------------------------------------------------------------

@dataclass(frozen=True)
class SboxMetrics:
    deg: int
    nl: int
    du: int
    ai: int

    def astuple(self):
        return self.deg, self.nl, self.du, self.ai


def _component_bits(s: VectorialMap) -> np.ndarray:
    """Truth tables of the 2^n - 1 nonzero components b.s, shape (2^n-1, 2^n)."""
    q = 1 << s.n
    masks = np.arange(1, q)
    vals = masks[:, None] & s.table[None, :]
    parity = np.zeros_like(vals)
    for i in range(s.n):
        parity ^= (vals >> i) & 1
    return parity


def mobius(tt: np.ndarray) -> np.ndarray:
    """ANF coefficients of truth tables along the last axis."""
    a = tt.copy()
    size = a.shape[-1]
    h = 1
    while h < size:
        a = a.reshape(*a.shape[:-1], -1, 2, h)
        a[..., 1, :] ^= a[..., 0, :]
        a = a.reshape(*a.shape[:-3], size)
        h *= 2
    return a


def walsh(tt: np.ndarray) -> np.ndarray:
    """Walsh-Hadamard spectrum of (-1)^f along the last axis."""
    a = (1 - 2 * tt).astype(np.int64)
    size = a.shape[-1]
    h = 1
    while h < size:
        a = a.reshape(*a.shape[:-1], -1, 2, h)
        u, v = a[..., 0, :].copy(), a[..., 1, :].copy()
        a[..., 0, :], a[..., 1, :] = u + v, u - v
        a = a.reshape(*a.shape[:-3], size)
        h *= 2
    return a


def algebraic_degree(tt: np.ndarray) -> int:
    anf = mobius(np.asarray(tt))
    weights = np.array([bin(u).count("1") for u in range(anf.shape[-1])])
    nz = weights[anf.astype(bool)]
    return int(nz.max()) if nz.size else 0


def min_component_degree(s: VectorialMap) -> int:
    anf = mobius(_component_bits(s))
    weights = np.array([bin(u).count("1") for u in range(1 << s.n)])
    degs = np.where(anf.astype(bool), weights[None, :], 0).max(axis=1)
    return int(degs.min())


def nonlinearity(s: VectorialMap) -> int:
    w = walsh(_component_bits(s))
    return (1 << (s.n - 1)) - int(np.abs(w).max()) // 2


def gf2_rank(rows) -> int:
    """Rank over GF(2) of vectors given as Python ints."""
    basis = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top not in basis:
                basis[top] = r
                break
            r ^= basis[top]
    return len(basis)


def graded_lex_monomials(nvars: int, d: int):
    """Variable-index tuples of degree <= d, by degree then lexicographically."""
    for k in range(d + 1):
        yield from combinations(range(nvars), k)


def _graph_points(s: VectorialMap) -> np.ndarray:
    """(2^n, 2n) bit matrix of (x, s(x))."""
    x = np.arange(1 << s.n)
    cols = [(x >> i) & 1 for i in range(s.n)] + [(s.table >> i) & 1 for i in range(s.n)]
    return np.stack(cols, axis=1).astype(bool)


def graph_algebraic_immunity(s: VectorialMap) -> int:
    """Smallest d with a nonzero degree-<=d annihilator of the graph of s."""
    pts = _graph_points(s)
    weights = 1 << np.arange(pts.shape[0], dtype=object)
    nvars = 2 * s.n
    for d in range(1, nvars + 1):
        cols = []
        for mono in graded_lex_monomials(nvars, d):
            ev = pts[:, list(mono)].all(axis=1) if mono else np.ones(pts.shape[0], bool)
            cols.append(int(weights[ev].sum()))
        if gf2_rank(cols) < len(cols):
            return d
    return nvars


def sbox_metrics(s: VectorialMap) -> SboxMetrics:
    return SboxMetrics(min_component_degree(s), nonlinearity(s),
                       differential_uniformity(s), graph_algebraic_immunity(s))


# -- conjecture ----------------------------------------------------------------------

@dataclass
class ConjectureReport:
    n: int
    k: int
    delta_size: int
    expected: int
    counts: dict[tuple[int, int], int]

    @property
    def passed(self) -> bool:
        return all(c == self.expected for c in self.counts.values())

    @property
    def failures(self) -> list[tuple[int, int]]:
        return [p for p, c in self.counts.items() if c != self.expected]


def conjecture_delta(field: Gf2nField, k: int) -> np.ndarray:
    e = (4 ** k - 2 ** k + 1) % (field.order - 1) or field.order - 1
    F = [field.pow(b, e) for b in range(field.order)]
    return np.array(sorted({F[b] ^ F[b ^ 1] ^ 1 for b in range(field.order)}))


def _count_for_v1(args):
    n, modulus, k, v1 = args
    field = Gf2nField(n, modulus)
    T = field.mul_table()
    delta = conjecture_delta(field, k)
    member = np.zeros(field.order, dtype=bool)
    member[delta] = True
    inv = np.zeros(field.order, dtype=np.int64)
    inv[1:] = [field.inv(int(v)) for v in range(1, field.order)]

    v2 = np.array([v for v in range(1, field.order) if v != v1])
    ax = T[v1, delta]                                   # (|D|,)
    by = T[v2[:, None], delta[None, :]]                 # (P, |D|)
    s = ax[None, :, None] ^ by[:, None, :]              # (P, |D|, |D|)
    z = T[inv[v1 ^ v2][:, None, None], s]
    counts = member[z].sum(axis=(1, 2))
    return {(v1, int(b)): int(c) for b, c in zip(v2, counts)}


def conjecture_verify(nn: int, k: int, workers: int = 1, max_n: int = 8) -> ConjectureReport:
    """Count solutions of v1 x + v2 y + (v1 + v2) z = 0 over Delta^3 for
    every ordered pair of distinct nonzero v1, v2."""
    if math.gcd(k, nn) != 1:
        raise ValueError(f"k = {k} is not coprime with n = {nn}")
    if nn > max_n:
        raise ValueError(f"n = {nn} exceeds the budget cap {max_n}")
    field = Gf2nField(nn)
    jobs = [(nn, field.modulus, k, v1) for v1 in range(1, field.order)]
    counts: dict[tuple[int, int], int] = {}
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            for part in ex.map(_count_for_v1, jobs):
                counts.update(part)
    else:
        for j in jobs:
            counts.update(_count_for_v1(j))
    delta = conjecture_delta(field, k)
    return ConjectureReport(nn, k, int(delta.size), 1 << (2 * nn - 3), dict(sorted(counts.items())))
