"""Non-complete sharings of maps of F_2^4.

Share vectors are 4-bit ints; the sum of shares is XOR. For up to three
shares a component is a lookup table of shape (16,) * n indexed by the
shares, for four shares it is a vectorized callable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .boolfun import VectorialMap, algebraic_degree, mobius

WIDTH = 4
Q = 1 << WIDTH
SAMPLES = 100_000


@dataclass
class SharedFunction:
    n: int
    components: list  # np.ndarray of shape (16,)*n, or callables

    def __post_init__(self):
        if len(self.components) != self.n:
            raise ValueError("need one component per share")
        for c in self.components:
            if isinstance(c, np.ndarray) and c.shape != (Q,) * self.n:
                raise ValueError(f"lookup component must have shape {(Q,) * self.n}")

    @property
    def tabulated(self) -> bool:
        return all(isinstance(c, np.ndarray) for c in self.components)

    def evaluate(self, i: int, shares: Sequence[np.ndarray]) -> np.ndarray:
        c = self.components[i]
        if isinstance(c, np.ndarray):
            return c[tuple(shares)]
        return np.asarray(c(*shares))

    def tables(self) -> list[np.ndarray]:
        if self.tabulated:
            return self.components
        grid = _grid(self.n)
        return [self.evaluate(i, grid) for i in range(self.n)]

    def dumps(self) -> str:
        return json.dumps({"n": self.n, "components": [t.ravel().tolist() for t in self.tables()]})

    @classmethod
    def loads(cls, text: str) -> "SharedFunction":
        d = json.loads(text)
        n = int(d["n"])
        return cls(n, [np.array(c, dtype=np.int64).reshape((Q,) * n) for c in d["components"]])


def _grid(n: int) -> list[np.ndarray]:
    return list(np.meshgrid(*([np.arange(Q)] * n), indexing="ij"))


def _xor_all(xs):
    acc = np.zeros_like(xs[0])
    for x in xs:
        acc = acc ^ x
    return acc


def is_sharing(F: SharedFunction, f: VectorialMap, seed=0) -> bool:
    """sum_i F_i(x) == f(sum_i x_i).

    Exhaustive for n <= 3. For n >= 4 it checks SAMPLES random share tuples,
    so a True answer there is evidence, not proof.
    """
    if f.n != WIDTH:
        raise ValueError("f must be a map of F_2^4")
    if F.n <= 3:
        xs = _grid(F.n)
    else:
        rng = np.random.default_rng(seed)
        xs = list(rng.integers(0, Q, size=(F.n, SAMPLES)))
    lhs = _xor_all([F.evaluate(i, xs) for i in range(F.n)])
    return bool(np.array_equal(lhs, f.table[_xor_all(xs)]))


def is_noncomplete(F: SharedFunction, seed=0) -> bool:
    """Component i does not depend on share i."""
    if F.n <= 3:
        for i, t in enumerate(F.tables()):
            if not np.all(t == t.take([0], axis=i)):
                return False
        return True
    rng = np.random.default_rng(seed)
    xs = list(rng.integers(0, Q, size=(F.n, SAMPLES)))
    for i in range(F.n):
        ref = F.evaluate(i, xs)
        for v in range(Q):
            ys = list(xs)
            ys[i] = np.full(SAMPLES, v)
            if not np.array_equal(F.evaluate(i, ys), ref):
                return False
    return True


def is_invertible(F: SharedFunction) -> bool:
    """Is F a bijection of (F_2^4)^n? Needs a tabulated F."""
    tabs = F.tables()
    packed = np.zeros_like(tabs[0])
    for t in tabs:
        packed = (packed << WIDTH) | t
    return np.unique(packed).size == packed.size


# -- affine maps ----------------------------------------------------------------------

def _matvec(M: np.ndarray, x):
    x = np.asarray(x)
    out = np.zeros_like(x)
    for r in range(WIDTH):
        bit = np.zeros_like(x)
        for c in range(WIDTH):
            if M[r, c]:
                bit ^= (x >> c) & 1
        out |= bit << r
    return out


def gf2_matrix_rank(M: np.ndarray) -> int:
    M = (np.asarray(M) & 1).astype(np.uint8).copy()
    rank = 0
    for c in range(M.shape[1]):
        piv = next((r for r in range(rank, M.shape[0]) if M[r, c]), None)
        if piv is None:
            continue
        M[[rank, piv]] = M[[piv, rank]]
        for r in range(M.shape[0]):
            if r != rank and M[r, c]:
                M[r] ^= M[rank]
        rank += 1
    return rank


@dataclass(frozen=True, eq=False)
class AffinePermutation:
    """x -> A x + a'. Bit c of x is coordinate c."""

    matrix: np.ndarray
    offset: int = 0

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=np.uint8)
        if M.shape != (WIDTH, WIDTH):
            raise ValueError("matrix must be 4x4")
        if gf2_matrix_rank(M) != WIDTH:
            raise ValueError("matrix is not invertible over GF(2)")
        if not 0 <= self.offset < Q:
            raise ValueError("offset must be a 4-bit vector")
        object.__setattr__(self, "matrix", M)

    @classmethod
    def identity(cls) -> "AffinePermutation":
        return cls(np.eye(WIDTH, dtype=np.uint8), 0)

    @classmethod
    def random(cls, rng) -> "AffinePermutation":
        while True:
            M = rng.integers(0, 2, size=(WIDTH, WIDTH))
            if gf2_matrix_rank(M) == WIDTH:
                return cls(M, int(rng.integers(0, Q)))

    def linear(self, x):
        return _matvec(self.matrix, x)

    def __call__(self, x):
        return self.linear(x) ^ self.offset

    def as_map(self) -> VectorialMap:
        return VectorialMap(WIDTH, self(np.arange(Q)))

    def dumps(self) -> str:
        return json.dumps({"matrix": self.matrix.tolist(), "offset": self.offset})

    @classmethod
    def loads(cls, text: str) -> "AffinePermutation":
        d = json.loads(text)
        return cls(np.array(d["matrix"]), int(d.get("offset", 0)))


def transport_affine(F: SharedFunction, a: AffinePermutation, b: AffinePermutation) -> SharedFunction:
    """Sharing of b o f o a from a sharing F of f; the offsets go on share 1."""
    def component(j: int) -> Callable:
        def G(*xs):
            ys = [a.linear(x) for x in xs]
            ys[0] = ys[0] ^ a.offset
            out = b.linear(F.evaluate(j, ys))
            return out ^ b.offset if j == 0 else out
        return G

    G = SharedFunction(F.n, [component(j) for j in range(F.n)])
    if F.n <= 3:
        G = SharedFunction(F.n, G.tables())
    return G


# -- the three-share construction ---------------------------------------------------------

def hypercube_condition(f: VectorialMap, n: int = 3) -> bool:
    """XOR over sigma in F_2^n of f(sum of the x_i with sigma_i = 1) vanishes
    for every share tuple, i.e. every n-th order derivative of f is zero."""
    if f.n != WIDTH:
        raise ValueError("f must be a map of F_2^4")
    xs = _grid(n)
    acc = np.zeros_like(xs[0])
    for sigma in product((0, 1), repeat=n):
        acc ^= f.table[_xor_all([x for x, s in zip(xs, sigma) if s] or [np.zeros_like(xs[0])])]
    return not acc.any()


class ConditionFailed(ValueError):
    pass


def construct_n3(f: VectorialMap) -> SharedFunction:
    """F1 = g(x2) - g(x2+x3), F2 = g(x3) - g(x1+x3), F3 = g(x1) - g(x1+x2)
    with g = f - f(0); f(0) is added back on F1."""
    if not hypercube_condition(f, 3):
        raise ConditionFailed("f has a nonzero third-order derivative")
    c = int(f.table[0])
    g = f.table ^ c
    x1, x2, x3 = _grid(3)
    F1 = g[x2] ^ g[x2 ^ x3] ^ c
    F2 = g[x3] ^ g[x1 ^ x3]
    F3 = g[x1] ^ g[x1 ^ x2]
    return SharedFunction(3, [F1, F2, F3])


def trivial_sharing(f: VectorialMap, n: int = 3) -> SharedFunction:
    """F_1 = f(sum), the rest zero. A sharing, but not non-complete."""
    xs = _grid(n)
    zero = np.zeros_like(xs[0])
    return SharedFunction(n, [f.table[_xor_all(xs)]] + [zero.copy() for _ in range(n - 1)])


@dataclass
class ConstructionReport:
    sharing: bool
    noncomplete: bool
    invertible: bool


def construction_report(f: VectorialMap) -> tuple[SharedFunction, ConstructionReport]:
    F = construct_n3(f)
    return F, ConstructionReport(is_sharing(F, f), is_noncomplete(F), is_invertible(F))


# -- random test maps --------------------------------------------------------------------

def _triangular(rng, degree: int) -> np.ndarray:
    """y_i = x_i + q_i(x_0..x_{i-1}) with deg q_i <= degree; always bijective."""
    x = np.arange(Q)
    bits = [(x >> i) & 1 for i in range(WIDTH)]
    out = np.zeros_like(x)
    for i in range(WIDTH):
        y = bits[i].copy()
        for mask in range(1, 1 << i):
            if bin(mask).count("1") <= degree and rng.integers(0, 2):
                term = np.ones_like(x)
                for j in range(i):
                    if mask >> j & 1:
                        term &= bits[j]
                y ^= term
        if degree >= 3 and i == WIDTH - 1:
            y ^= bits[0] & bits[1] & bits[2]
        out |= y << i
    return out


def random_permutation_of_degree(rng, degree: int) -> VectorialMap:
    """b o T o a with T triangular; degree is exact for 2 and 3."""
    if degree not in (1, 2, 3):
        raise ValueError("degree must be 1, 2 or 3")
    while True:
        a, b = AffinePermutation.random(rng), AffinePermutation.random(rng)
        t = _triangular(rng, degree)
        f = VectorialMap(WIDTH, b(t[a(np.arange(Q))]))
        if map_degree(f) == degree:
            return f


def random_function(rng, max_degree: int) -> VectorialMap:
    """Random map of F_2^4 whose coordinates have random ANFs of degree <= max_degree."""
    weights = np.array([bin(u).count("1") for u in range(Q)])
    out = np.zeros(Q, dtype=np.int64)
    for i in range(WIDTH):
        anf = rng.integers(0, 2, size=Q) * (weights <= max_degree)
        out |= mobius(anf) << i
    return VectorialMap(WIDTH, out)


def map_degree(f: VectorialMap) -> int:
    return max(algebraic_degree((f.table >> i) & 1) for i in range(f.n))


def load_map(path: str | Path) -> VectorialMap:
    from .bundle import load_sbox

    return VectorialMap.from_values(load_sbox(Path(path)))
