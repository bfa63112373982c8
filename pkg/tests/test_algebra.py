import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import GF, Poly, symbols

from cryptobench.algebra import (DEFAULT_MODULI, Gf2nField, balanced_decode, balanced_encode,
                                 dickson_eval, gf_pow, int_sqrt_exact, is_irreducible)

X = symbols("X")


def _poly(mask):
    return Poly([(mask >> i) & 1 for i in range(mask.bit_length() - 1, -1, -1)] or [0], X, domain=GF(2))


def _mask(p):
    return sum(int(c) % 2 << i for i, c in enumerate(reversed(p.all_coeffs())))


@pytest.mark.parametrize("n", sorted(DEFAULT_MODULI))
def test_default_moduli_irreducible_per_sympy(n):
    assert _poly(DEFAULT_MODULI[n]).is_irreducible
    assert is_irreducible(DEFAULT_MODULI[n])


def test_reducible_modulus_rejected():
    assert not is_irreducible(0b1111)  # X^3 + X^2 + X + 1 = (X+1)^3
    assert is_irreducible(0b1101)
    with pytest.raises(ValueError):
        Gf2nField(3, 0b1001)  # X^3 + 1


def test_gf_pow_examples():
    F = Gf2nField(3)
    assert F.modulus == 0b1011
    assert gf_pow(F, 0b010, 3) == 0b011  # X^3 = X + 1
    assert all(gf_pow(F, b, 7) == 1 for b in range(1, 8))
    assert all(gf_pow(F, b, 1) == b for b in range(8))
    assert gf_pow(F, 0, 0) == 1
    with pytest.raises(ValueError):
        gf_pow(F, 8, 2)


@pytest.mark.parametrize("n", [3, 4, 5, 8])
def test_mul_matches_sympy_reduction(n):
    F = Gf2nField(n)
    rng = np.random.default_rng(n)
    mod = _poly(F.modulus)
    for a, b in rng.integers(0, F.order, size=(50, 2)):
        want = _mask((_poly(int(a)) * _poly(int(b))).rem(mod))
        assert F.mul(int(a), int(b)) == want


@pytest.mark.parametrize("n", range(3, 9))
def test_field_axioms_sampled(n):
    F = Gf2nField(n)
    T = F.mul_table()
    rng = np.random.default_rng(100 + n)
    a, b, c = rng.integers(0, F.order, size=(3, 10_000))
    assert np.array_equal(T[a, b], T[b, a])
    assert np.array_equal(T[T[a, b], c], T[a, T[b, c]])
    assert np.array_equal(T[a, b ^ c], T[a, b] ^ T[a, c])
    for x in range(1, F.order):
        assert F.mul(x, F.inv(x)) == 1


def test_balanced_encode_examples():
    assert balanced_encode(25) == [1, -1, 0, 1]
    assert balanced_encode(0) == []
    assert balanced_encode(1) == [1]
    assert balanced_encode(9841) == [1] * 9
    with pytest.raises(ValueError):
        balanced_encode(-1)


@given(st.integers(0, 3 ** 20 - 1))
def test_balanced_roundtrip(v):
    enc = balanced_encode(v)
    assert balanced_decode(enc) == v
    assert set(enc) <= {-1, 0, 1}
    assert not enc or enc[-1] != 0


def test_dickson_examples():
    f = lambda y: (y ** 5 + 1909 * y ** 3 + 401 * y) % 2019
    assert all(dickson_eval(1, y, 5) == y for y in range(50))
    assert all(dickson_eval(5, y, 22) == f(y) for y in range(2019))
    assert dickson_eval(5, 7, 22) == f(7)
    # closed form y^5 - 5 a y^3 + 5 a^2 y
    assert all(dickson_eval(5, y, 22) == (y ** 5 - 110 * y ** 3 + 5 * 484 * y) % 2019 for y in range(2019))


def test_dickson_composition():
    a = 22
    for y in range(2019):
        assert dickson_eval(4, y, a) == dickson_eval(2, dickson_eval(2, y, a), pow(a, 2, 2019))


def test_int_sqrt_exact():
    assert int_sqrt_exact(144) == 12
    assert int_sqrt_exact(145) is None
    assert int_sqrt_exact(0) == 0
    assert int_sqrt_exact(-4) is None
    big = 3 ** 1000
    assert int_sqrt_exact(big * big) == big
    assert int_sqrt_exact(big * big + 1) is None
