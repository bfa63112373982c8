import numpy as np
import pytest

from cryptobench.twinpeaks import (CONTEST_CIPHERTEXT, CONTEST_PLAINTEXT_TEXT, ROUNDS, Block128,
                                   KeyedFunction, Oracle, QueryBudgetExceeded, apply_rounds,
                                   blocks_from_hex, blocks_to_hex, forward_round, invert_round,
                                   recover_f_value, slide_attack_decrypt, zero_function)


def _scalar(F, a, b, c):
    return int(F(np.uint32(a), np.uint32(b), np.uint32(c)))


def _encrypt_ref(F1, F2, x):
    """Scalar round-by-round encryption, the oracle for the vectorized path."""
    s = Block128(*x)
    for r in range(1, ROUNDS + 1):
        F = F1 if r % 2 else F2
        s = forward_round(s, _scalar(F, s.b, s.c, s.d))
    return s


@pytest.fixture
def oracle():
    return Oracle.from_seed(7)


def test_hex_roundtrip():
    b = Block128.from_hex(CONTEST_CIPHERTEXT)
    assert b.a == 0xE473F19A
    assert b.hex() == CONTEST_CIPHERTEXT
    arr = blocks_from_hex(CONTEST_CIPHERTEXT * 3)
    assert arr.shape == (3, 4) and blocks_to_hex(arr) == CONTEST_CIPHERTEXT * 3
    assert len(CONTEST_PLAINTEXT_TEXT.encode()) == 16


def test_zero_functions_give_identity():
    o = Oracle(zero_function, zero_function)
    x = np.random.default_rng(0).integers(0, 1 << 32, size=(10, 4), dtype=np.uint64).astype(np.uint32)
    assert np.array_equal(o.encrypt(x), x)
    assert np.array_equal(o.incomplete_decrypt(x), x)


def test_vectorized_matches_scalar_reference(oracle):
    rng = np.random.default_rng(1)
    for _ in range(5):
        x = tuple(int(v) for v in rng.integers(0, 1 << 32, size=4))
        assert oracle.encrypt(Block128(*x)) == _encrypt_ref(oracle._f1, oracle._f2, x)


def test_equal_functions_make_decrypt_equal_encrypt():
    F = KeyedFunction(b"same")
    o = Oracle(F, F)
    x = np.random.default_rng(2).integers(0, 1 << 32, size=(20, 4), dtype=np.uint64).astype(np.uint32)
    assert np.array_equal(o.encrypt(x), o.incomplete_decrypt(x))


def test_slide_relations(oracle):
    """I o g1 = g1 o E and E o g2 = g2 o I on random blocks."""
    rng = np.random.default_rng(3)
    x = rng.integers(0, 1 << 32, size=(1000, 4), dtype=np.uint64).astype(np.uint32)
    g1 = lambda v: apply_rounds(v, [oracle._f1])
    g2 = lambda v: apply_rounds(v, [oracle._f2])
    assert np.array_equal(oracle.incomplete_decrypt(g1(x)), g1(oracle.encrypt(x)))
    assert np.array_equal(oracle.encrypt(g2(x)), g2(oracle.incomplete_decrypt(x)))


def test_invert_round():
    rng = np.random.default_rng(4)
    F = KeyedFunction(b"k")
    for _ in range(20):
        x = Block128(*(int(v) for v in rng.integers(0, 1 << 32, size=4)))
        y = forward_round(x, _scalar(F, x.b, x.c, x.d))
        assert invert_round(y, _scalar(F, y.a, y.b, y.c)) == x
    assert invert_round(Block128(1, 2, 3, 4), 0) == Block128(4, 1, 2, 3)


def test_peeling_with_known_values(oracle):
    x = Block128(1, 2, 3, 4)
    s = oracle.encrypt(x)
    for r in range(ROUNDS, 0, -1):
        F = oracle._f1 if r % 2 else oracle._f2
        s = invert_round(s, _scalar(F, s.a, s.b, s.c))
    assert s == x


def test_query_accounting(oracle):
    oracle.encrypt(np.zeros((10, 4), dtype=np.uint32))
    oracle.incomplete_decrypt(Block128(0, 0, 0, 0))
    oracle.encrypt_hex("00" * 48)
    assert (oracle.encrypt_calls, oracle.decrypt_calls, oracle.queries) == (13, 1, 14)


@pytest.mark.parametrize("which", [1, 2])
def test_recover_f_value(oracle, which):
    rng = np.random.default_rng(which)
    F = oracle._f1 if which == 1 else oracle._f2
    costs = []
    for _ in range(5):
        a, b, c = (int(v) for v in rng.integers(0, 1 << 32, size=3))
        before = oracle.queries
        assert recover_f_value(oracle, which, a, b, c, seed=rng) == _scalar(F, a, b, c)
        costs.append(oracle.queries - before)
    # expected about 2 * 2^16 per value; allow a factor of 4 either way on the mean
    assert 2 ** 15 <= np.mean(costs) <= 2 ** 19


def test_recover_budget_exceeded(oracle):
    with pytest.raises(QueryBudgetExceeded):
        recover_f_value(oracle, 1, 1, 2, 3, seed=0, budget=1 << 12, batch=1 << 10)
    with pytest.raises(ValueError):
        recover_f_value(oracle, 3, 1, 2, 3)


def test_slide_attack_decrypt_roundtrip():
    o = Oracle.from_seed(b"instance-one")
    p = Block128(0x61636865, 0x72727970, 0x69657065, 0x61736521)
    y = o.encrypt(p)
    base = o.queries
    got, stats = slide_attack_decrypt(o, y, seed=11)
    assert got == p
    assert stats.values_recovered == 32
    assert stats.queries == o.queries - base
    assert 2 ** 20 <= stats.queries <= 2 ** 24


@pytest.mark.long
def test_slide_attack_many_plaintexts():
    rng = np.random.default_rng(99)
    for inst in range(3):
        o = Oracle.from_seed(rng.bytes(16))
        for _ in range(3):
            p = Block128(*(int(v) for v in rng.integers(0, 1 << 32, size=4)))
            assert slide_attack_decrypt(o, o.encrypt(p), seed=rng)[0] == p
