import pytest
from hypothesis import given, settings, strategies as st

from cryptobench import bundle
from cryptobench.slpvm import (F2019, InvalidProgram, horner, load_program, parse_program,
                               parse_target, run, validate, verify_equivalence)


def f(y):
    return (y ** 5 + 1909 * y ** 3 + 401 * y) % 2019


@pytest.mark.parametrize("name,policy,length", [("table6", "broken", 9), ("table7", "calc", 14),
                                                ("table8", "calc", 11)])
def test_reference_programs(name, policy, length):
    p = load_program(bundle.path(name))
    assert p.policy == policy and len(p) == length
    assert validate(p).valid
    assert verify_equivalence(p, F2019) == (True, None)
    assert all(run(p, y) == f(y) for y in range(0, 2019, 37))


def test_printed_table7_is_not_f():
    p = load_program(bundle.path("table7-printed"))
    assert validate(p).valid
    ok, y = verify_equivalence(p, F2019)
    assert not ok and run(p, y) != f(y)


def test_table8_fails_broken_policy():
    rep = validate(load_program(bundle.path("table8")), "broken")
    assert not rep.valid and {i for i, _ in rep.violations} == {3, 4}


def test_validation_errors():
    p = parse_program("S1 = y\nS2 = 3\n")
    rep = validate(p)
    assert [i for i, _ in rep.violations] == [2]
    p = parse_program("S1 = y\nS2 = S1 * S1\nS3 = 5\nS4 = S2 - S3\nS5 = S5 - S1\n")
    rep = validate(p)
    assert [i for i, _ in rep.violations] == [5]
    rep = validate(parse_program("S1 = 5\n"))
    assert not rep.valid
    rep = validate(parse_program("S1 = y\nS2 = 15515\n"))
    assert not rep.valid  # five digits
    with pytest.raises(InvalidProgram):
        run(parse_program("S1 = y\nS2 = 3\n"), 1)


def test_parse_errors():
    with pytest.raises(ValueError):
        parse_program("S1 = y\nS3 = 5\n")
    with pytest.raises(ValueError):
        parse_program("S1 = y + 1\n")
    p = parse_program("  S1=y\nS2   =  S1*S1 # square\n")
    assert len(p) == 2


def test_run_examples():
    calc = load_program(bundle.path("example-calc"))
    assert run(calc, 3) == 5
    assert run(parse_program("S1 = y\nS2 = 2222\n", "calc"), 0) == 203
    p = parse_program("S1 = y\nS2 = 2500\n")
    assert run(p, 0, permissive=True) == 481
    with pytest.raises(InvalidProgram):
        run(p, 0)
    broken = load_program(bundle.path("example-broken"))
    assert run(broken, 10) == (100 - 55) % 2019
    assert run(parse_program("S1 = y\nS2 = 11\nS3 = S2 - S1\n"), 1011) == (11 - 1011) % 2019


def test_parse_target():
    assert parse_target("f2019") == F2019
    assert parse_target("1,0,-4") == (1, 0, -4)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-3000, 3000), min_size=1, max_size=6))
def test_verify_equivalence_agrees_with_horner(coeffs):
    p = load_program(bundle.path("example-calc"))  # y^2 - 4
    want = all(run(p, y) == horner(coeffs, y) for y in range(2019))
    assert verify_equivalence(p, coeffs)[0] == want
    assert verify_equivalence(p, (1, 0, -4))[0]
