import subprocess
import sys

import numpy as np
import pytest

from cryptobench.cli import main
from cryptobench.sharing import AffinePermutation, random_permutation_of_degree


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    fields = dict(line.split(": ", 1) for line in out.splitlines() if ": " in line)
    return code, fields, out


def test_curl27_verify_bundled(capsys):
    code, f, _ = run(capsys, "curl27", "verify", "bundled:collision")
    assert code == 0
    assert f["check.messages_differ"] == "pass" and f["check.digests_equal"] == "pass"


def test_factor_bundled(capsys):
    from cryptobench import bundle

    code, f, _ = run(capsys, "factor", "--instance", "bundled:factoring2019")
    p, q = bundle.load_factoring_solution()
    assert code == 0 and int(f["metric.p"]) == p and int(f["metric.q"]) == q


def test_slp_verify(capsys):
    code, f, _ = run(capsys, "slp", "verify", "bundled:table8")
    assert code == 0 and f["check.equivalent"] == "pass"
    code, f, _ = run(capsys, "slp", "verify", "bundled:table7-printed")
    assert code == 1 and f["metric.counterexample"] == "1"
    code, f, _ = run(capsys, "slp", "validate", "bundled:table8", "--policy", "broken")
    assert code == 1


def test_boolfun_metrics(capsys):
    code, f, _ = run(capsys, "boolfun", "metrics", "bundled:aes")
    assert code == 0
    assert (f["metric.deg"], f["metric.nl"], f["metric.du"], f["metric.ai"]) == ("7", "112", "4", "2")


def test_conjecture_cli(capsys):
    code, _, out = run(capsys, "boolfun", "conjecture", "--n", "4", "--k", "1")
    assert code == 0 and "fail" not in out


def test_protocol_and_puzzles(capsys):
    code, f, _ = run(capsys, "protocol", "sum", "--inputs", "5,7,8", "--price", "10", "--seed", "3")
    assert code == 0 and f["metric.total"] == "20" and f["metric.affordable"] == "true"
    code, f, _ = run(capsys, "puzzle", "repunit", "--modulus", "2019")
    assert code == 0 and f["metric.ones"] == "672"
    code, f, _ = run(capsys, "puzzle", "keyflip", "--demo")
    assert code == 0 and f["metric.demo.after"] == "1100110010001011"


def test_rotor_and_qam(capsys):
    code, f, _ = run(capsys, "rotor", "brute")
    assert code == 0 and f["metric.dictionary_keys"] == "yellow"
    code, _, out = run(capsys, "qam", "decode", "--part", "all")
    assert code == 0 and "lunar" in out


def test_sharing_pipeline(capsys, tmp_path):
    rng = np.random.default_rng(0)
    f = random_permutation_of_degree(rng, 2)
    fpath = tmp_path / "f.txt"
    fpath.write_text(" ".join(str(int(v)) for v in f.table))
    code, fl, _ = run(capsys, "sharing", "check", str(fpath), "--n", "3")
    assert code == 0 and fl["metric.degree"] == "2"
    Fpath = tmp_path / "F.json"
    code, fl, _ = run(capsys, "sharing", "construct", str(fpath), "--output", str(Fpath))
    assert code == 0 and Fpath.exists()
    for name in "ab":
        (tmp_path / f"{name}.json").write_text(AffinePermutation.random(rng).dumps())
    code, fl, _ = run(capsys, "sharing", "transport", str(Fpath), str(tmp_path / "a.json"),
                      str(tmp_path / "b.json"))
    assert code == 0 and fl["check.noncomplete"] == "pass"
    cubic = random_permutation_of_degree(rng, 3)
    fpath.write_text(" ".join(str(int(v)) for v in cubic.table))
    assert run(capsys, "sharing", "check", str(fpath))[0] == 1


def test_input_errors(capsys, tmp_path):
    assert run(capsys, "slp", "verify", str(tmp_path / "missing.txt"))[0] == 2
    assert run(capsys, "curl27", "verify", "bundled:nope")[0] == 2
    assert run(capsys, "protocol", "sum", "--inputs", "50,1", "--price", "10")[0] == 2
    assert run(capsys, "puzzle", "repunit", "--modulus", "10")[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("S1 = y\nS3 = 5\n")
    assert run(capsys, "slp", "validate", str(bad))[0] == 2


def test_unknown_subcommand():
    r = subprocess.run([sys.executable, "-m", "cryptobench", "nonsense"], capture_output=True, text=True)
    assert r.returncode == 2 and "invalid choice" in r.stderr


def test_global_flags_and_determinism(capsys):
    _, _, a = run(capsys, "--seed", "5", "puzzle", "keyflip", "--demo")
    _, _, b = run(capsys, "puzzle", "keyflip", "--demo", "--seed", "5")
    assert a == b and "input.seed: 5" in a
    _, _, c = run(capsys, "puzzle", "keyflip", "--demo", "--timings")
    assert "timing" in c
    assert "timing" not in b


def test_twinpeaks_oracle_file(capsys, tmp_path):
    req = tmp_path / "req.txt"
    req.write_text("E " + "00" * 16 + "\nD " + "00" * 16 + "\n")
    code, f, out = run(capsys, "twinpeaks", "oracle", "--listen-file", str(req))
    assert code == 0 and f["metric.requests"] == "2"
    assert sum(1 for line in out.splitlines() if len(line) == 32) == 2
