"""The acceptance suite: fourteen end-to-end criteria, one report line each.

Every criterion draws its randomness from ``default_rng([seed, number])``
so criteria are independent of each other and of execution order. Timings
are measured and thresholded, but only the verdicts enter the report.
"""

from __future__ import annotations

import math
import os
import random
import subprocess
import sys
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .report import FAIL, PASS, SKIP, Report

DEFAULT_SEED = 42


@dataclass
class Context:
    seed: int = DEFAULT_SEED
    long: bool = False
    workers: int = 1
    timings: dict = field(default_factory=dict)

    def rng(self, number: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, number])


@dataclass
class Outcome:
    status: str
    detail: str


def _ok(flag: bool, **facts) -> Outcome:
    detail = " ".join(f"{k}={_fmt(v)}" for k, v in facts.items())
    return Outcome(PASS if flag else FAIL, detail)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


class _Timer:
    def __init__(self, ctx: Context, key: str):
        self.ctx, self.key = ctx, key

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        self.ctx.timings[self.key] = self.elapsed


# -- criteria ---------------------------------------------------------------------------

def c01_curl_known_collision(ctx: Context) -> Outcome:
    from . import bundle
    from .curl27 import curl_hash

    x, x2 = bundle.load_collision()
    curl_hash(np.zeros(1, dtype=np.int8))  # compile / warm caches
    with _Timer(ctx, "c01") as t:
        h1, h2 = curl_hash(x), curl_hash(x2)
    equal = bool(np.array_equal(h1, h2)) and not np.array_equal(x, x2)
    return _ok(equal and h1.size == 243 and t.elapsed < 1.0,
               length=x.size, digest_trits=h1.size, equal=equal, under_1s=t.elapsed < 1.0)


def c02_curl_invariants(ctx: Context) -> Outcome:
    from .curl27 import STATE, WORD, curlf, is_expanded3, is_fragmented

    rng = ctx.rng(2)
    failures = 0
    for m in (3, 9, 27, 81, 243):
        states = np.repeat(rng.integers(-1, 2, size=(1000, STATE // m)), m, axis=1)
        out = curlf(states)
        failures += sum(not is_fragmented(row, m) for row in out)
    parts = np.tile(rng.integers(-1, 2, size=(1000, 3, 3)), (1, 1, 81)).reshape(1000, STATE)
    out = curlf(parts)
    failures += sum(not is_expanded3(row[k * WORD:(k + 1) * WORD]) for row in out for k in range(3))
    return _ok(failures == 0, states=6000, failures=failures)


def c03_curl_live_attack(ctx: Context) -> Outcome:
    if not ctx.long:
        return Outcome(SKIP, "requires --long")
    from .curl27 import BudgetExhausted, fragmentation_collision_attack, verify_collision

    budget = 8_000_000
    with _Timer(ctx, "c03") as t:
        try:
            res = fragmentation_collision_attack(m=9, budget=budget, seed=ctx.seed)
        except BudgetExhausted:
            return _ok(False, budget=budget, found=False)
    ok = verify_collision(res.x, res.x2)
    return _ok(ok and res.hashes <= budget and t.elapsed < 3600,
               m=9, verified=ok, hashes=res.hashes, within_budget=res.hashes <= budget,
               under_60min=t.elapsed < 3600)


def c04_twinpeaks_slide(ctx: Context) -> Outcome:
    from .twinpeaks import Block128, Oracle, slide_attack_decrypt

    rng = ctx.rng(4)
    runs = 5 if ctx.long else 1
    traffic, correct, fast = [], 0, True
    for r in range(runs):
        o = Oracle.from_seed(rng.bytes(16))
        p = Block128(*map(int, rng.integers(0, 1 << 32, size=4, dtype=np.uint64)))
        y = o.encrypt(p)
        base = o.queries
        with _Timer(ctx, f"c04.run{r}") as t:
            got, stats = slide_attack_decrypt(o, y, seed=rng.integers(1 << 63))
        correct += got == p
        traffic.append(o.queries - base)
        fast &= t.elapsed < 900
    mean = sum(traffic) / runs
    in_range = 2 ** 20 <= mean <= 2 ** 24
    return _ok(correct == runs and in_range and fast, instances=runs, decrypted=correct,
               mean_log2_blocks=f"{math.log2(mean):.2f}", traffic_in_range=in_range,
               under_15min=fast)


def c05_rotor(ctx: Context) -> Outcome:
    from . import bundle
    from .classical import dictionary_coverage, rotor_bruteforce

    ct = bundle.read_text("rotor").strip()
    hits = [(k, t) for k, t in rotor_bruteforce(ct) if dictionary_coverage(t) >= 0.9]
    ok = len(hits) == 1 and hits[0] == ("yellow", "POSTTOTOPOOPSSORRYSTOPROTOR")
    return _ok(ok, keys=6, dictionary_hits=len(hits), key=hits[0][0] if hits else "none",
               plaintext=hits[0][1] if hits else "none")


def c06_qam(ctx: Context) -> Outcome:
    from . import bundle
    from .classical import codeword_frequencies, decode_part, decode_plaintext

    table = bundle.load_json("qam-table4")
    rows_ok = 0
    for part in (1, 2):
        freq = codeword_frequencies(decode_part(part))
        rows = table[str(part)]
        rows_ok += sum(freq.get(cw, 0) == n for _, cw, n in rows)
        if set(freq) - {cw for _, cw, _ in rows}:
            rows_ok = -1  # a decoded codeword missing from the table
    text = decode_plaintext()
    expected = bundle.read_text("qam-plaintext").strip()
    ok_text = text == expected and text.startswith("these are the mores of the lunar inhabitants")
    return _ok(rows_ok == 32 and ok_text, table_rows_matched=max(rows_ok, 0), plaintext_match=ok_text)


def c07_slp(ctx: Context) -> Outcome:
    from . import bundle
    from .algebra import dickson_eval
    from .slpvm import F2019, horner, load_program, validate, verify_equivalence

    facts = {}
    ok = True
    for name in ("table6", "table7", "table8"):
        p = load_program(bundle.path(name))
        valid = validate(p).valid
        equal = valid and verify_equivalence(p, F2019)[0]
        facts[name] = f"{p.policy}/{len(p)}/{'ok' if equal else 'bad'}"
        ok &= equal
    dickson = all(dickson_eval(5, y, 22) == horner(F2019, y) for y in range(2019))
    return _ok(ok and dickson, **facts, dickson_d5_22=dickson)


def c08_factoring(ctx: Context) -> Outcome:
    from . import bundle
    from .lattice import FactoringInstance, NoFactorization, factor_with_hint, random_balanced_instance

    n, h = bundle.load_factoring()
    with _Timer(ctx, "c08") as t:
        got = factor_with_hint(FactoringInstance(n, h))
    known = got == bundle.load_factoring_solution()
    rnd = random.Random(ctx.seed * 1000 + 8)
    counts = {}
    for bits in (64, 128, 512):
        ok = 0
        for _ in range(50):
            p, q, inst = random_balanced_instance(bits, rnd)
            try:
                ok += factor_with_hint(inst) == (p, q)
            except NoFactorization:
                pass
        counts[f"bits{bits}"] = f"{ok}/50"
    synth = all(v == "50/50" for v in counts.values())
    return _ok(known and synth and t.elapsed < 60, bundled_pq=known, under_60s=t.elapsed < 60, **counts)


def c09_aes(ctx: Context) -> Outcome:
    from . import bundle
    from .boolfun import VectorialMap, sbox_metrics

    s = VectorialMap.from_values(bundle.load_sbox(bundle.path("aes")))
    got = sbox_metrics(s).astuple()
    return _ok(got == (7, 112, 4, 2), deg_nl_du_ai=",".join(map(str, got)))


def c10_apn_involutions(ctx: Context) -> Outcome:
    from .boolfun import ddt, enumerate_apn_involutions, fixed_point_bound_check, involution_profile

    m2, m3 = enumerate_apn_involutions(2), enumerate_apn_involutions(3)
    q1 = q2 = q3 = 0
    for g in m3:
        prof = involution_profile(g)
        mult1 = all(c == 1 for c in prof.lambda_multiset.values()) and \
            all(c == 1 for c in prof.b_multiset.values())
        q1 += mult1 and not (prof.lambda_set & prof.b_set)
        diag = np.diag(ddt(g))[1:]
        want = np.array([2 if a in prof.lambda_set | prof.b_set else 0 for a in range(1, 8)])
        q2 += bool(np.array_equal(diag, want))
        q3 += fixed_point_bound_check(g)
    ok = len(m2) == 0 and len(m3) == 224 and q1 == q2 == q3 == 224
    return _ok(ok, M2=len(m2), M3=len(m3), q1=q1, q2=q2, q3=q3)


CONJECTURE_CASES = ((3, 1), (3, 2), (4, 1), (4, 3), (5, 1), (5, 2), (6, 1))
CONJECTURE_LONG = ((7, 1), (8, 1))


def c11_conjecture(ctx: Context) -> Outcome:
    from .boolfun import conjecture_verify

    cases = CONJECTURE_CASES + (CONJECTURE_LONG if ctx.long else ())
    passed = []
    for n, k in cases:
        if conjecture_verify(n, k, workers=ctx.workers).passed:
            passed.append(f"({n},{k})")
    return _ok(len(passed) == len(cases), cases=len(cases), passed=len(passed),
               long_cases=ctx.long)


def c12_sharing(ctx: Context) -> Outcome:
    from .sharing import (AffinePermutation, construct_n3, hypercube_condition, is_noncomplete,
                          is_sharing, map_degree, random_function, random_permutation_of_degree,
                          transport_affine)

    rng = ctx.rng(12)
    built = transported = 0
    for _ in range(100):
        f = random_permutation_of_degree(rng, 2)
        F = construct_n3(f)
        built += is_sharing(F, f) and is_noncomplete(F)
        a, b = AffinePermutation.random(rng), AffinePermutation.random(rng)
        G = transport_affine(F, a, b)
        g = b.as_map().compose(f).compose(a.as_map())
        transported += is_sharing(G, g) and is_noncomplete(G)
    agree = 0
    for i in range(500):
        f = random_function(rng, 1 + i % 4)
        agree += hypercube_condition(f, 3) == (map_degree(f) <= 2)
    return _ok(built == 100 and transported == 100 and agree == 500,
               constructed=built, transported=transported, hypercube_agree=agree)


def c13_protocols(ctx: Context) -> Outcome:
    from .protocols import KeyState, legal_moves_exist, random_legal_step, repunit_multiple, secure_sum

    rng = ctx.rng(13)
    sums = 0
    for _ in range(50):
        n = int(rng.integers(2, 8))
        price = int(rng.integers(1, 10 ** 6))
        xs = [int(v) for v in rng.integers(0, price, size=n)]
        total, affordable, _ = secure_sum(xs, price, seed=int(rng.integers(1 << 63)))
        sums += total == sum(xs) and affordable == (sum(xs) >= price)
    k = KeyState.random(rng)
    monotone = 0
    for _ in range(10_000):
        if not legal_moves_exist(k):
            k = KeyState.random(rng)
        k2 = random_legal_step(k, rng)
        monotone += k2.value() > k.value()
        k = k2
    a, _ = repunit_multiple(2019)
    minimal = int("1" * a) % 2019 == 0 and all(int("1" * b) % 2019 for b in range(1, a))
    return _ok(sums == 50 and monotone == 10_000 and minimal,
               secure_sum=f"{sums}/50", keyflip_monotone=f"{monotone}/10000", repunit_a=a,
               repunit_minimal=minimal)


def c14_determinism(ctx: Context, first: list[str] | None = None) -> Outcome:
    """Re-run the suite in a fresh interpreter and compare the lines."""
    cmd = [sys.executable, "-m", "cryptobench", "acceptance", "--seed", str(ctx.seed),
           "--workers", "1", "--no-determinism-check"]
    proc = subprocess.run(cmd, capture_output=True, text=True, env=os.environ.copy())
    def criteria(lines):
        return [ln for ln in lines if ln.startswith("check.c") and not ln.startswith("check.c14")]

    other = criteria(proc.stdout.splitlines())
    mine = criteria(first or [])
    if ctx.long:
        # the fresh run is a short one; compare the criteria both ran in full
        keep = ("check.c01", "check.c02", "check.c05", "check.c06", "check.c07", "check.c08",
                "check.c09", "check.c10", "check.c12", "check.c13")
        other = [ln for ln in other if ln.startswith(keep)]
        mine = [ln for ln in mine if ln.startswith(keep)]
    same = bool(other) and other == mine
    return _ok(same, compared_lines=len(mine), identical=same)


CRITERIA: list[tuple[str, Callable[[Context], Outcome]]] = [
    ("c01_curl27_known_collision", c01_curl_known_collision),
    ("c02_curl27_invariants", c02_curl_invariants),
    ("c03_curl27_live_attack", c03_curl_live_attack),
    ("c04_twinpeaks_slide_attack", c04_twinpeaks_slide),
    ("c05_rotor_bruteforce", c05_rotor),
    ("c06_qam_decode", c06_qam),
    ("c07_slp_programs", c07_slp),
    ("c08_factoring", c08_factoring),
    ("c09_aes_sbox_metrics", c09_aes),
    ("c10_apn_involutions", c10_apn_involutions),
    ("c11_conjecture", c11_conjecture),
    ("c12_sharing", c12_sharing),
    ("c13_protocols", c13_protocols),
]


def run_criterion(fn: Callable[[Context], Outcome], ctx: Context) -> Outcome:
    try:
        return fn(ctx)
    except Exception as exc:  # reported, not raised
        return Outcome(FAIL, f"error={type(exc).__name__}: {exc}")


def run_all_acceptance(seed: int = DEFAULT_SEED, long: bool = False, workers: int = 1,
                       determinism_check: bool = True) -> Report:
    ctx = Context(seed, long, workers)
    rep = Report("acceptance", {"seed": seed, "long": long, "workers": workers})
    for name, fn in CRITERIA:
        out = run_criterion(fn, ctx)
        rep.check(name, out.status, out.detail)
    if determinism_check:
        out = c14_determinism(ctx, rep.lines())
        rep.check("c14_determinism", out.status, out.detail)
    else:
        rep.check("c14_determinism", SKIP, "disabled")
    rep.timings = dict(ctx.timings)
    return rep
