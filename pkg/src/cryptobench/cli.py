"""``cryptobench`` command-line front end.

Every command prints a ``key: value`` report and exits 0 when its checks
pass, 1 when a check fails and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .report import Report

log = logging.getLogger("cryptobench")


class InputError(Exception):
    pass


# -- curl27 --------------------------------------------------------------------------

def _messages(arg: str):
    from . import bundle

    return bundle.load_messages(bundle.resolve(arg))


def cmd_curl27_hash(args, rep: Report):
    from .curl27 import curl_hash, format_trits

    msgs = _messages(args.file)
    rep.inputs.update(file=args.file, messages=len(msgs))
    for i, x in enumerate(msgs):
        rep.metric(f"length.{i}", x.size)
        rep.metric(f"digest.{i}", format_trits(curl_hash(x)))


def cmd_curl27_verify(args, rep: Report):
    from .curl27 import curl_hash, format_trits

    msgs = _messages(args.file)
    if len(msgs) != 2:
        raise InputError(f"expected two messages, found {len(msgs)}")
    x, x2 = msgs
    h1, h2 = curl_hash(x), curl_hash(x2)
    rep.inputs.update(file=args.file, lengths=f"{x.size},{x2.size}")
    rep.metric("digest", format_trits(h1))
    rep.check("messages_differ", not (x.size == x2.size and np.array_equal(x, x2)))
    rep.check("digests_equal", bool(np.array_equal(h1, h2)))


def cmd_curl27_attack(args, rep: Report):
    from .curl27 import BudgetExhausted, format_trits, fragmentation_collision_attack, verify_collision

    rep.inputs.update(m=args.m, budget=args.budget, seed=args.seed)
    t0 = time.perf_counter()
    try:
        res = fragmentation_collision_attack(m=args.m, budget=args.budget, seed=args.seed)
    except BudgetExhausted as exc:
        rep.check("collision_found", False, str(exc))
        return
    rep.timings["attack"] = time.perf_counter() - t0
    rep.metric("hashes", res.hashes)
    rep.metric("fingerprint_false_positives", res.fingerprint_false_positives)
    rep.metric("length", res.x.size)
    rep.check("collision_found", verify_collision(res.x, res.x2))
    if args.output:
        Path(args.output).write_text(format_trits(res.x) + "\n" + format_trits(res.x2) + "\n")
        rep.metric("written", args.output)


# -- twinpeaks -------------------------------------------------------------------------

def cmd_twinpeaks_oracle(args, rep: Report):
    """Serve ``E <hex>`` / ``D <hex>`` request lines, answering one hex line each."""
    from .twinpeaks import Oracle

    o = Oracle.from_seed(args.seed)
    src = sys.stdin if args.listen_file in (None, "-") else open(args.listen_file)
    served = 0
    try:
        for line in src:
            parts = line.split()
            if not parts:
                continue
            op, data = parts[0].upper(), "".join(parts[1:]).lower()
            if op == "E":
                print(o.encrypt_hex(data), flush=True)
            elif op == "D":
                print(o.incomplete_decrypt_hex(data), flush=True)
            else:
                raise InputError(f"unknown request {parts[0]!r}; use E or D")
            served += 1
    finally:
        if src is not sys.stdin:
            src.close()
    rep.inputs.update(seed=args.seed)
    rep.metric("requests", served)
    rep.metric("encrypt_blocks", o.encrypt_calls)
    rep.metric("decrypt_blocks", o.decrypt_calls)


def cmd_twinpeaks_attack(args, rep: Report):
    from .twinpeaks import Block128, Oracle, slide_attack_decrypt

    o = Oracle.from_seed(args.seed)
    rng = np.random.default_rng([args.seed, 1])
    if args.ciphertext:
        y = Block128.from_hex(args.ciphertext)
        p_true = None
    else:
        p_true = Block128(*map(int, rng.integers(0, 1 << 32, size=4, dtype=np.uint64)))
        y = o.encrypt(p_true)
    base = o.queries
    t0 = time.perf_counter()
    p, stats = slide_attack_decrypt(o, y, seed=rng)
    rep.timings["attack"] = time.perf_counter() - t0
    rep.inputs.update(seed=args.seed, ciphertext=y.hex())
    rep.metric("plaintext", p.hex())
    rep.metric("oracle_blocks", o.queries - base)
    rep.metric("log2_oracle_blocks", round(float(np.log2(o.queries - base)), 2))
    rep.check("reencrypts_to_ciphertext", o.encrypt(p) == y)
    if p_true is not None:
        rep.check("matches_plaintext", p == p_true)


# -- classical ---------------------------------------------------------------------------

def cmd_rotor_brute(args, rep: Report):
    from . import bundle
    from .classical import dictionary_coverage, rotor_bruteforce

    ct = bundle.resolve(args.file).read_text().strip()
    rep.inputs.update(file=args.file, ciphertext=ct)
    best = []
    for key, text in rotor_bruteforce(ct):
        cov = dictionary_coverage(text)
        rep.metric(f"{key}", f"{text} coverage={cov:.2f}")
        if cov >= args.threshold:
            best.append(key)
    rep.metric("dictionary_keys", ",".join(best) or "none")
    rep.check("unique_key", len(best) == 1)


def cmd_qam_decode(args, rep: Report):
    from . import bundle
    from .classical import apply_substitution, decode_part, decode_plaintext

    rep.inputs.update(part=args.part)
    if args.part == "all":
        rep.metric("plaintext", decode_plaintext())
        return
    words = decode_part(int(args.part))
    keys = bundle.load_json("qam-keys")
    rep.metric("codewords", len(words))
    rep.metric("text", apply_substitution(words, keys[f"part{args.part}"]))


def cmd_qam_freq(args, rep: Report):
    from . import bundle
    from .classical import codeword_frequencies, decode_part

    words = decode_part(int(args.part))
    freq = codeword_frequencies(words)
    rep.inputs.update(part=args.part)
    rep.metric("codewords", len(words))
    for cw, n in sorted(freq.items(), key=lambda kv: (-kv[1], kv[0])):
        rep.metric(f"freq.{cw}", n)
    table = {cw: n for _, cw, n in bundle.load_json("qam-table4")[str(args.part)]}
    rep.check("matches_reference_table", dict(freq) == table)


# -- slp -------------------------------------------------------------------------------

def _program(args):
    from . import bundle
    from .slpvm import load_program

    p = load_program(bundle.resolve(args.file))
    if args.policy:
        p.policy = args.policy
    return p


def cmd_slp_validate(args, rep: Report):
    from .slpvm import validate

    p = _program(args)
    report = validate(p)
    rep.inputs.update(file=args.file, policy=p.policy)
    rep.metric("commands", len(p))
    for i, msg in report.violations:
        rep.metric(f"violation.S{i}", msg)
    rep.check("valid", report.valid)


def cmd_slp_verify(args, rep: Report):
    from .slpvm import parse_target, validate, verify_equivalence

    p = _program(args)
    target = parse_target(args.target)
    rep.inputs.update(file=args.file, policy=p.policy, target=",".join(map(str, target)))
    rep.metric("commands", len(p))
    if not rep.check("valid", validate(p).valid):
        return
    ok, y = verify_equivalence(p, target)
    if not ok:
        rep.metric("counterexample", y)
    rep.check("equivalent", ok)


# -- factoring --------------------------------------------------------------------------

def cmd_factor(args, rep: Report):
    from . import bundle
    from .lattice import FactoringInstance, factor_with_hint

    n, h = bundle.load_factoring(bundle.resolve(args.instance))
    rep.inputs.update(instance=args.instance, n_bits=n.bit_length())
    p, q = factor_with_hint(FactoringInstance(n, h))
    rep.metric("p", p)
    rep.metric("q", q)
    rep.check("pq_equals_n", p * q == n)


# -- boolfun -----------------------------------------------------------------------------

def cmd_boolfun_metrics(args, rep: Report):
    from . import bundle
    from .boolfun import VectorialMap, is_apn, sbox_metrics

    s = VectorialMap.from_values(bundle.load_sbox(bundle.resolve(args.file)))
    m = sbox_metrics(s)
    rep.inputs.update(file=args.file, n=s.n)
    for k in ("deg", "nl", "du", "ai"):
        rep.metric(k, getattr(m, k))
    rep.metric("permutation", s.is_permutation())
    rep.metric("apn", is_apn(s))


def cmd_boolfun_apn(args, rep: Report):
    from .boolfun import enumerate_apn_involutions, fixed_point_bound_check

    maps = enumerate_apn_involutions(args.n)
    rep.inputs.update(n=args.n)
    rep.metric("count", len(maps))
    if args.list:
        for i, g in enumerate(maps):
            rep.metric(f"map.{i}", " ".join(map(str, g.table)))
    rep.check("fixed_point_bound", all(fixed_point_bound_check(g) for g in maps))


def cmd_boolfun_conjecture(args, rep: Report):
    from .boolfun import conjecture_verify

    r = conjecture_verify(args.n, args.k, workers=args.workers, max_n=16 if args.long else 8)
    rep.inputs.update(n=args.n, k=args.k)
    rep.metric("delta_size", r.delta_size)
    rep.metric("pairs", len(r.counts))
    rep.metric("expected", r.expected)
    rep.metric("distinct_counts", ",".join(map(str, sorted(set(r.counts.values())))))
    for v1, v2 in r.failures[:10]:
        rep.metric(f"failure.{v1}.{v2}", r.counts[(v1, v2)])
    rep.check("all_counts_equal", r.passed)


# -- sharing -----------------------------------------------------------------------------

def cmd_sharing_check(args, rep: Report):
    from . import bundle
    from .boolfun import algebraic_degree
    from .sharing import hypercube_condition, load_map

    f = load_map(bundle.resolve(args.file))
    rep.inputs.update(file=args.file, shares=args.n)
    rep.metric("degree", max(algebraic_degree((f.table >> i) & 1) for i in range(f.n)))
    rep.check("hypercube_condition", hypercube_condition(f, args.n))


def cmd_sharing_construct(args, rep: Report):
    from . import bundle
    from .sharing import construction_report, load_map

    f = load_map(bundle.resolve(args.file))
    F, r = construction_report(f)
    rep.inputs.update(file=args.file)
    rep.check("sharing", r.sharing)
    rep.check("noncomplete", r.noncomplete)
    rep.metric("invertible", r.invertible)
    if args.output:
        Path(args.output).write_text(F.dumps())
        rep.metric("written", args.output)


def cmd_sharing_transport(args, rep: Report):
    from .sharing import AffinePermutation, SharedFunction, is_noncomplete, transport_affine

    F = SharedFunction.loads(Path(args.F).read_text())
    a = AffinePermutation.loads(Path(args.a).read_text())
    b = AffinePermutation.loads(Path(args.b).read_text())
    G = transport_affine(F, a, b)
    rep.inputs.update(F=args.F, a=args.a, b=args.b, shares=F.n)
    rep.check("noncomplete", is_noncomplete(G))
    if args.output:
        Path(args.output).write_text(G.dumps())
        rep.metric("written", args.output)


# -- protocols ---------------------------------------------------------------------------

def cmd_protocol_sum(args, rep: Report):
    from .protocols import secure_sum

    xs = [int(t) for t in args.inputs.split(",")]
    total, affordable, session = secure_sum(xs, args.price, seed=args.seed)
    rep.inputs.update(inputs=args.inputs, price=args.price, seed=args.seed)
    rep.metric("participants", session.n)
    rep.metric("modulus", session.modulus)
    rep.metric("messages", len(session.messages))
    rep.metric("published", ",".join(map(str, session.published)))
    rep.metric("total", total)
    rep.metric("affordable", affordable)
    rep.check("total_equals_sum", total == sum(xs))


def cmd_puzzle_keyflip(args, rep: Report):
    from .protocols import KeyState, keyflip_simulate, keyflip_step

    rep.inputs.update(width=args.width, seed=args.seed)
    if args.demo:
        k = KeyState.from_string("1100101101110011")
        rep.metric("demo.before", str(k))
        rep.metric("demo.after", str(keyflip_step(k, 5, 12)))
    rng = np.random.default_rng(args.seed)
    start = KeyState.random(rng, args.width)
    final, steps = keyflip_simulate(start, rng)
    rep.metric("steps", steps)
    rep.check("terminal_all_ones", all(final.bits))


def cmd_puzzle_repunit(args, rep: Report):
    from .protocols import digit_shape_value, repunit_multiple

    a, k = repunit_multiple(args.modulus, args.zeros)
    rep.inputs.update(modulus=args.modulus, zeros=args.zeros)
    rep.metric("ones", a)
    rep.metric("zeros", k)
    rep.check("divisible", digit_shape_value(a, k) % args.modulus == 0)


# -- acceptance ------------------------------------------------------------------------

def cmd_acceptance(args, rep: Report):
    from .acceptance import run_all_acceptance

    full = run_all_acceptance(seed=args.seed, long=args.long, workers=args.workers,
                              determinism_check=not args.no_determinism_check)
    rep.inputs.update(full.inputs)
    rep.checks.extend(full.checks)
    rep.timings.update(full.timings)


# -- parser ----------------------------------------------------------------------------------

def _globals(defaults: bool) -> argparse.ArgumentParser:
    """Global flags, accepted before or after the subcommand."""
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--seed", type=int, default=d(42), help="random seed (default 42)")
    g.add_argument("--workers", type=int, default=d(1), help="worker processes")
    g.add_argument("--long", action="store_true", default=d(False), help="include long-running work")
    g.add_argument("--timings", action="store_true", default=d(False), help="append wall-clock timings")
    g.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _globals(False)
    ap = argparse.ArgumentParser(prog="cryptobench", parents=[_globals(True)],
                                 description="Cryptanalysis workbench.")
    sub = ap.add_subparsers(dest="group", required=True)

    def group(name, help_):
        p = sub.add_parser(name, help=help_, parents=[common])
        return p.add_subparsers(dest="action", required=True)

    def leaf(parent, name, fn, help_=None):
        p = parent.add_parser(name, help=help_, parents=[common])
        p.set_defaults(func=fn, cmd=f"{p.prog.split(' ', 1)[1]}")
        return p

    c = group("curl27", "Curl27 hashing and collisions")
    leaf(c, "hash", cmd_curl27_hash).add_argument("file")
    leaf(c, "verify", cmd_curl27_verify).add_argument("file")
    p = leaf(c, "attack", cmd_curl27_attack)
    p.add_argument("--m", type=int, default=9)
    p.add_argument("--budget", type=int, default=8_000_000)
    p.add_argument("--output")

    t = group("twinpeaks", "TwinPeaks3 oracle and slide attack")
    leaf(t, "oracle", cmd_twinpeaks_oracle).add_argument("--listen-file")
    leaf(t, "attack", cmd_twinpeaks_attack).add_argument("--ciphertext")

    r = group("rotor", "rotor machine")
    p = leaf(r, "brute", cmd_rotor_brute)
    p.add_argument("file", nargs="?", default="bundled:rotor")
    p.add_argument("--threshold", type=float, default=0.9)

    q = group("qam", "16QAM / Hamming(7,4) cryptogram")
    leaf(q, "decode", cmd_qam_decode).add_argument("--part", choices=["1", "2", "all"], default="all")
    leaf(q, "freq", cmd_qam_freq).add_argument("--part", choices=["1", "2"], required=True)

    s = group("slp", "calculator straight-line programs")
    for name, fn in (("validate", cmd_slp_validate), ("verify", cmd_slp_verify)):
        p = leaf(s, name, fn)
        p.add_argument("file")
        p.add_argument("--policy", choices=["broken", "calc", "permissive"])
        if name == "verify":
            p.add_argument("--target", default="f2019",
                           help="descending coefficients, e.g. 1,0,1909,0,401,0, or f2019")

    p = sub.add_parser("factor", help="factor n from the hint h", parents=[common])
    p.add_argument("--instance", default="bundled:factoring2019")
    p.set_defaults(func=cmd_factor, cmd="factor")

    b = group("boolfun", "vectorial Boolean functions")
    leaf(b, "metrics", cmd_boolfun_metrics).add_argument("file")
    p = leaf(b, "apn-involutions", cmd_boolfun_apn)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--list", action="store_true")
    p = leaf(b, "conjecture", cmd_boolfun_conjecture)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=1)

    sh = group("sharing", "non-complete sharings")
    p = leaf(sh, "check", cmd_sharing_check)
    p.add_argument("file")
    p.add_argument("--n", type=int, default=3)
    p = leaf(sh, "construct", cmd_sharing_construct)
    p.add_argument("file")
    p.add_argument("--output")
    p = leaf(sh, "transport", cmd_sharing_transport)
    p.add_argument("F")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--output")

    pr = group("protocol", "secure sum")
    p = leaf(pr, "sum", cmd_protocol_sum)
    p.add_argument("--inputs", required=True)
    p.add_argument("--price", type=int, required=True)

    pz = group("puzzle", "number puzzles")
    p = leaf(pz, "keyflip", cmd_puzzle_keyflip)
    p.add_argument("--demo", action="store_true")
    p.add_argument("--width", type=int, default=16)
    p = leaf(pz, "repunit", cmd_puzzle_repunit)
    p.add_argument("--modulus", type=int, default=2019)
    p.add_argument("--zeros", type=int, default=0)

    p = sub.add_parser("acceptance", help="run the acceptance suite", parents=[common])
    p.add_argument("--no-determinism-check", action="store_true")
    p.set_defaults(func=cmd_acceptance, cmd="acceptance")
    return ap


def run_command(argv=None) -> tuple[Report, int]:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(name)s: %(message)s")
    rep = Report(args.cmd)
    t0 = time.perf_counter()
    try:
        args.func(args, rep)
    except (InputError, ValueError, KeyError, OSError, ArithmeticError) as exc:
        rep.check("input", False, f"{type(exc).__name__}: {exc}")
        return rep, 2
    finally:
        rep.timings["total"] = time.perf_counter() - t0
    return rep, rep.exit_code


def main(argv=None) -> int:
    rep, code = run_command(argv)
    args_timings = "--timings" in (argv if argv is not None else sys.argv[1:])
    sys.stdout.write(rep.render(timings=args_timings))
    return code


if __name__ == "__main__":
    sys.exit(main())
