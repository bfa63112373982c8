"""Straight-line programs for the mod-2019 calculator."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import CALC_MODULUS

POLICIES = ("broken", "calc", "permissive")
CALC_CONSTANTS = ("2", "22", "222", "2222")

# f(y) = y^5 + 1909 y^3 + 401 y, descending coefficients
F2019 = (1, 0, 1909, 0, 401, 0)


@dataclass(frozen=True)
class Command:
    op: str  # "input" | "const" | "sub" | "mul"
    value: int = 0
    digits: str = ""
    j: int = 0
    k: int = 0

    def __str__(self):
        if self.op == "input":
            return "y"
        if self.op == "const":
            return self.digits
        return f"S{self.j} {'-' if self.op == 'sub' else '*'} S{self.k}"


@dataclass
class SlpProgram:
    commands: list[Command]
    policy: str = "broken"

    def __len__(self):
        return len(self.commands)

    def text(self) -> str:
        return "\n".join(f"S{i} = {c}" for i, c in enumerate(self.commands, 1))


@dataclass
class ValidationReport:
    violations: list[tuple[int, str]] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid


class InvalidProgram(ValueError):
    pass


_LINE = re.compile(r"^S(\d+)=(?:(y)|(\d+)|S(\d+)([-*])S(\d+))$")


def parse_program(text: str, policy: str = "broken") -> SlpProgram:
    """Parse lines like ``S3 = 55``, ``S4 = S2 - S3``, ``S1 = y``.

    Register numbers must run 1, 2, 3, ... in order; '#' starts a comment.
    A ``# policy: calc`` header line overrides the ``policy`` argument.
    """
    cmds = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        hdr = re.match(r"\s*#\s*policy:\s*(\w+)", raw)
        if hdr:
            policy = hdr.group(1)
            continue
        line = re.sub(r"\s+", "", raw.split("#", 1)[0])
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ValueError(f"line {lineno}: cannot parse {raw.strip()!r}")
        idx, y, const, j, op, k = m.groups()
        if int(idx) != len(cmds) + 1:
            raise ValueError(f"line {lineno}: expected S{len(cmds) + 1}, got S{idx}")
        if y:
            cmds.append(Command("input"))
        elif const is not None:
            cmds.append(Command("const", value=int(const), digits=const))
        else:
            cmds.append(Command("sub" if op == "-" else "mul", j=int(j), k=int(k)))
    return SlpProgram(cmds, policy)


def load_program(path: str | Path, policy: str = "broken") -> SlpProgram:
    """Read a program file; its header (if any) sets the policy."""
    return parse_program(Path(path).read_text(), policy)


def _digit_violation(digits: str, policy: str) -> str | None:
    if len(digits) > 4:
        return f"constant {digits} has more than 4 digits"
    if digits.startswith("0"):
        return f"constant {digits} is not a positive integer"
    if policy == "broken" and set(digits) - {"1", "5"}:
        return f"constant {digits} uses digits other than 1 and 5"
    if policy == "calc" and digits not in CALC_CONSTANTS:
        return f"constant {digits} is not one of 2, 22, 222, 2222"
    return None


def validate(p: SlpProgram, policy: str | None = None) -> ValidationReport:
    """Index discipline, first-command rule and the digit policy.

    Under the permissive policy only the structural rules apply.
    """
    policy = policy or p.policy
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    report = ValidationReport()
    if not p.commands:
        report.violations.append((0, "empty program"))
        return report
    if p.commands[0].op != "input":
        report.violations.append((1, "first command must be S1 = y"))
    for i, c in enumerate(p.commands, 1):
        if c.op in ("sub", "mul"):
            for r in (c.j, c.k):
                if not 1 <= r < i:
                    report.violations.append((i, f"operand S{r} is not an earlier register"))
        elif c.op == "const" and policy != "permissive":
            msg = _digit_violation(c.digits, policy)
            if msg:
                report.violations.append((i, msg))
    return report


def _execute(p: SlpProgram, y):
    """Registers over ints or int64 arrays; every value is reduced on entry."""
    regs = []
    for c in p.commands:
        if c.op == "input":
            v = y % CALC_MODULUS
        elif c.op == "const":
            v = c.value % CALC_MODULUS
            if isinstance(y, np.ndarray):
                v = np.full_like(y, v)
        elif c.op == "sub":
            v = (regs[c.j - 1] - regs[c.k - 1]) % CALC_MODULUS
        else:
            v = (regs[c.j - 1] * regs[c.k - 1]) % CALC_MODULUS
        regs.append(v)
    return regs[-1]


def _require_valid(p: SlpProgram, permissive: bool):
    report = validate(p, "permissive" if permissive else None)
    if not report.valid:
        raise InvalidProgram("; ".join(f"S{i}: {m}" for i, m in report.violations))


def run(p: SlpProgram, y: int, permissive: bool = False) -> int:
    """Value of the last register for input y."""
    _require_valid(p, permissive)
    return int(_execute(p, int(y)))


def horner(coeffs, y: int, modulus: int = CALC_MODULUS) -> int:
    """Evaluate descending-degree coefficients at y."""
    acc = 0
    for c in coeffs:
        acc = (acc * y + c) % modulus
    return acc


def verify_equivalence(p: SlpProgram, target=F2019, permissive: bool = False):
    """(True, None) if the program equals the target polynomial on all residues,
    else (False, first counterexample y)."""
    _require_valid(p, permissive)
    ys = np.arange(CALC_MODULUS, dtype=np.int64)
    got = _execute(p, ys)
    want = np.zeros_like(ys)
    for c in target:
        want = (want * ys + c) % CALC_MODULUS
    bad = np.nonzero(got != want)[0]
    if bad.size:
        return False, int(bad[0])
    return True, None


def parse_target(spec: str):
    if spec == "f2019":
        return F2019
    return tuple(int(t) for t in spec.split(","))
