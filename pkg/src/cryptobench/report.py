"""Line-delimited ``key: value`` reports with a stable field order."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

PASS, FAIL, SKIP = "pass", "fail", "skip"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)   # (name, status, detail)
    timings: dict = field(default_factory=dict)  # rendered only on request

    def metric(self, key: str, value):
        self.metrics[key] = value

    def check(self, name: str, ok, detail: str = ""):
        status = ok if isinstance(ok, str) else (PASS if ok else FAIL)
        self.checks.append((name, status, detail))
        return status == PASS

    @property
    def passed(self) -> bool:
        return all(status != FAIL for _, status, _ in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def digest(self) -> str:
        blob = json.dumps(self.inputs, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def lines(self, timings: bool = False) -> list[str]:
        out = [f"command: {self.command}", f"inputs.digest: {self.digest()}"]
        out += [f"input.{k}: {_fmt(v)}" for k, v in self.inputs.items()]
        out += [f"metric.{k}: {_fmt(v)}" for k, v in self.metrics.items()]
        for name, status, detail in self.checks:
            out.append(f"check.{name}: {status}" + (f" {detail}" if detail else ""))
        if timings:
            out += [f"timing.{k}: {v:.3f}s" for k, v in self.timings.items()]
        out.append(f"outcome: {PASS if self.passed else FAIL}")
        return out

    def render(self, timings: bool = False) -> str:
        return "\n".join(self.lines(timings)) + "\n"
