"""Machine-readable campaign results."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..paths import GAUSSIAN_METHOD

__all__ = ["Check", "ExperimentReport"]

SURROGATE_NOTE = (
    "convergence in C([0,T]) is checked through finite-dimensional marginals, "
    "the covariance grid and a KS test of the terminal statistic"
)


def _clean(v):
    # JSON has no NaN/inf; emit null so reports stay valid JSON
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, (np.floating,)):
        return _clean(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_clean(a) for a in v.tolist()]
    if isinstance(v, dict):
        return {k: _clean(a) for k, a in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(a) for a in v]
    return v


@dataclass
class Check:
    name: str
    value: float
    target: float
    tolerance: float
    passed: bool
    rule: str

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "target": self.target,
            "tolerance": self.tolerance,
            "passed": bool(self.passed),
            "rule": self.rule,
        }


@dataclass
class ExperimentReport:
    """Everything a campaign measured, its targets, and the verdicts.

    ``wall_clock_s`` is kept out of ``to_json`` so that reports are
    byte-identical across runs; callers print it separately.
    """

    config: dict
    replicates: int
    targets: dict = field(default_factory=dict)
    time_points: list = field(default_factory=list)
    terminal: dict = field(default_factory=dict)
    covariance: Optional[dict] = None
    checks: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    terminal_samples: Optional[np.ndarray] = None
    wall_clock_s: float = 0.0

    def add_check(self, name, value, target, tolerance, passed, rule) -> Check:
        chk = Check(name, float(value), float(target), float(tolerance), bool(passed), rule)
        self.checks.append(chk)
        return chk

    def check(self, name) -> Check:
        for chk in self.checks:
            if chk.name == name:
                return chk
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        doc = {
            "config": self.config,
            "generator": GAUSSIAN_METHOD,
            "replicates": self.replicates,
            "targets": self.targets,
            "time_points": self.time_points,
            "terminal": self.terminal,
            "covariance": self.covariance,
            "checks": [c.to_dict() for c in self.checks],
            "verdict": "pass" if self.passed else "fail",
            "flags": sorted(set(self.flags)),
            "extra": self.extra,
            "notes": self.notes,
        }
        return _clean(doc)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def samples_csv(self) -> bytes:
        """``replicate,stat`` rows of the terminal statistic."""
        buf = io.StringIO()
        buf.write("replicate,stat\n")
        if self.terminal_samples is not None:
            for r, v in enumerate(np.asarray(self.terminal_samples).tolist()):
                buf.write(f"{r},{v:.17g}\n")
        return buf.getvalue().encode("utf-8")
