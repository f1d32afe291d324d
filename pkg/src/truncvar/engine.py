"""Truncated variation (TV), upward (UTV) and downward (DTV) truncated variation of sampled paths.

All three functionals are suprema over sample indices of the given path:

    TV  = sup over i_1 < ... < i_m of  sum phi_c(|x[i_{k+1}] - x[i_k]|)
    UTV = sup over t_1 < s_1 < ... < t_m < s_m of  sum phi_c(x[s_k] - x[t_k])
    DTV = UTV of the negated path

with ``phi_c(x) = max(x - c, 0)``.  The ``*_exact`` functions run in O(n) by
following the alternating drawdown/drawup structure of the path; the
``*_oracle_dp`` functions are the O(n^2) dynamic programmes they are checked
against, and the ``*_brute_force`` functions enumerate partitions outright.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .paths import ParameterError, Path

__all__ = [
    "BRUTE_FORCE_CAP",
    "ORACLE_CAP",
    "OracleSizeError",
    "VariationResult",
    "dtv_curve",
    "dtv_exact",
    "dtv_oracle_curve",
    "dtv_oracle_dp",
    "phi",
    "total_variation",
    "tv_brute_force",
    "tv_curve",
    "tv_exact",
    "tv_oracle_curve",
    "tv_oracle_dp",
    "utv_brute_force",
    "utv_curve",
    "utv_exact",
    "utv_oracle_curve",
    "utv_oracle_dp",
    "variation",
]

ORACLE_CAP = 2000
BRUTE_FORCE_CAP = 14

_EMPTY = np.empty(0)


class OracleSizeError(ValueError):
    """Input too long for an O(n^2) or exponential oracle."""


def phi(x, c):
    """Soft threshold ``max(x - c, 0)``."""
    return np.maximum(np.asarray(x, dtype=float) - c, 0.0) if np.ndim(x) else max(x - c, 0.0)


@dataclass(frozen=True)
class VariationResult:
    kind: str
    c: float
    value: float
    n: int
    curve: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        doc = {"kind": self.kind, "c": self.c, "value": self.value, "n": self.n}
        if self.curve is not None:
            doc["curve"] = self.curve.tolist()
        return doc


def _check_c(c) -> float:
    c = float(c)
    if not (math.isfinite(c) and c > 0):
        raise ParameterError("c", "truncation level must be a finite positive number")
    return c


def _values(path) -> np.ndarray:
    if isinstance(path, Path):
        return path.values
    return np.ascontiguousarray(path, dtype=np.float64)


def tv_exact(path, c) -> VariationResult:
    c = _check_c(c)
    x = _values(path)
    value, _ = _kernels.tv_scan(x, c, _EMPTY)
    return VariationResult("TV", c, float(value), x.size)


def tv_curve(path, c) -> VariationResult:
    c = _check_c(c)
    x = _values(path)
    curve = np.empty(x.size)
    value, _ = _kernels.tv_scan(x, c, curve)
    return VariationResult("TV", c, float(curve[-1]), x.size, curve)


def utv_exact(path, c) -> VariationResult:
    c = _check_c(c)
    x = _values(path)
    value, _ = _kernels.utv_scan(x, c, _EMPTY)
    return VariationResult("UTV", c, float(value), x.size)


def utv_curve(path, c) -> VariationResult:
    c = _check_c(c)
    x = _values(path)
    curve = np.empty(x.size)
    _kernels.utv_scan(x, c, curve)
    return VariationResult("UTV", c, float(curve[-1]), x.size, curve)


def dtv_exact(path, c) -> VariationResult:
    r = utv_exact(-_values(path), c)
    return VariationResult("DTV", r.c, r.value, r.n)


def dtv_curve(path, c) -> VariationResult:
    r = utv_curve(-_values(path), c)
    return VariationResult("DTV", r.c, r.value, r.n, r.curve)


def variation(kind: str, path, c, curve: bool = False) -> VariationResult:
    """Dispatch on ``kind`` in {"TV", "UTV", "DTV"}."""
    table = {
        "TV": (tv_exact, tv_curve),
        "UTV": (utv_exact, utv_curve),
        "DTV": (dtv_exact, dtv_curve),
    }
    try:
        exact, with_curve = table[kind.upper()]
    except KeyError:
        raise ParameterError("kind", f"unknown functional {kind!r}") from None
    return with_curve(path, c) if curve else exact(path, c)


def total_variation(path) -> float:
    """Plain (c = 0) variation of the polyline through the samples."""
    x = _values(path)
    return float(np.abs(np.diff(x)).sum())


def _cap(x, cap, what):
    if x.size > cap:
        raise OracleSizeError(f"{what} accepts at most {cap} samples, got {x.size}")


def _tv_dp(x, c):
    best = np.zeros(x.size)
    for j in range(1, x.size):
        cand = best[:j] + np.maximum(np.abs(x[j] - x[:j]) - c, 0.0)
        best[j] = max(0.0, cand.max())
    return best


def tv_oracle_dp(path, c, cap: int = ORACLE_CAP) -> float:
    """``best[j] = max(0, max_{i<j} best[i] + phi_c(|x_j - x_i|))``; returns ``max_j best[j]``."""
    c = _check_c(c)
    x = _values(path)
    _cap(x, cap, "tv_oracle_dp")
    return float(_tv_dp(x, c).max())


def tv_oracle_curve(path, c, cap: int = ORACLE_CAP) -> np.ndarray:
    """Oracle value of every prefix: the running maximum of the DP table."""
    c = _check_c(c)
    x = _values(path)
    _cap(x, cap, "tv_oracle_curve")
    return np.maximum.accumulate(_tv_dp(x, c))


def utv_oracle_dp(path, c, cap: int = ORACLE_CAP) -> float:
    """Two-state DP over strictly interleaved pairs.

    ``closed[j]`` is the best sum of pairs ending at or before ``j``; a pair
    opened at ``i`` may only follow pairs closed before ``i``, i.e. it starts
    from ``closed[i-1]``.
    """
    c = _check_c(c)
    x = _values(path)
    _cap(x, cap, "utv_oracle_dp")
    return float(_utv_dp(x, c)[-1])


def _utv_dp(x, c):
    n = x.size
    closed = np.zeros(n)
    # opened[i] = closed[i-1], the credit available to a pair starting at i
    opened = np.zeros(n)
    for j in range(1, n):
        opened[j - 1] = closed[j - 2] if j >= 2 else 0.0
        cand = opened[:j] + np.maximum(x[j] - x[:j] - c, 0.0)
        closed[j] = max(closed[j - 1], cand.max())
    return closed


def utv_oracle_curve(path, c, cap: int = ORACLE_CAP) -> np.ndarray:
    """``closed[j]`` is already the oracle value of the prefix ending at ``j``."""
    c = _check_c(c)
    x = _values(path)
    _cap(x, cap, "utv_oracle_curve")
    return _utv_dp(x, c)


def dtv_oracle_dp(path, c, cap: int = ORACLE_CAP) -> float:
    return utv_oracle_dp(-_values(path), c, cap)


def dtv_oracle_curve(path, c, cap: int = ORACLE_CAP) -> np.ndarray:
    return utv_oracle_curve(-_values(path), c, cap)


def tv_brute_force(path, c, cap: int = BRUTE_FORCE_CAP) -> float:
    """Maximum over every subsequence of indices."""
    c = _check_c(c)
    x = _values(path).tolist()
    _cap(np.asarray(x), cap, "tv_brute_force")
    best = 0.0
    n = len(x)
    for r in range(2, n + 1):
        for idx in itertools.combinations(range(n), r):
            total = 0.0
            for a, b in zip(idx, idx[1:]):
                total += max(abs(x[b] - x[a]) - c, 0.0)
            best = max(best, total)
    return best


def utv_brute_force(path, c, cap: int = BRUTE_FORCE_CAP) -> float:
    """Maximum over every strictly interleaved sequence t_1 < s_1 < ... < t_m < s_m."""
    c = _check_c(c)
    x = _values(path).tolist()
    _cap(np.asarray(x), cap, "utv_brute_force")
    best = 0.0
    n = len(x)
    for r in range(2, n + 1, 2):
        for idx in itertools.combinations(range(n), r):
            total = 0.0
            for k in range(0, r, 2):
                total += max(x[idx[k + 1]] - x[idx[k]] - c, 0.0)
            best = max(best, total)
    return best
