"""Goodness-of-fit and moment summaries used by the campaigns."""

from __future__ import annotations

import math

import numpy as np
from scipy import special, stats

__all__ = [
    "KS_MIN_SIZE",
    "SampleTooSmallError",
    "ks_distance",
    "ks_statistic",
    "ks_two_sample",
    "moment_summary",
]

KS_MIN_SIZE = 20


class SampleTooSmallError(ValueError):
    pass


def _normal_cdf(z):
    return special.ndtr(z)


def ks_distance(sample, cdf=_normal_cdf) -> float:
    """``sup |F_n - F|`` for a continuous reference ``cdf``; no size requirement."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if n == 0:
        raise SampleTooSmallError("empty sample")
    f = cdf(x)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    return float(max(d_plus, d_minus))


def ks_statistic(sample, loc: float = 0.0, scale: float = 1.0, cdf=None, min_size: int = KS_MIN_SIZE):
    """One-sample KS of ``(sample - loc) / scale`` against the standard normal.

    Pass ``cdf`` to test against a different continuous law (applied after
    the same affine map).  The p-value is the asymptotic Kolmogorov tail
    ``P(K > sqrt(n) D)``.  Returns ``(D, p)``.
    """
    x = np.asarray(sample, dtype=float)
    if x.size < min_size:
        raise SampleTooSmallError(f"KS needs at least {min_size} observations, got {x.size}")
    if not scale > 0:
        raise ValueError("scale must be positive")
    d = ks_distance((x - loc) / scale, _normal_cdf if cdf is None else cdf)
    p = float(special.kolmogorov(math.sqrt(x.size) * d))
    return d, p


def ks_two_sample(a, b, min_size: int = KS_MIN_SIZE):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if min(a.size, b.size) < min_size:
        raise SampleTooSmallError(f"KS needs at least {min_size} observations per sample")
    res = stats.ks_2samp(a, b, method="asymp")
    return float(res.statistic), float(res.pvalue)


def moment_summary(x) -> dict:
    """Mean, unbiased variance and standard error of the mean."""
    x = np.asarray(x, dtype=float)
    n = x.size
    mean = float(np.mean(x))
    var = float(np.var(x, ddof=1)) if n > 1 else 0.0
    return {"n": int(n), "mean": mean, "var": var, "se": math.sqrt(var / n) if n else math.nan}
