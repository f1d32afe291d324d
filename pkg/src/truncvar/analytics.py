"""Closed-form limit constants, first-passage moments and Laplace transforms.

Everything is parametrised by the truncation level ``c`` and the drift
``mu`` of a unit-variance Brownian motion.  Most quantities depend on the
product ``x = c * mu`` through a function that is a removable 0/0 at
``x = 0``; near zero (``|x| <= SERIES_RADIUS``) they are evaluated from
Taylor coefficients generated exactly (in rationals) from the
exponential-polynomial form of the numerator and denominator, and the closed
form is used elsewhere.

Drawdown first passage: ``T_D`` is the first time the drawdown from the
running maximum reaches ``c``, ``Z_D`` the running maximum at that time
(exponentially distributed), and ``Z_{D-c}`` the largest rise minus ``c``
before ``T_D``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "AnalyticsDomainError",
    "LimitConstants",
    "SERIES_RADIUS",
    "dtv_limit_mean",
    "dtv_limit_var",
    "fourth_moment_T_D",
    "fourth_moment_Z_D",
    "laplace_tv_joint",
    "laplace_utv_joint",
    "limit_constants",
    "mean_T_D",
    "mean_Z_D",
    "tv_limit_mean",
    "tv_limit_var",
    "utv_limit_mean",
    "utv_limit_var",
]

SERIES_RADIUS = 0.5
_N_TERMS = 48
# below this |c mu| a first-order expansion is exact to double precision
_TINY = 1e-9


class AnalyticsDomainError(ValueError):
    """Parameters outside the region where a formula is valid."""


def _check(c, mu):
    c = float(c)
    mu = float(mu)
    if not (math.isfinite(c) and c > 0):
        raise AnalyticsDomainError(f"c must be a finite positive number, got {c}")
    if not math.isfinite(mu):
        raise AnalyticsDomainError(f"mu must be finite, got {mu}")
    return c, mu


# --- exact Taylor coefficients of exponential polynomials -------------------

def _series(terms, order, n_terms=_N_TERMS):
    """Taylor coefficients of ``sum_j P_j(x) exp(r_j x) / x**order``.

    ``terms`` is a sequence of ``(rate, (p0, p1, ...))`` with integer rates and
    polynomial coefficients.  Coefficients below ``x**order`` must cancel.
    """
    total = n_terms + order
    coef = [Fraction(0)] * total
    for rate, poly in terms:
        rate = Fraction(rate)
        ex = [Fraction(1)]
        for k in range(1, total):
            ex.append(ex[-1] * rate / k)
        for p, a in enumerate(poly):
            if a == 0:
                continue
            for k in range(total - p):
                coef[p + k] += a * ex[k]
    if any(coef[:order]):
        raise AssertionError("expansion does not vanish to the requested order")
    return tuple(float(v) for v in coef[order:])


def _horner(coef, x):
    acc = 0.0
    for a in reversed(coef):
        acc = acc * x + a
    return acc


@lru_cache(maxsize=None)
def _coeffs(name):
    # numerators / denominators as exponential polynomials in x
    table = {
        # x coth x = x (e^{2x} + 1) / (e^{2x} - 1)
        "xcoth_num": ([(2, (0, 1)), (0, (0, 1))], 1),
        "xcoth_den": ([(2, (1,)), (0, (-1,))], 1),
        # x cosh x - sinh x, doubled: (x - 1) e^x + (x + 1) e^{-x}
        "tvvar_num": ([(1, (-1, 1)), (-1, (1, 1))], 3),
        # (2 sinh x)^3 = e^{3x} - 3 e^x + 3 e^{-x} - e^{-3x}
        "tvvar_den": ([(3, (1,)), (1, (-3,)), (-1, (3,)), (-3, (-1,))], 3),
        # 2 e^{4x}(sinh 2x - 2x) = e^{6x} - e^{2x} - 4x e^{4x}
        "utvvar_num": ([(6, (1,)), (2, (-1,)), (4, (0, -4))], 3),
        # (e^{2x} - 1)^3
        "utvvar_den": ([(6, (1,)), (4, (-3,)), (2, (3,)), (0, (-1,))], 3),
        # (e^{2x} - 2x - 1) / 2
        "td1": ([(2, (Fraction(1, 2),)), (0, (Fraction(-1, 2), -1))], 2),
        # fourth moment of T_D at c = 1, times x^8
        "td4": (
            [
                (0, (-21, 12, 3, -4, 1)),
                (2, (0, -36, 81, -54)),
                (4, (12, -60, 75)),
                (6, (Fraction(15, 2), -21)),
                (8, (Fraction(3, 2),)),
            ],
            8,
        ),
    }
    terms, order = table[name]
    return _series(terms, order)


def _ser(name, x):
    return _horner(_coeffs(name), x)


# --- limit means and variances --------------------------------------------

def _xcothx(x):
    if abs(x) <= SERIES_RADIUS:
        return _ser("xcoth_num", x) / _ser("xcoth_den", x)
    return x / math.tanh(x)


def tv_limit_mean(c, mu) -> float:
    """Almost-sure slope of TV under time rescaling: ``mu coth(c mu)``, ``1/c`` at ``mu = 0``."""
    c, mu = _check(c, mu)
    if mu == 0.0:
        return 1.0 / c
    return _xcothx(c * mu) / c


def tv_limit_var(c, mu) -> float:
    """Diffusion coefficient of TV: ``(2 - 2 c mu coth(c mu)) / sinh^2(c mu) + 1``, ``1/3`` at ``mu = 0``."""
    c, mu = _check(c, mu)
    x = c * mu
    if x == 0.0:
        return 1.0 / 3.0
    if abs(x) <= SERIES_RADIUS:
        return 1.0 - 8.0 * _ser("tvvar_num", x) / _ser("tvvar_den", x)
    a = abs(x)
    # 1/sinh^2 without overflow
    inv_sinh2 = 4.0 * math.exp(-2.0 * a) / (-math.expm1(-2.0 * a)) ** 2
    return 1.0 - 2.0 * (a / math.tanh(a) - 1.0) * inv_sinh2


def utv_limit_mean(c, mu) -> float:
    """``mu (coth(c mu) + 1) / 2``, ``1/(2c)`` at ``mu = 0``."""
    c, mu = _check(c, mu)
    if mu == 0.0:
        return 0.5 / c
    x = c * mu
    if abs(x) < _TINY:
        # 2x / (1 - e^{-2x}) = 1 + x + x^2/3 + ...; also avoids subnormal x
        return 0.5 * (1.0 + x) / c
    # mu (coth x + 1) / 2 = mu / (1 - e^{-2x}); no cancellation for x << 0
    return mu / -math.expm1(-2.0 * x)


def dtv_limit_mean(c, mu) -> float:
    return utv_limit_mean(c, -mu)


def _utv_var_pos(y):
    # (1 - e^{-4y} - 4y e^{-2y}) / (1 - e^{-2y})^3 for y > 0
    e2 = math.exp(-2.0 * y)
    return (1.0 - e2 * e2 - 4.0 * y * e2) / (-math.expm1(-2.0 * y)) ** 3


def utv_limit_var(c, mu) -> float:
    """``2 e^{4 c mu} (sinh(2 c mu) - 2 c mu) / (e^{2 c mu} - 1)^3``, ``1/3`` at ``mu = 0``."""
    c, mu = _check(c, mu)
    x = c * mu
    if x == 0.0:
        return 1.0 / 3.0
    if abs(x) <= SERIES_RADIUS:
        return _ser("utvvar_num", x) / _ser("utvvar_den", x)
    if x > 0:
        return _utv_var_pos(x)
    return math.exp(2.0 * x) * _utv_var_pos(-x)


def dtv_limit_var(c, mu) -> float:
    return utv_limit_var(c, -mu)


@dataclass(frozen=True)
class LimitConstants:
    c: float
    mu: float
    m_tv: float
    var_tv: float
    m_utv: float
    var_utv: float
    m_dtv: float
    var_dtv: float
    mean_T_D: float
    m4_T_D: float
    m4_Z_D: float


def limit_constants(c, mu) -> LimitConstants:
    return LimitConstants(
        c=float(c),
        mu=float(mu),
        m_tv=tv_limit_mean(c, mu),
        var_tv=tv_limit_var(c, mu),
        m_utv=utv_limit_mean(c, mu),
        var_utv=utv_limit_var(c, mu),
        m_dtv=dtv_limit_mean(c, mu),
        var_dtv=dtv_limit_var(c, mu),
        mean_T_D=mean_T_D(c, mu),
        m4_T_D=fourth_moment_T_D(c, mu),
        m4_Z_D=fourth_moment_Z_D(c, mu),
    )


# --- first-passage moments --------------------------------------------------

def mean_T_D(c, mu) -> float:
    """``E T_D = (e^{2 c mu} - 2 c mu - 1) / (2 mu^2)``, ``c^2`` at ``mu = 0``."""
    c, mu = _check(c, mu)
    x = c * mu
    if x == 0.0:
        return c * c
    if abs(x) <= SERIES_RADIUS:
        h = _ser("td1", x)
    else:
        try:
            h = (math.expm1(2.0 * x) - 2.0 * x) / (2.0 * x * x)
        except OverflowError:
            return math.inf
    return c * c * h


def fourth_moment_T_D(c, mu) -> float:
    """``E T_D^4``; equals ``277/21 c^8`` at ``mu = 0``."""
    c, mu = _check(c, mu)
    x = c * mu
    if x == 0.0:
        return 277.0 / 21.0 * c**8
    if abs(x) <= SERIES_RADIUS:
        h = _ser("td4", x)
    else:
        if x > 40.0:
            # only 3 e2^4 survives at this size; logs keep e2^4 from overflowing
            log_v = math.log(1.5) + 8.0 * x - 8.0 * math.log(mu)
            return math.exp(log_v) if log_v < 709.0 else math.inf
        e2 = math.exp(2.0 * x)
        num = (
            2 * x**4
            - 4 * x**3 * (27 * e2 + 2)
            + 6 * x**2 * (25 * e2**2 + 27 * e2 + 1)
            + 6 * x * (-7 * e2**3 - 20 * e2**2 - 12 * e2 + 4)
            + 3 * e2**4
            + 15 * e2**3
            + 24 * e2**2
            - 42
        )
        h = num / (2.0 * x**8)
    return c**8 * h


def mean_Z_D(c, mu) -> float:
    """``E Z_D = (e^{2 c mu} - 1) / (2 mu)``, ``c`` at ``mu = 0``."""
    c, mu = _check(c, mu)
    x = c * mu
    if x == 0.0:
        return c
    if abs(x) < _TINY:
        return c * (1.0 + x)
    try:
        return c * math.expm1(2.0 * x) / (2.0 * x)
    except OverflowError:
        return math.inf


def fourth_moment_Z_D(c, mu) -> float:
    """``E Z_D^4 = 3 (e^{2 c mu} - 1)^4 / (2 mu^4)``, ``24 c^4`` at ``mu = 0`` (``Z_D`` is exponential)."""
    c, mu = _check(c, mu)
    if mu == 0.0:
        return 24.0 * c**4
    try:
        return 24.0 * mean_Z_D(c, mu) ** 4
    except OverflowError:
        return math.inf


# --- Laplace transforms -------------------------------------------------------

def _delta(mu, rate, name):
    if not math.isfinite(rate) or rate < 0:
        raise AnalyticsDomainError(f"{name} must be a finite number >= 0, got {rate}")
    d = math.sqrt(mu * mu + 2.0 * rate)
    if d == 0.0:
        raise AnalyticsDomainError(f"{name} = 0 requires mu != 0")
    return d


def _passage_transform(a, d, c, mu):
    """``d e^{-mu c} / (d cosh(dc) - a sinh(dc))`` with cosh/sinh factored by ``e^{dc}/2``."""
    q = math.exp(-2.0 * d * c)
    bracket = d * (1.0 + q) + a * math.expm1(-2.0 * d * c)
    if not bracket > 0:
        raise AnalyticsDomainError(
            f"denominator d cosh(dc) - (alpha + mu) sinh(dc) must be positive "
            f"(alpha < d coth(dc) - mu, d = {d:g})"
        )
    return 2.0 * d * math.exp(-mu * c - d * c) / bracket


def laplace_tv_joint(alpha, beta, c, mu) -> float:
    """``E exp(alpha Z_D - beta T_D)``.

    Valid for ``beta >= 0`` (``beta = 0`` only if ``mu != 0``) and
    ``alpha < d coth(d c) - mu`` with ``d = sqrt(mu^2 + 2 beta)``.
    """
    c, mu = _check(c, mu)
    alpha = float(alpha)
    d = _delta(mu, float(beta), "beta")
    return _passage_transform(alpha + mu, d, c, mu)


def laplace_utv_joint(lam, nu, c, mu) -> float:
    """``E exp(lam Z_{D-c} - nu T_D)`` for ``nu > 0`` and ``lam < d coth(d c) - mu``."""
    c, mu = _check(c, mu)
    lam = float(lam)
    nu = float(nu)
    if not (math.isfinite(nu) and nu > 0):
        raise AnalyticsDomainError(f"nu must be a finite positive number, got {nu}")
    d = _delta(mu, nu, "nu")
    plain = _passage_transform(mu, d, c, mu)  # E exp(-nu T_D)
    # A = sinh(2cd)/d - 2(lam + mu) sinh^2(cd)/d^2, factored by e^{2cd}/(2 d^2)
    q = math.exp(-2.0 * d * c)
    bracket = d * (1.0 - q * q) - (lam + mu) * (1.0 - q) ** 2
    if not bracket > 0:
        raise AnalyticsDomainError(
            f"lam must satisfy lam < d coth(dc) - mu (d = {d:g}); got lam = {lam}"
        )
    ratio = lam * 2.0 * d * d * q / (nu * bracket)  # lam / (nu A)
    return 1.0 - (1.0 - ratio) * (1.0 - plain)
