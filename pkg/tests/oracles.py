"""High-precision reference values, written independently of the package.

The closed forms are evaluated in 60-digit arithmetic directly from their
textbook expressions; the limit constants are also rebuilt from derivatives
of the Laplace transforms, which checks the closed forms themselves.
"""

import mpmath as mp

mp.mp.dps = 60


def coth(x):
    return mp.cosh(x) / mp.sinh(x)


def m_tv(c, mu):
    c, mu = mp.mpf(c), mp.mpf(mu)
    if mu == 0:
        return 1 / c
    return mu * coth(c * mu)


def var_tv(c, mu):
    x = mp.mpf(c) * mp.mpf(mu)
    if x == 0:
        return mp.mpf(1) / 3
    return (2 - 2 * x * coth(x)) / mp.sinh(x) ** 2 + 1


def m_utv(c, mu):
    c, mu = mp.mpf(c), mp.mpf(mu)
    if mu == 0:
        return 1 / (2 * c)
    return mu * (coth(c * mu) + 1) / 2


def var_utv(c, mu):
    x = mp.mpf(c) * mp.mpf(mu)
    if x == 0:
        return mp.mpf(1) / 3
    return 2 * mp.exp(4 * x) * (mp.sinh(2 * x) - 2 * x) / (mp.exp(2 * x) - 1) ** 3


def mean_td(c, mu):
    c, mu = mp.mpf(c), mp.mpf(mu)
    if mu == 0:
        return c * c
    x = c * mu
    return (mp.exp(2 * x) - 2 * x - 1) / (2 * mu * mu)


def m4_td(c, mu):
    """Fourth moment of T_D by differentiating E exp(-b T_D) four times at b = 0."""
    c, mu = mp.mpf(c), mp.mpf(mu)
    if mu == 0:
        # E exp(-b T) = 1 / cosh(c sqrt(2b)); use the series in b
        return mp.mpf(277) / 21 * c**8

    def g(b):
        return lt_tv(0, b, c, mu)

    return mp.diff(g, 0, 4)


def m4_td_series(c, mu):
    """Same as ``m4_td`` but through a Taylor expansion in b (valid for every mu)."""
    c, mu = mp.mpf(c), mp.mpf(mu)
    coef = mp.taylor(lambda b: lt_tv(0, b, c, mu), mp.mpf("1e-40") if mu == 0 else 0, 4)
    return coef[4] * 24


def mean_zd(c, mu):
    c, mu = mp.mpf(c), mp.mpf(mu)
    if mu == 0:
        return c
    return (mp.exp(2 * c * mu) - 1) / (2 * mu)


def lt_tv(a, b, c, mu):
    a, b, c, mu = (mp.mpf(v) for v in (a, b, c, mu))
    d = mp.sqrt(mu**2 + 2 * b)
    return d * mp.exp(-(a + mu) * c) * mp.exp(a * c) / (d * mp.cosh(d * c) - (a + mu) * mp.sinh(d * c))


def lt_utv(lam, nu, c, mu):
    lam, nu, c, mu = (mp.mpf(v) for v in (lam, nu, c, mu))
    d = mp.sqrt(mu**2 + 2 * nu)
    A = mp.sinh(2 * c * d) / d - 2 * (lam + mu) * mp.sinh(c * d) ** 2 / d**2
    return 1 - (1 - lam / nu / A) * (1 - mp.exp(-mu * c) / (mp.cosh(c * d) - mu * mp.sinh(c * d) / d))


def _moments(f, c, mu, b0):
    def g(a, b):
        return f(a, b, c, mu)

    h = mp.mpf("1e-12")
    ET = -mp.diff(lambda b: g(0, b), b0, h=h)
    EZ = mp.diff(lambda a: g(a, b0), 0, h=h)
    ET2 = mp.diff(lambda b: g(0, b), b0, 2, h=h)
    EZ2 = mp.diff(lambda a: g(a, b0), 0, 2, h=h)
    EZT = -mp.diff(g, (0, b0), (1, 1), h=h)
    return ET, EZ, ET2, EZ2, EZT


def renewal_constants_tv(c, mu):
    """``(f, sigma^2)`` for TV from the joint transform of (T_D, Z_D) at mu and -mu.

    A cycle is a drawdown episode followed by an independent drawup episode,
    and the drawup episode is a drawdown episode of the reflected path.
    """
    c, mu = mp.mpf(c), mp.mpf(mu)
    b0 = mp.mpf("1e-30")
    T1, Z1, T2, Z2, ZT = _moments(lt_tv, c, mu, b0)
    U1, Y1, U2, Y2, YU = _moments(lt_tv, c, -mu, b0)
    # the episode starts c above the last confirmed extremum, so Z_D is
    # already the truncated increment phi_c of the half-cycle
    ED = T1 + U1
    EZ = Z1 + Y1
    ED2 = T2 + U2 + 2 * T1 * U1
    EZ2 = Z2 + Y2 + 2 * Z1 * Y1
    EDZ = ZT + YU + T1 * Y1 + U1 * Z1
    f = EZ / ED
    return f, (EZ2 - 2 * f * EDZ + f * f * ED2) / ED


def renewal_constants_utv(c, mu):
    c, mu = mp.mpf(c), mp.mpf(mu)
    b0 = mp.mpf("1e-30")
    T1, Z1, T2, Z2, ZT = _moments(lt_utv, c, mu, b0)
    f = Z1 / T1
    return f, (Z2 - 2 * f * ZT + f * f * T2) / T1


def _phi(x, c):
    return x - c if x > c else 0.0


def tv_enumerate(x, c):
    """TV by recursion over the next chosen index; exponential, for n <= 14."""
    x = list(map(float, x))
    n = len(x)
    memo = {}

    def best_from(i):
        # best sum of a chain starting at index i
        if i not in memo:
            memo[i] = max([0.0] + [_phi(abs(x[j] - x[i]), c) + best_from(j) for j in range(i + 1, n)])
        return memo[i]

    return max(best_from(i) for i in range(n)) if n else 0.0


def utv_enumerate(x, c):
    """Every strictly interleaved t_1 < s_1 < t_2 < s_2 < ..., without memoisation."""
    x = list(map(float, x))
    n = len(x)

    def go(start):
        best = 0.0
        for t in range(start, n):
            for s in range(t + 1, n):
                best = max(best, _phi(x[s] - x[t], c) + go(s + 1))
        return best

    return go(0)
