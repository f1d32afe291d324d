"""Compiled single-pass scans over sampled values.

Conventions shared by every kernel: thresholds fire on ``>= c``; running
extrema keep the first index that attains them; sums use Neumaier
compensation.
"""

import numpy as np
from numba import njit

# phase codes
UNKNOWN = 0
SEEK_MIN = -1
SEEK_MAX = 1


@njit(cache=True, nogil=True, inline="always")
def _neumaier(s, comp, term):
    t = s + term
    if abs(s) >= abs(term):
        comp += (s - t) + term
    else:
        comp += (term - t) + s
    return t, comp


@njit(cache=True, nogil=True)
def tv_scan(x, c, curve):
    """Truncated variation of ``x``; fills ``curve`` with prefix values when it has len(x).

    Returns ``(value, n_confirmed_extrema)``.
    """
    n = x.shape[0]
    want = curve.shape[0] == n
    hi = x[0]
    lo = x[0]
    phase = UNKNOWN
    ext = 0.0
    run = 0.0
    s = 0.0
    comp = 0.0
    count = 0
    if want:
        curve[0] = 0.0
    for i in range(1, n):
        v = x[i]
        if phase == UNKNOWN:
            if v > hi:
                hi = v
            if v < lo:
                lo = v
            if hi - v >= c:
                phase = SEEK_MIN
                ext = hi
                run = v
                count = 1
            elif v - lo >= c:
                phase = SEEK_MAX
                ext = lo
                run = v
                count = 2
        elif phase == SEEK_MIN:
            if v < run:
                run = v
            elif v - run >= c:
                s, comp = _neumaier(s, comp, (ext - run) - c)
                ext = run
                run = v
                phase = SEEK_MAX
                count += 1
        else:
            if v > run:
                run = v
            elif run - v >= c:
                s, comp = _neumaier(s, comp, (run - ext) - c)
                ext = run
                run = v
                phase = SEEK_MIN
                count += 1
        if want:
            if phase == UNKNOWN:
                cur = max(hi - lo - c, 0.0)
            else:
                cur = (s + comp) + (abs(run - ext) - c)
            # rounding in sum + tail can dip by an ulp when a tail is confirmed
            curve[i] = max(cur, curve[i - 1])
    if phase == UNKNOWN:
        return max(hi - lo - c, 0.0), 0
    return (s + comp) + (abs(run - ext) - c), count


@njit(cache=True, nogil=True)
def utv_scan(x, c, curve):
    """Upward truncated variation via drawdown-passage segments.

    Returns ``(value, n_passages)``.
    """
    n = x.shape[0]
    want = curve.shape[0] == n
    hi = x[0]
    lo = x[0]
    best = 0.0
    s = 0.0
    comp = 0.0
    count = 0
    if want:
        curve[0] = 0.0
    for i in range(1, n):
        v = x[i]
        if v - lo > best:
            best = v - lo
        if v < lo:
            lo = v
        if v > hi:
            hi = v
        if hi - v >= c:
            if best > c:
                s, comp = _neumaier(s, comp, best - c)
            count += 1
            hi = v
            lo = v
            best = 0.0
        if want:
            curve[i] = max((s + comp) + max(best - c, 0.0), curve[i - 1])
    return (s + comp) + max(best - c, 0.0), count


@njit(cache=True, nogil=True)
def zigzag_events(x, c):
    """Alternating drawdown/drawup structure.

    Returns ``(first, stops, extrema, run_index, hi_index, lo_index)`` where
    ``first`` is -1 (DOWN first), +1 (UP first) or 0 (no threshold crossed),
    ``stops[j]`` realises T_{j+1} and ``extrema[j]`` realises S_j.
    """
    n = x.shape[0]
    stops = np.empty(n + 1, dtype=np.int64)
    exts = np.empty(n + 1, dtype=np.int64)
    ns = 0
    hi_i = 0
    lo_i = 0
    run_i = 0
    phase = UNKNOWN
    first = 0
    for i in range(1, n):
        v = x[i]
        if phase == UNKNOWN:
            if v > x[hi_i]:
                hi_i = i
            if v < x[lo_i]:
                lo_i = i
            if x[hi_i] - v >= c:
                first = SEEK_MIN
                phase = SEEK_MIN
                exts[0] = hi_i
                stops[0] = i
                ns = 1
                run_i = i
            elif v - x[lo_i] >= c:
                first = SEEK_MAX
                phase = SEEK_MAX
                exts[0] = 0
                exts[1] = lo_i
                stops[0] = 0
                stops[1] = i
                ns = 2
                run_i = i
        elif phase == SEEK_MIN:
            if v < x[run_i]:
                run_i = i
            elif v - x[run_i] >= c:
                exts[ns] = run_i
                stops[ns] = i
                ns += 1
                run_i = i
                phase = SEEK_MAX
        else:
            if v > x[run_i]:
                run_i = i
            elif x[run_i] - v >= c:
                exts[ns] = run_i
                stops[ns] = i
                ns += 1
                run_i = i
                phase = SEEK_MIN
    return first, stops[:ns].copy(), exts[:ns].copy(), run_i, hi_i, lo_i


@njit(cache=True, nogil=True)
def drawdown_segments(x, c):
    """Successive drawdown passages and the best c-truncated rise inside each segment.

    Returns ``(passages, rewards, open_reward)``; ``rewards[k]`` belongs to the
    segment ending at ``passages[k]``.
    """
    n = x.shape[0]
    passages = np.empty(n, dtype=np.int64)
    rewards = np.empty(n)
    k = 0
    hi = x[0]
    lo = x[0]
    best = 0.0
    for i in range(1, n):
        v = x[i]
        if v - lo > best:
            best = v - lo
        if v < lo:
            lo = v
        if v > hi:
            hi = v
        if hi - v >= c:
            passages[k] = i
            rewards[k] = max(best - c, 0.0)
            k += 1
            hi = v
            lo = v
            best = 0.0
    return passages[:k].copy(), rewards[:k].copy(), max(best - c, 0.0)


@njit(cache=True, nogil=True)
def tv_utv_dtv_at(x, c, idx, out):
    """TV, UTV and DTV of every prefix ``x[:idx[j]+1]`` written to ``out[j, 0:3]``.

    ``idx`` must be sorted.  Returns the number of confirmed TV extrema.
    """
    n = x.shape[0]
    m = idx.shape[0]
    # TV state
    hi = x[0]
    lo = x[0]
    phase = UNKNOWN
    ext = 0.0
    run = 0.0
    s = 0.0
    comp = 0.0
    count = 0
    # UTV state (drawdown segments)
    uhi = x[0]
    ulo = x[0]
    ubest = 0.0
    us = 0.0
    ucomp = 0.0
    # DTV state (drawup segments)
    dhi = x[0]
    dlo = x[0]
    dbest = 0.0
    ds = 0.0
    dcomp = 0.0
    j = 0
    while j < m and idx[j] == 0:
        out[j, 0] = 0.0
        out[j, 1] = 0.0
        out[j, 2] = 0.0
        j += 1
    for i in range(1, n):
        if j >= m:
            break
        v = x[i]
        if phase == UNKNOWN:
            if v > hi:
                hi = v
            if v < lo:
                lo = v
            if hi - v >= c:
                phase = SEEK_MIN
                ext = hi
                run = v
                count = 1
            elif v - lo >= c:
                phase = SEEK_MAX
                ext = lo
                run = v
                count = 2
        elif phase == SEEK_MIN:
            if v < run:
                run = v
            elif v - run >= c:
                s, comp = _neumaier(s, comp, (ext - run) - c)
                ext = run
                run = v
                phase = SEEK_MAX
                count += 1
        else:
            if v > run:
                run = v
            elif run - v >= c:
                s, comp = _neumaier(s, comp, (run - ext) - c)
                ext = run
                run = v
                phase = SEEK_MIN
                count += 1

        if v - ulo > ubest:
            ubest = v - ulo
        if v < ulo:
            ulo = v
        if v > uhi:
            uhi = v
        if uhi - v >= c:
            if ubest > c:
                us, ucomp = _neumaier(us, ucomp, ubest - c)
            uhi = v
            ulo = v
            ubest = 0.0

        if dhi - v > dbest:
            dbest = dhi - v
        if v > dhi:
            dhi = v
        if v < dlo:
            dlo = v
        if v - dlo >= c:
            if dbest > c:
                ds, dcomp = _neumaier(ds, dcomp, dbest - c)
            dhi = v
            dlo = v
            dbest = 0.0

        while j < m and idx[j] == i:
            if phase == UNKNOWN:
                out[j, 0] = max(hi - lo - c, 0.0)
            else:
                out[j, 0] = (s + comp) + (abs(run - ext) - c)
            out[j, 1] = (us + ucomp) + max(ubest - c, 0.0)
            out[j, 2] = (ds + dcomp) + max(dbest - c, 0.0)
            j += 1
    return count


@njit(cache=True, nogil=True)
def episode_scan(inc, bexp, c_trig, state, out_t, out_max, out_bmax, out_rise, n_done, max_steps):
    """Consume increments, closing drawdown-passage episodes as they complete.

    ``bexp`` holds one standard exponential per increment; with it the
    maximum of the Brownian bridge across each step, ``(a + b + sqrt((b - a)^2
    + 2 dt E)) / 2``, is tracked next to the grid maximum (``state[6]`` is dt).
    ``state = [x, running_max, running_min, best_rise, steps, bridge_max, dt]``
    carries an unfinished episode across blocks (each episode restarts from
    x = 0).  An episode that exceeds ``max_steps`` is abandoned, counted, and
    its slot filled with NaN.
    Returns ``(n_done, n_abandoned)``.
    """
    x = state[0]
    hi = state[1]
    lo = state[2]
    best = state[3]
    steps = int(state[4])
    bhi = state[5]
    two_dt = 2.0 * state[6]
    target = out_t.shape[0]
    abandoned = 0
    for k in range(inc.shape[0]):
        if n_done >= target:
            break
        a = x
        x += inc[k]
        steps += 1
        m = 0.5 * (a + x + np.sqrt((x - a) * (x - a) + two_dt * bexp[k]))
        if m > bhi:
            bhi = m
        if x - lo > best:
            best = x - lo
        if x < lo:
            lo = x
        if x > hi:
            hi = x
        if hi - x >= c_trig:
            out_t[n_done] = steps
            out_max[n_done] = hi
            out_bmax[n_done] = bhi
            out_rise[n_done] = best
            n_done += 1
            x = 0.0
            hi = 0.0
            lo = 0.0
            best = 0.0
            bhi = 0.0
            steps = 0
        elif steps >= max_steps:
            # the slot is spent as NaN so the caller sees the gap
            out_t[n_done] = np.nan
            out_max[n_done] = np.nan
            out_bmax[n_done] = np.nan
            out_rise[n_done] = np.nan
            n_done += 1
            abandoned += 1
            x = 0.0
            hi = 0.0
            lo = 0.0
            best = 0.0
            bhi = 0.0
            steps = 0
    state[0] = x
    state[1] = hi
    state[2] = lo
    state[3] = best
    state[4] = steps
    state[5] = bhi
    return n_done, abandoned
