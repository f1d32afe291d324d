"""Drawdown/drawup stopping-time structure of a sampled path.

``decompose`` returns the alternating sequence of stopping indices ``T_1, T_2,
...`` (a drawdown or drawup of at least ``c`` since the last extremum) and
extremum indices ``S_0, S_1, ...`` (first attainment of the max/min in
between).  The extrema form the partition that attains the truncated
variation, so each confirmed extremum contributes ``|x[S_j] - x[S_{j-1}]| - c``.

``decompose_one_sided`` gives the structure behind UTV/DTV: successive
drawdown (drawup) passages and the best truncated rise (fall) inside each
segment between passages.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .engine import _check_c
from .paths import Path

__all__ = [
    "CycleSequence",
    "Direction",
    "EpisodeIncompleteError",
    "FirstPassageSample",
    "OneSidedEvents",
    "Tail",
    "decompose",
    "decompose_one_sided",
    "events_to_csv",
    "first_passage_episode",
]


class Direction(enum.Enum):
    DOWN = "down"
    UP = "up"
    NONE = "none"

    @classmethod
    def parse(cls, value) -> "Direction":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


class EpisodeIncompleteError(RuntimeError):
    """The path ends before the drawdown threshold is reached."""


def _ro(a, dtype=None) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Tail:
    index: int
    spread: float


@dataclass(frozen=True, eq=False)
class CycleSequence:
    """Stopping/extremum indices and per-cycle rewards.

    ``stop_indices[j]`` realises T_{j+1} (T_0 = 0 is implicit) and
    ``extremum_indices[j]`` realises S_j.  When the first threshold crossed is
    a drawup, T_1 = S_0 = 0.  Cycle ``k`` spans ``[T_{2k}, T_{2k+2}]``; its
    rewards are the truncated contributions of the two extremum pairs it
    confirms: ``z_down[k]`` for the rise ``S_{2k-1} -> S_{2k}`` (zero for
    ``k = 0``) and ``z_up[k]`` for the fall ``S_{2k} -> S_{2k+1}``.  With
    these, every completed cycle adds exactly its share of TV.

    ``head_rise`` is ``x[S_0] - x[0]``, the sup over ``[T_0, T_1]`` minus the
    start value.  It is below ``c`` and contributes nothing to TV.
    """

    first_direction: Direction
    c: float
    stop_indices: np.ndarray
    extremum_indices: np.ndarray
    half_cycle_loads: np.ndarray
    z_down: np.ndarray
    z_up: np.ndarray
    durations: np.ndarray
    tail: Tail
    total_duration: float
    open_duration: float
    head_rise: float = 0.0

    @property
    def z_total(self) -> np.ndarray:
        return self.z_down + self.z_up

    @property
    def n_cycles(self) -> int:
        return self.durations.size

    @property
    def cycle_rewards(self) -> list:
        """``(Z_D,k, Z_U,k, D_k, Z_k)`` per completed cycle."""
        return [
            (float(a), float(b), float(d), float(a + b))
            for a, b, d in zip(self.z_down, self.z_up, self.durations)
        ]

    def tv_value(self) -> float:
        """Sum of confirmed contributions plus the open tail."""
        return float(np.sum(self.half_cycle_loads) + max(self.tail.spread - self.c, 0.0))


@dataclass(frozen=True, eq=False)
class OneSidedEvents:
    """Passage indices ``T_{D,k}`` (or ``T_{U,k}``) and the reward of each closed segment."""

    direction: Direction
    c: float
    passage_indices: np.ndarray
    rewards: np.ndarray
    durations: np.ndarray
    open_reward: float
    open_duration: float

    def total(self) -> float:
        return float(np.sum(self.rewards) + self.open_reward)


@dataclass(frozen=True)
class FirstPassageSample:
    """One drawdown episode: passage time, running max at passage, best truncated rise before it."""

    T_D: float
    Z_D: float
    Z_Dmc: float
    index: int


def decompose(path: Path, c) -> CycleSequence:
    c = _check_c(c)
    x = path.values
    t = path.times
    first, stops, exts, run_i, hi_i, lo_i = _kernels.zigzag_events(x, c)
    direction = {-1: Direction.DOWN, 1: Direction.UP, 0: Direction.NONE}[int(first)]

    if direction is Direction.NONE:
        tail = Tail(int(max(hi_i, lo_i)), float(x[hi_i] - x[lo_i]))
    else:
        tail = Tail(int(run_i), float(abs(x[run_i] - x[exts[-1]])))

    ev = x[exts]
    loads = np.maximum(np.abs(np.diff(ev)) - c, 0.0) if exts.size > 1 else np.empty(0)

    m = stops.size
    n_cycles = m // 2
    # loads[j-1] is the contribution confirmed with S_j
    z_down = np.array([loads[2 * k - 1] if k > 0 else 0.0 for k in range(n_cycles)])
    z_up = np.array([loads[2 * k] for k in range(n_cycles)])
    stop_times = np.concatenate(([t[0]], t[stops]))  # T_0, T_1, ...
    durations = np.array([stop_times[2 * k + 2] - stop_times[2 * k] for k in range(n_cycles)])
    last_cycle_end = stop_times[2 * n_cycles]
    return CycleSequence(
        first_direction=direction,
        c=c,
        stop_indices=_ro(stops, np.int64),
        extremum_indices=_ro(exts, np.int64),
        half_cycle_loads=_ro(loads, float),
        z_down=_ro(z_down, float),
        z_up=_ro(z_up, float),
        durations=_ro(durations, float),
        tail=tail,
        total_duration=path.duration,
        open_duration=float(t[-1] - last_cycle_end),
        head_rise=float(x[exts[0]] - x[0]) if direction is Direction.DOWN else 0.0,
    )


def decompose_one_sided(path: Path, c, direction="down") -> OneSidedEvents:
    """Drawdown passages with best rises (``DOWN``), or drawup passages with best falls (``UP``)."""
    c = _check_c(c)
    direction = Direction.parse(direction)
    if direction is Direction.NONE:
        raise ValueError("direction must be DOWN or UP")
    x = path.values if direction is Direction.DOWN else -path.values
    passages, rewards, open_reward = _kernels.drawdown_segments(x, c)
    t = path.times
    bounds = np.concatenate(([t[0]], t[passages]))
    return OneSidedEvents(
        direction=direction,
        c=c,
        passage_indices=_ro(passages, np.int64),
        rewards=_ro(rewards, float),
        durations=_ro(np.diff(bounds), float),
        open_reward=float(open_reward),
        open_duration=float(t[-1] - bounds[-1]),
    )


def first_passage_episode(path: Path, c) -> FirstPassageSample:
    """First drawdown of size ``c``, measured from the start of the path.

    ``Z_D`` is the running maximum at the passage relative to ``values[0]``;
    ``Z_Dmc`` is ``max(best rise - c, 0)`` over pairs up to and including the
    passage index.
    """
    c = _check_c(c)
    x = path.values - path.values[0]
    hi = np.maximum.accumulate(x)
    hits = np.flatnonzero(hi - x >= c)
    if hits.size == 0:
        raise EpisodeIncompleteError(f"drawdown of {c} not reached within {len(path)} samples")
    k = int(hits[0])
    lo = np.minimum.accumulate(x[: k + 1])
    best_rise = float(np.max(x[: k + 1] - lo))
    return FirstPassageSample(
        T_D=float(path.times[k] - path.times[0]),
        Z_D=float(hi[k]),
        Z_Dmc=max(best_rise - c, 0.0),
        index=k,
    )


def events_to_csv(path: Path, events) -> bytes:
    """``k,kind,index,time,value`` rows for a CycleSequence (kinds T, S) or OneSidedEvents (TD or TU)."""
    buf = io.StringIO()
    buf.write("k,kind,index,time,value\n")

    def row(k, kind, i):
        buf.write(f"{k},{kind},{int(i)},{path.times[i]:.17g},{path.values[i]:.17g}\n")

    if isinstance(events, CycleSequence):
        for j, i in enumerate(events.stop_indices):
            row(j + 1, "T", i)
        for j, i in enumerate(events.extremum_indices):
            row(j, "S", i)
    elif isinstance(events, OneSidedEvents):
        kind = "TD" if events.direction is Direction.DOWN else "TU"
        for j, i in enumerate(events.passage_indices):
            row(j + 1, kind, i)
    else:
        raise TypeError(f"cannot export {type(events).__name__}")
    return buf.getvalue().encode("utf-8")
