"""Sampled paths, seeded Brownian motion with drift, and the ``t,value`` CSV format.

Random numbers come from numpy's PCG64 bit generator seeded through
``SeedSequence``; Gaussian variates use numpy's ziggurat sampler
(``Generator.standard_normal``).  Replicate ``r`` of a campaign seeded with
``master_seed`` draws from ``SeedSequence(master_seed, spawn_key=(r,))``,
which hashes the pair into an independent stream.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GAUSSIAN_METHOD",
    "Path",
    "PathFormatError",
    "ParameterError",
    "SimulationParams",
    "grid_size",
    "path_from_csv",
    "path_to_csv",
    "replicate_generator",
    "simulate_bm",
    "simulate_values",
]

GAUSSIAN_METHOD = "numpy PCG64 (SeedSequence-hashed streams) + ziggurat standard_normal"

CSV_HEADER = "t,value"


class ParameterError(ValueError):
    """Invalid numeric parameter; ``field`` names the offending input."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class PathFormatError(ValueError):
    """Malformed path data; ``line`` is the 1-based line number (header is line 1)."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Path:
    """A finite sampled trajectory ``values[i] = W(times[i])``.

    Arrays are copied and made read-only on construction, so a Path can be
    shared freely between workers.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = _frozen(self.times)
        values = _frozen(self.values)
        if times.ndim != 1 or values.ndim != 1:
            raise ValueError("times and values must be one-dimensional")
        if times.shape != values.shape:
            raise ValueError(f"length mismatch: {times.size} times vs {values.size} values")
        if times.size < 1:
            raise ValueError("a path needs at least one sample")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise ValueError("path contains NaN or infinite entries")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_values(cls, values, dt: float = 1.0) -> "Path":
        """Path on the grid ``0, dt, 2dt, ...``."""
        values = np.asarray(values, dtype=np.float64)
        return cls(np.arange(values.size) * dt, values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def negated(self) -> "Path":
        return Path(self.times, -self.values)

    def shifted(self, offset: float) -> "Path":
        return Path(self.times, self.values + offset)

    def index_at(self, t: float) -> int:
        """Index of the largest sample time ``<= t``."""
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        if i < 0:
            raise ValueError(f"time {t} precedes the first sample")
        return i

    def __eq__(self, other):
        if not isinstance(other, Path):
            return NotImplemented
        return np.array_equal(self.times, other.times) and np.array_equal(self.values, other.values)

    __hash__ = None


@dataclass(frozen=True)
class SimulationParams:
    drift_mu: float
    horizon_T: float
    step_dt: float
    seed: int

    def __post_init__(self):
        if not math.isfinite(self.drift_mu):
            raise ParameterError("drift_mu", "must be finite")
        if not (math.isfinite(self.horizon_T) and self.horizon_T > 0):
            raise ParameterError("horizon_T", "must be a finite positive number")
        if not (math.isfinite(self.step_dt) and self.step_dt > 0):
            raise ParameterError("step_dt", "must be a finite positive number")
        if self.step_dt > self.horizon_T:
            raise ParameterError("step_dt", "must not exceed horizon_T")
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2**64):
            raise ParameterError("seed", "must be an unsigned 64-bit integer")
        n = grid_size(self.horizon_T, self.step_dt)
        if n >= np.iinfo(np.int64).max:
            raise ParameterError("step_dt", "step count overflows int64")

    @property
    def n_steps(self) -> int:
        return grid_size(self.horizon_T, self.step_dt)


def grid_size(horizon: float, dt: float) -> int:
    """``ceil(horizon / dt)``, ignoring float noise below 1e-9 of a step."""
    return max(1, math.ceil(horizon / dt - 1e-9))


def replicate_generator(master_seed: int, replicate: int) -> np.random.Generator:
    """Independent generator for ``replicate`` of a campaign seeded with ``master_seed``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(replicate),))
    return np.random.Generator(np.random.PCG64(ss))


def simulate_values(rng: np.random.Generator, mu: float, dt: float, n_steps: int) -> np.ndarray:
    """Values ``W(0)=0, W(dt), ..., W(n_steps*dt)`` of Brownian motion with drift ``mu``."""
    out = np.empty(n_steps + 1)
    out[0] = 0.0
    inc = rng.standard_normal(n_steps)
    inc *= math.sqrt(dt)
    inc += mu * dt
    np.cumsum(inc, out=out[1:])
    return out


def simulate_bm(params: SimulationParams) -> Path:
    """Brownian motion with drift on the inclusive grid ``{0, dt, ..., n*dt}``, ``n = ceil(T/dt)``.

    The last grid time may exceed ``horizon_T`` by less than one step.
    """
    n = params.n_steps
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(params.seed))))
    values = simulate_values(rng, params.drift_mu, params.step_dt, n)
    return Path(np.arange(n + 1) * params.step_dt, values)


def path_from_csv(data) -> Path:
    """Parse ``t,value`` CSV (bytes or str)."""
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise PathFormatError(1, f"not UTF-8: {exc}") from None
    lines = data.splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise PathFormatError(1, f"expected header {CSV_HEADER!r}")
    times, values = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise PathFormatError(lineno, f"expected 2 fields, got {len(parts)}")
        try:
            t, v = float(parts[0]), float(parts[1])
        except ValueError:
            raise PathFormatError(lineno, f"cannot parse {line!r}") from None
        if not (math.isfinite(t) and math.isfinite(v)):
            raise PathFormatError(lineno, "NaN or infinite entry")
        if times and t <= times[-1]:
            raise PathFormatError(lineno, f"non-increasing time {t!r}")
        times.append(t)
        values.append(v)
    if not times:
        raise PathFormatError(len(lines) + 1, "no samples")
    return Path(times, values)


def path_to_csv(path: Path) -> bytes:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for t, v in zip(path.times.tolist(), path.values.tolist()):
        buf.write(f"{t:.17g},{v:.17g}\n")
    return buf.getvalue().encode("utf-8")
