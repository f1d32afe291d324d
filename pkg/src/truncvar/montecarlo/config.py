"""Experiment configuration, loadable from JSON with snake_case field names."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

from ..paths import ParameterError

__all__ = [
    "DEFAULT_LAPLACE_TV_GRID",
    "DEFAULT_LAPLACE_UTV_GRID",
    "ExperimentConfig",
    "ExperimentKind",
    "Thresholds",
    "load_config",
]

# (alpha, beta) and (lambda, nu) points; all inside the validity region for
# c = 0.3 and |mu| <= 0.5, with finite second moments of the estimators
DEFAULT_LAPLACE_TV_GRID = ((0.0, 1.0), (0.0, 5.0), (1.0, 1.0), (-1.0, 2.0), (1.5, 0.5), (0.5, 10.0))
DEFAULT_LAPLACE_UTV_GRID = ((0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (-1.0, 2.0), (1.0, 5.0), (1.5, 0.5))

# experiments whose grids must resolve drawdown/drawup cycles
_CYCLE_RESOLVING_DT = 50.0


class ExperimentKind(enum.Enum):
    SMALL_C_TV = "SMALL_C_TV"
    SMALL_C_UTV = "SMALL_C_UTV"
    TIME_RESCALE_TV = "TIME_RESCALE_TV"
    TIME_RESCALE_UTV = "TIME_RESCALE_UTV"
    AS_LIMIT = "AS_LIMIT"
    RENEWAL_CLT = "RENEWAL_CLT"
    LAPLACE_CHECK = "LAPLACE_CHECK"
    SCALING_CHECK = "SCALING_CHECK"


@dataclass(frozen=True)
class Thresholds:
    ks_alpha: float = 1e-3
    var_rel_tol: float = 0.15
    mean_abs_tol: float = 0.1
    cov_rel_tol: float = 0.2
    se_mult: float = 3.0
    richardson_tol: float = 0.02
    # AS_LIMIT: sup |c TV(t) - t| bound, and half-width of the c UTV(T)/T band
    # around 1/2 (also the relative band for TV(nT)/n)
    as_sup_tol: float = 0.02
    as_band: float = 0.05
    # LAPLACE_CHECK: grid points allowed outside se_mult standard errors
    laplace_max_misses: int = 1

    @classmethod
    def from_dict(cls, doc: dict) -> "Thresholds":
        known = {f.name for f in fields(cls)}
        extra = set(doc) - known
        if extra:
            raise ParameterError("thresholds", f"unknown fields {sorted(extra)}")
        return cls(**doc)


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo campaign.

    ``side`` picks UTV (``"up"``) or DTV (``"down"``) for the one-sided
    experiments.  ``richardson`` defaults to on for SMALL_C_* only.
    ``continuity_correction`` shifts the discrete threshold (see
    ``montecarlo.experiments``) and is recorded in every report.
    """

    experiment: ExperimentKind
    c: float = 1.0
    mu: float = 0.0
    horizon_T: float = 1.0
    step_dt: float = 1e-3
    n_scale: int = 1
    replicates: int = 1000
    time_grid: tuple = (1.0,)
    master_seed: int = 1
    thresholds: Thresholds = field(default_factory=Thresholds)
    side: str = "up"
    richardson: Optional[bool] = None
    continuity_correction: bool = True
    laplace_tv_grid: tuple = DEFAULT_LAPLACE_TV_GRID
    laplace_utv_grid: tuple = DEFAULT_LAPLACE_UTV_GRID
    renewal: Optional[dict] = None

    def __post_init__(self):
        kind = self.experiment
        if not isinstance(kind, ExperimentKind):
            try:
                kind = ExperimentKind(str(kind).upper())
            except ValueError:
                raise ParameterError("experiment", f"unknown experiment {self.experiment!r}") from None
            object.__setattr__(self, "experiment", kind)
        for name in ("c", "mu", "horizon_T", "step_dt"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ParameterError(name, "must be a number")
            object.__setattr__(self, name, float(v))
        if isinstance(self.thresholds, dict):
            object.__setattr__(self, "thresholds", Thresholds.from_dict(self.thresholds))
        grid = tuple(float(t) for t in self.time_grid)
        object.__setattr__(self, "time_grid", grid)
        for name in ("laplace_tv_grid", "laplace_utv_grid"):
            pts = tuple((float(a), float(b)) for a, b in getattr(self, name))
            object.__setattr__(self, name, pts)
        self._validate()

    def _validate(self):
        kind = self.experiment
        for name in ("c", "horizon_T", "step_dt"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ParameterError(name, "must be a finite positive number")
        if not math.isfinite(self.mu):
            raise ParameterError("mu", "must be finite")
        if not (isinstance(self.n_scale, int) and self.n_scale >= 1):
            raise ParameterError("n_scale", "must be an integer >= 1")
        if not (isinstance(self.master_seed, int) and 0 <= self.master_seed < 2**64):
            raise ParameterError("master_seed", "must be an unsigned 64-bit integer")
        min_reps = 1 if kind is ExperimentKind.AS_LIMIT else 100
        if not (isinstance(self.replicates, int) and self.replicates >= min_reps):
            raise ParameterError("replicates", f"must be an integer >= {min_reps}")
        if not self.time_grid:
            raise ParameterError("time_grid", "must not be empty")
        if any(b <= a for a, b in zip(self.time_grid, self.time_grid[1:])):
            raise ParameterError("time_grid", "must be strictly increasing")
        if self.time_grid[0] <= 0 or self.time_grid[-1] > self.horizon_T:
            raise ParameterError("time_grid", "must lie within (0, horizon_T]")
        if self.step_dt > self.horizon_T:
            raise ParameterError("step_dt", "must not exceed horizon_T")
        if self.side not in ("up", "down"):
            raise ParameterError("side", "must be 'up' or 'down'")
        if self.resolves_cycles and self.step_dt > self.c**2 / _CYCLE_RESOLVING_DT + 1e-15:
            raise ParameterError("step_dt", f"must be <= c^2/{_CYCLE_RESOLVING_DT:g} = {self.c**2 / _CYCLE_RESOLVING_DT:g}")
        if kind is ExperimentKind.RENEWAL_CLT and not isinstance(self.renewal, dict):
            raise ParameterError("renewal", "RENEWAL_CLT needs a renewal sampler description")
        if kind is ExperimentKind.SCALING_CHECK:
            if self.mu != 0:
                raise ParameterError("mu", "SCALING_CHECK compares driftless campaigns only")
            if self.n_scale < 2:
                raise ParameterError("n_scale", "SCALING_CHECK needs n_scale >= 2")

    @property
    def resolves_cycles(self) -> bool:
        if self.experiment is ExperimentKind.RENEWAL_CLT:
            return bool(self.renewal) and self.renewal.get("family") == "brownian_cycles"
        return True

    @property
    def use_richardson(self) -> bool:
        if self.richardson is None:
            return self.experiment in (ExperimentKind.SMALL_C_TV, ExperimentKind.SMALL_C_UTV)
        return bool(self.richardson)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(doc) - known
        if extra:
            raise ParameterError(sorted(extra)[0], "unknown config field")
        if "experiment" not in doc:
            raise ParameterError("experiment", "missing")
        return cls(**doc)

    @classmethod
    def from_json(cls, text) -> "ExperimentConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParameterError("config", f"invalid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ParameterError("config", "top level must be an object")
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["experiment"] = self.experiment.value
        doc["time_grid"] = list(self.time_grid)
        doc["laplace_tv_grid"] = [list(p) for p in self.laplace_tv_grid]
        doc["laplace_utv_grid"] = [list(p) for p in self.laplace_utv_grid]
        return doc

    def replace(self, **changes) -> "ExperimentConfig":
        doc = self.to_dict()
        doc.update(changes)
        return ExperimentConfig.from_dict(doc)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return ExperimentConfig.from_json(fh.read())
