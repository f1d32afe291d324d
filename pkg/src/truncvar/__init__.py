"""Truncated variation of sampled paths.

``engine`` computes TV, UTV and DTV exactly; ``decomposition`` exposes the
drawdown/drawup structure behind them; ``analytics`` evaluates the Brownian
closed forms; ``montecarlo`` checks the limit theorems by simulation.
"""

from .analytics import LimitConstants, limit_constants
from .decomposition import CycleSequence, Direction, OneSidedEvents, decompose, decompose_one_sided, first_passage_episode
from .engine import (
    VariationResult,
    dtv_curve,
    dtv_exact,
    dtv_oracle_dp,
    tv_curve,
    tv_exact,
    tv_oracle_dp,
    utv_curve,
    utv_exact,
    utv_oracle_dp,
    variation,
)
from .paths import ParameterError, Path, PathFormatError, SimulationParams, path_from_csv, path_to_csv, simulate_bm

__version__ = "0.1.0"

__all__ = [
    "CycleSequence",
    "Direction",
    "LimitConstants",
    "OneSidedEvents",
    "ParameterError",
    "Path",
    "PathFormatError",
    "SimulationParams",
    "VariationResult",
    "decompose",
    "decompose_one_sided",
    "dtv_curve",
    "dtv_exact",
    "dtv_oracle_dp",
    "first_passage_episode",
    "limit_constants",
    "path_from_csv",
    "path_to_csv",
    "simulate_bm",
    "tv_curve",
    "tv_exact",
    "tv_oracle_dp",
    "utv_curve",
    "utv_exact",
    "utv_oracle_dp",
    "variation",
]
