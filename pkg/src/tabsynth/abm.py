"""Agent-based generator: each agent's behavior metrics are clipped normal
draws centred on its normalized performance score.

    metric = clamp(N(score / 100, sigma^2), 0, 1) * 100

Agents do not interact; every metric of every agent uses its own noise draw.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tabsynth.data import Dataset
from tabsynth.errors import DomainError
from tabsynth.numerics import RngStream
from tabsynth.statistical import BEHAVIOR_METRICS

SCORE_COLUMN = "PerformanceScore"


@dataclass(frozen=True)
class Agent:
    id: int
    performance_score: float

    def __post_init__(self):
        if not 0.0 <= self.performance_score <= 100.0:
            raise DomainError(f"performance score {self.performance_score} outside [0, 100]")


@dataclass(frozen=True)
class AbmConfig:
    """Agent population parameters.

    Scores are drawn uniformly from ``[score_low, score_high]`` unless
    ``score_column`` names a column of the source dataset passed to
    :func:`gen_abm`, in which case there is one agent per source row and
    ``n_agents`` is ignored.
    """

    n_agents: int
    seed: int
    metric_names: tuple[str, ...] = BEHAVIOR_METRICS
    sigma: float = 0.1
    score_low: float = 40.0
    score_high: float = 95.0
    score_column: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "metric_names", tuple(self.metric_names))
        if self.n_agents < 1:
            raise DomainError("n_agents must be at least 1")
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")
        if not 0.0 <= self.score_low <= self.score_high <= 100.0:
            raise DomainError("need 0 <= score_low <= score_high <= 100")
        if SCORE_COLUMN in self.metric_names:
            raise DomainError(f"{SCORE_COLUMN!r} is reserved for the score column")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


def _metrics(scores: np.ndarray, sigma: float, stream: RngStream) -> np.ndarray:
    if np.any((scores < 0.0) | (scores > 100.0)):
        raise DomainError("performance scores must lie in [0, 100]")
    draws = scores / 100.0 + sigma * stream.standard_normal(scores.shape[0])
    return np.clip(draws, 0.0, 1.0) * 100.0


def behavior_metric(p: float, sigma: float, stream: RngStream) -> float:
    """One behavior metric for an agent with performance score ``p``."""
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    return float(_metrics(np.array([float(p)]), sigma, stream)[0])


def gen_abm(cfg: AbmConfig, source: Dataset | None = None) -> Dataset:
    """One row per agent: ``PerformanceScore`` followed by the metric columns.

    Scores use sub-stream 0 of the seed; metric ``j`` uses sub-stream ``j + 1``.
    """
    root = RngStream(cfg.seed)
    if cfg.score_column is not None:
        if source is None:
            raise DomainError("score_column set but no source dataset given")
        scores = np.array(source.column(cfg.score_column), dtype=np.float64)
    else:
        u = root.spawn(0).uniforms(cfg.n_agents)
        scores = cfg.score_low + (cfg.score_high - cfg.score_low) * u
    columns = [scores]
    for j, _ in enumerate(cfg.metric_names):
        columns.append(_metrics(scores, cfg.sigma, root.spawn(j + 1)))
    return Dataset((SCORE_COLUMN, *cfg.metric_names), np.column_stack(columns))
