"""Statistical generators: correlated multivariate normal, bootstrap with noise,
and a Gaussian copula with beta marginals.

All three are pure functions of their config (and source data, for the
bootstrap); the seed fully determines the output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from tabsynth.data import CorrelationMatrix, Dataset, column_stats
from tabsynth.errors import DomainError, EmptyInputError, InsufficientDataError
from tabsynth.numerics import RngStream, beta_quantile, cholesky, normal_cdf

BEHAVIOR_METRICS = ("TeamEngagement", "Collaboration", "Flexibility")

# Invented defaults: strong engagement/collaboration coupling, moderate links to flexibility.
DEFAULT_TARGET_CORR = (
    (1.0, 0.8, 0.5),
    (0.8, 1.0, 0.4),
    (0.5, 0.4, 1.0),
)
DEFAULT_LATENT_CORR = (
    (1.0, 0.8, 0.5),
    (0.8, 1.0, 0.6),
    (0.5, 0.6, 1.0),
)
# Right-skewed engagement/collaboration, symmetric flexibility. Not fitted to any data.
DEFAULT_MARGINALS = ((5.0, 2.0), (4.0, 2.0), (2.0, 2.0))


def _corr(labels, values) -> CorrelationMatrix:
    if isinstance(values, CorrelationMatrix):
        if values.labels != tuple(labels):
            return CorrelationMatrix(labels, values.values)
        return values
    return CorrelationMatrix(labels, values)


def _check_seed(seed: int) -> None:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed!r}")


@dataclass(frozen=True)
class MultivariateConfig:
    n: int
    seed: int
    labels: tuple[str, ...] = BEHAVIOR_METRICS
    means: tuple[float, ...] = (70.0, 65.0, 60.0)
    stds: tuple[float, ...] = (10.0, 12.0, 15.0)
    target_corr: CorrelationMatrix | Sequence[Sequence[float]] = DEFAULT_TARGET_CORR
    jitter: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "means", tuple(float(v) for v in self.means))
        object.__setattr__(self, "stds", tuple(float(v) for v in self.stds))
        object.__setattr__(self, "target_corr", _corr(self.labels, self.target_corr))
        k = len(self.labels)
        if len(self.means) != k or len(self.stds) != k:
            raise DomainError(f"means and stds must each have {k} entries")
        if any(not s > 0 for s in self.stds):
            raise DomainError("stds must be positive")
        if self.n < 1:
            raise DomainError("n must be at least 1")
        _check_seed(self.seed)


@dataclass(frozen=True)
class BootstrapConfig:
    """Resampling parameters.

    ``noise`` is the noise standard deviation: a fraction of each column's
    sample std when ``noise_scale == "relative"``, an absolute value when
    ``"absolute"``. ``mode="joint"`` resamples whole rows; ``"independent"``
    resamples every column on its own, which destroys cross-column dependence.
    """

    n_out: int
    seed: int
    noise: float = 0.05
    noise_scale: Literal["relative", "absolute"] = "relative"
    mode: Literal["joint", "independent"] = "independent"

    def __post_init__(self):
        if self.n_out < 1:
            raise DomainError("n_out must be at least 1")
        if not self.noise >= 0:
            raise DomainError("noise must be nonnegative")
        if self.noise_scale not in ("relative", "absolute"):
            raise DomainError(f"noise_scale must be 'relative' or 'absolute', got {self.noise_scale!r}")
        if self.mode not in ("joint", "independent"):
            raise DomainError(f"mode must be 'joint' or 'independent', got {self.mode!r}")
        _check_seed(self.seed)


@dataclass(frozen=True)
class CopulaConfig:
    n: int
    seed: int
    labels: tuple[str, ...] = BEHAVIOR_METRICS
    latent_corr: CorrelationMatrix | Sequence[Sequence[float]] = DEFAULT_LATENT_CORR
    marginals: tuple[tuple[float, float], ...] = DEFAULT_MARGINALS
    scale: float = 1.0
    jitter: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(
            self, "marginals", tuple((float(a), float(b)) for a, b in self.marginals)
        )
        object.__setattr__(self, "latent_corr", _corr(self.labels, self.latent_corr))
        if len(self.marginals) != len(self.labels):
            raise DomainError(f"need one (alpha, beta) pair per column, got {len(self.marginals)}")
        if any(not (a > 0 and b > 0) for a, b in self.marginals):
            raise DomainError("beta shape parameters must be positive")
        if not self.scale > 0:
            raise DomainError("scale must be positive")
        if self.n < 1:
            raise DomainError("n must be at least 1")
        _check_seed(self.seed)


def correlated_normals(corr: CorrelationMatrix, n: int, stream: RngStream, jitter: float = 0.0):
    """``(n, k)`` standard normals with correlation ``corr``, as ``z @ L.T``."""
    low = cholesky(corr.values, jitter=jitter)
    k = low.shape[0]
    z = stream.standard_normal(n * k).reshape(n, k)
    return z @ low.T


def gen_multivariate(cfg: MultivariateConfig) -> Dataset:
    x = correlated_normals(cfg.target_corr, cfg.n, RngStream(cfg.seed), cfg.jitter)
    return Dataset(cfg.labels, np.asarray(cfg.means) + np.asarray(cfg.stds) * x)


def gen_bootstrap(source: Dataset, cfg: BootstrapConfig) -> Dataset:
    """Resample ``source`` with replacement, then add Gaussian noise to every cell.

    Row indices come from sub-stream 0 of the seed and noise from sub-stream
    1, so changing the noise level leaves the resampled indices unchanged.
    """
    n, k = source.n_rows, source.n_cols
    if n == 0 or k == 0:
        raise EmptyInputError("bootstrap source has no rows")
    root = RngStream(cfg.seed)
    index_stream, noise_stream = root.spawn(0), root.spawn(1)
    if cfg.mode == "joint":
        idx = index_stream.integers(n, cfg.n_out)
        out = source.values[idx, :].copy()
    else:
        out = np.empty((cfg.n_out, k))
        for j in range(k):
            out[:, j] = source.values[index_stream.integers(n, cfg.n_out), j]

    if cfg.noise > 0:
        if cfg.noise_scale == "relative":
            if n < 2:
                raise InsufficientDataError("relative noise needs at least 2 source rows")
            sigma = cfg.noise * np.array([column_stats(source, c).std for c in source.names])
        else:
            sigma = np.full(k, cfg.noise)
        out += sigma * noise_stream.standard_normal(cfg.n_out * k).reshape(cfg.n_out, k)
    return Dataset(source.names, out)


def gen_copula(cfg: CopulaConfig) -> Dataset:
    """Gaussian copula: latent correlated normals -> normal CDF -> beta quantiles.

    Outputs lie in [0, 1] times ``cfg.scale``.
    """
    x = correlated_normals(cfg.latent_corr, cfg.n, RngStream(cfg.seed), cfg.jitter)
    u = normal_cdf(x)
    y = np.empty_like(u)
    for j, (a, b) in enumerate(cfg.marginals):
        y[:, j] = beta_quantile(u[:, j], a, b)
    return Dataset(cfg.labels, y * cfg.scale if cfg.scale != 1.0 else y)
