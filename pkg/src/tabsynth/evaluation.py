"""Fidelity comparison between a reference dataset and a synthetic one."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from tabsynth.data import CorrelationMatrix, Dataset, column_stats, correlation_matrix
from tabsynth.errors import EmptyInputError, SchemaError
from tabsynth.numerics import RngStream

HIST_BINS = 20
SCATTER_CAP = 1000
SCATTER_SEED = 0


def ks_statistic(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic ``sup |F_a - F_b|``.

    Both empirical CDFs are right-continuous step functions, so the
    supremum is attained at one of the pooled sample points.
    """
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise EmptyInputError("ks_statistic needs two nonempty samples")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def kendall_tau(a, b, chunk: int = 512) -> float:
    """Kendall's tau-b by explicit pair counting, O(n^2) in row chunks."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise SchemaError("kendall_tau needs two 1-d samples of equal length")
    n = a.size
    if n < 2:
        raise EmptyInputError("kendall_tau needs at least 2 observations")
    concord = 0
    tie_a = tie_b = 0
    for start in range(0, n, chunk):
        sa = np.sign(a[start:start + chunk, None] - a[None, :])
        sb = np.sign(b[start:start + chunk, None] - b[None, :])
        concord += int(np.sum(sa * sb))
        tie_a += int(np.sum(sa == 0)) - min(chunk, n - start)
        tie_b += int(np.sum(sb == 0)) - min(chunk, n - start)
    # every unordered pair was counted twice
    n_pairs = n * (n - 1) / 2
    denom = np.sqrt((n_pairs - tie_a / 2) * (n_pairs - tie_b / 2))
    return float(concord / 2 / denom)


def deterministic_subsample(n: int, cap: int, seed: int = SCATTER_SEED) -> np.ndarray:
    """Sorted row indices: all rows when ``n <= cap``, else ``cap`` rows chosen by seed."""
    if n <= cap:
        return np.arange(n)
    keys = RngStream(seed).uniforms(n)
    return np.sort(np.argsort(keys, kind="stable")[:cap])


@dataclass
class ColumnFidelity:
    name: str
    real_mean: float
    synth_mean: float
    mean_diff: float
    real_std: float
    synth_std: float
    std_diff: float
    ks: float


@dataclass
class Histogram:
    name: str
    edges: list[float]
    real_counts: list[int]
    synth_counts: list[int]


@dataclass
class FidelityReport:
    real_corr: CorrelationMatrix
    synth_corr: CorrelationMatrix
    corr_max_abs_diff: float
    columns: list[ColumnFidelity]
    histograms: list[Histogram]
    scatter_real: np.ndarray = field(repr=False)
    scatter_synth: np.ndarray = field(repr=False)

    @property
    def corr_diff(self) -> np.ndarray:
        return self.real_corr.values - self.synth_corr.values

    def column(self, name: str) -> ColumnFidelity:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "columns": list(self.real_corr.labels),
            "corr_max_abs_diff": self.corr_max_abs_diff,
            "real_corr": self.real_corr.values.tolist(),
            "synth_corr": self.synth_corr.values.tolist(),
            "per_column": [vars(c) for c in self.columns],
            "histograms": [vars(h) for h in self.histograms],
            "scatter_sample": {
                "real": self.scatter_real.tolist(),
                "synth": self.scatter_synth.tolist(),
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"


def check_schema(real: Dataset, synth: Dataset) -> None:
    if real.names != synth.names:
        only_real = [c for c in real.names if c not in synth.names]
        only_synth = [c for c in synth.names if c not in real.names]
        detail = []
        if only_real:
            detail.append(f"only in real: {', '.join(only_real)}")
        if only_synth:
            detail.append(f"only in synthetic: {', '.join(only_synth)}")
        if not detail:
            detail.append(f"column order differs: {list(real.names)} vs {list(synth.names)}")
        raise SchemaError("schema mismatch; " + "; ".join(detail))


def histogram_pair(name: str, a: np.ndarray, b: np.ndarray, bins: int = HIST_BINS) -> Histogram:
    lo = float(min(a.min(), b.min()))
    hi = float(max(a.max(), b.max()))
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)
    ca, _ = np.histogram(a, bins=edges)
    cb, _ = np.histogram(b, bins=edges)
    return Histogram(name, edges.tolist(), ca.tolist(), cb.tolist())


def fidelity_report(real: Dataset, synth: Dataset, sample_seed: int = SCATTER_SEED) -> FidelityReport:
    """Compare marginals (moments, KS, histograms) and correlation structure.

    Raises
    ------
    SchemaError
        If the column names or their order differ.
    """
    check_schema(real, synth)
    rc = correlation_matrix(real)
    sc = correlation_matrix(synth)
    columns = []
    histograms = []
    for j, name in enumerate(real.names):
        rs, ss = column_stats(real, name), column_stats(synth, name)
        a, b = real.values[:, j], synth.values[:, j]
        columns.append(ColumnFidelity(
            name=name,
            real_mean=rs.mean,
            synth_mean=ss.mean,
            mean_diff=ss.mean - rs.mean,
            real_std=rs.std,
            synth_std=ss.std,
            std_diff=ss.std - rs.std,
            ks=ks_statistic(a, b),
        ))
        histograms.append(histogram_pair(name, a, b))
    return FidelityReport(
        real_corr=rc,
        synth_corr=sc,
        corr_max_abs_diff=float(np.max(np.abs(rc.values - sc.values))),
        columns=columns,
        histograms=histograms,
        scatter_real=real.values[deterministic_subsample(real.n_rows, SCATTER_CAP, sample_seed)],
        scatter_synth=synth.values[deterministic_subsample(synth.n_rows, SCATTER_CAP, sample_seed)],
    )
