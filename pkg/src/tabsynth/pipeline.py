"""Config-driven runs: generate, train-gan and evaluate, writing files to disk."""

from __future__ import annotations

import json
import logging
from dataclasses import fields
from pathlib import Path
from typing import Any

from tabsynth import __version__
from tabsynth.abm import AbmConfig, gen_abm
from tabsynth.config import DEFAULT_N, RunConfig
from tabsynth.data import CorrelationMatrix, Dataset, correlation_matrix, load_csv, write_csv
from tabsynth.errors import ConfigError, DomainError, SchemaError, ShapeError, TabsynthError
from tabsynth.evaluation import SCATTER_SEED, fidelity_report
from tabsynth.gan import GanConfig, GanModel, gan_sample, train_gan
from tabsynth.numerics import RngStream
from tabsynth.plots import render_heatmap, render_matrix, render_pairplot
from tabsynth.statistical import (
    BootstrapConfig,
    CopulaConfig,
    MultivariateConfig,
    gen_bootstrap,
    gen_copula,
    gen_multivariate,
)

log = logging.getLogger(__name__)

_CONFIG_TYPES = {
    "multivariate": (MultivariateConfig, "n"),
    "bootstrap": (BootstrapConfig, "n_out"),
    "copula": (CopulaConfig, "n"),
    "abm": (AbmConfig, "n_agents"),
    "gan": (GanConfig, None),
}
GAN_SAMPLE_STREAM = 5


def _jsonable(value: Any) -> Any:
    if isinstance(value, CorrelationMatrix):
        return value.values.tolist()
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def build_method_config(run: RunConfig):
    """Instantiate the generator config for ``run``, filling defaults."""
    cls, size_key = _CONFIG_TYPES[run.method]
    kwargs = {k: v for k, v in run.block.items() if k != "n" or size_key == "n"}
    if size_key is not None:
        kwargs.setdefault(size_key, DEFAULT_N)
    for key in ("labels", "metric_names", "means", "stds", "hidden"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    if "marginals" in kwargs:
        kwargs["marginals"] = tuple(tuple(m) for m in kwargs["marginals"])
    try:
        return cls(seed=run.seed, **kwargs)
    except (DomainError, SchemaError, ShapeError, TypeError) as exc:
        raise ConfigError(str(exc), field=run.method) from None


def resolved_block(method_cfg, extra: dict[str, Any] | None = None) -> dict[str, Any]:
    block = {f.name: _jsonable(getattr(method_cfg, f.name)) for f in fields(method_cfg)
             if f.name != "seed" and getattr(method_cfg, f.name) is not None}
    block.update(extra or {})
    return block


def _read_dataset(path: Path) -> Dataset:
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise TabsynthError(f"cannot read {str(path)!r}: {exc.strerror}") from None
    return load_csv(data)


def _write(path: Path, data: bytes | str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    path.write_bytes(data)


def manifest_path(dataset_path: Path) -> Path:
    return dataset_path.with_name(dataset_path.name + ".manifest.json")


def _gan_train(run: RunConfig, cfg: GanConfig) -> tuple[Dataset, GanModel, Any]:
    real = _read_dataset(run.input)
    model, tlog = train_gan(real, cfg)
    return real, model, tlog


def _write_gan_outputs(run: RunConfig, model: GanModel, tlog) -> None:
    model_path = run.outputs.get("model")
    if model_path is not None:
        _write(model_path, model.to_json())
        log_path = run.outputs.get("train_log", model_path.with_name(model_path.stem + ".log.csv"))
        _write(log_path, tlog.to_csv())


def generate(run: RunConfig) -> Dataset:
    """Run the configured generator and write dataset, manifest and optional report."""
    dataset_path = run.output("dataset")
    method_cfg = build_method_config(run)
    extra: dict[str, Any] = {}
    if run.method == "multivariate":
        synth = gen_multivariate(method_cfg)
    elif run.method == "bootstrap":
        synth = gen_bootstrap(_read_dataset(run.input), method_cfg)
    elif run.method == "copula":
        synth = gen_copula(method_cfg)
    elif run.method == "abm":
        source = _read_dataset(run.input) if method_cfg.score_column is not None else None
        synth = gen_abm(method_cfg, source)
    else:
        real, model, tlog = _gan_train(run, method_cfg)
        n = int(run.block.get("n", real.n_rows))
        if n < 0:
            raise ConfigError("must be nonnegative", field="gan.n")
        extra["n"] = n
        synth = gan_sample(model.generator, model.scaling, n,
                           RngStream(run.seed).spawn(GAN_SAMPLE_STREAM))
        _write_gan_outputs(run, model, tlog)

    _write(dataset_path, write_csv(synth))
    resolved = RunConfig(run.method, run.seed, resolved_block(method_cfg, extra),
                         run.input.resolve() if run.input else None,
                         {k: v.resolve() for k, v in run.outputs.items()})
    manifest = resolved.to_dict()
    manifest["manifest"] = {"rows": synth.n_rows, "columns": list(synth.names),
                            "tabsynth_version": __version__}
    _write(manifest_path(dataset_path), json.dumps(manifest, indent=1) + "\n")

    report_dir = run.outputs.get("report_dir")
    if report_dir is not None:
        title = f"{run.method} synthetic data"
        if synth.n_rows >= 2:
            _write(report_dir / "heatmap.svg",
                   render_heatmap(correlation_matrix(synth), title=f"Correlation heatmap: {title}"))
        _write(report_dir / "pairplot.svg", render_pairplot(synth, title=f"Pair plot: {title}"))
    log.info("wrote %d rows to %s", synth.n_rows, dataset_path)
    return synth


def train(run: RunConfig) -> GanModel:
    if run.method != "gan":
        raise ConfigError("train-gan needs method \"gan\"", field="method")
    run.output("model")
    cfg = build_method_config(run)
    _, model, tlog = _gan_train(run, cfg)
    _write_gan_outputs(run, model, tlog)
    return model


def evaluate(real_path: Path, synth_path: Path, out_dir: Path, seed: int = SCATTER_SEED):
    """Write report.json plus real/synthetic/difference heatmaps and a pair plot."""
    real = _read_dataset(Path(real_path))
    synth = _read_dataset(Path(synth_path))
    report = fidelity_report(real, synth, sample_seed=seed)
    out_dir = Path(out_dir)
    _write(out_dir / "report.json", report.to_json())
    _write(out_dir / "heatmap_real.svg", render_heatmap(report.real_corr, "Correlation: real"))
    _write(out_dir / "heatmap_synth.svg", render_heatmap(report.synth_corr, "Correlation: synthetic"))
    _write(out_dir / "heatmap_diff.svg",
           render_matrix(report.real_corr.labels, report.corr_diff,
                         title="Correlation difference (real - synthetic)", vmax=1.0))
    _write(out_dir / "pairplot.svg", render_pairplot(real, synth, title="Pair plot: real vs synthetic"))
    return report
