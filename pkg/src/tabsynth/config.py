"""Run configuration documents (JSON).

A config names one generation method, a mandatory seed, input/output paths
and exactly one method block::

    {
      "method": "copula",
      "seed": 7,
      "output": {"dataset": "out/copula.csv", "report_dir": "out/copula"},
      "copula": {"n": 10000}
    }

Relative paths resolve against the directory holding the config file.
Unknown keys are errors. A top-level ``"manifest"`` key is ignored, so a
run manifest can be fed back in as a config.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from tabsynth.errors import ConfigError

METHODS = ("multivariate", "bootstrap", "copula", "abm", "gan")
DEFAULT_N = 10_000

_num = (int, float)
# field -> expected type: a type, a tuple of types, or a one-element list meaning "list of"
SCHEMAS: dict[str, dict[str, Any]] = {
    "multivariate": {"n": int, "labels": [str], "means": [_num], "stds": [_num],
                     "target_corr": [[_num]], "jitter": _num},
    "bootstrap": {"n_out": int, "noise": _num, "noise_scale": str, "mode": str},
    "copula": {"n": int, "labels": [str], "latent_corr": [[_num]], "marginals": [[_num]],
               "scale": _num, "jitter": _num},
    "abm": {"n_agents": int, "metric_names": [str], "sigma": _num, "score_low": _num,
            "score_high": _num, "score_column": str},
    "gan": {"noise_dim": int, "hidden": [int], "learning_rate": _num, "batch_size": int,
            "epochs": int, "n": int},
}
OUTPUT_KEYS = ("dataset", "report_dir", "model", "train_log")
TOP_KEYS = {"method", "seed", "input", "output", "manifest", *METHODS}


@dataclass
class RunConfig:
    method: str
    seed: int
    block: dict[str, Any]
    input: Path | None = None
    outputs: dict[str, Path] = field(default_factory=dict)

    def output(self, key: str) -> Path:
        if key not in self.outputs:
            raise ConfigError("missing required field", field=f"output.{key}")
        return self.outputs[key]

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"method": self.method, "seed": self.seed}
        if self.input is not None:
            doc["input"] = str(self.input)
        doc["output"] = {k: str(v) for k, v in sorted(self.outputs.items())}
        doc[self.method] = self.block
        return doc


def _type_name(expected) -> str:
    if isinstance(expected, list):
        return f"list of {_type_name(expected[0])}"
    if expected is _num:
        return "number"
    return expected.__name__


def _check(value, expected, path: str) -> None:
    if isinstance(expected, list):
        if not isinstance(value, list):
            raise ConfigError(f"expected {_type_name(expected)}, got {type(value).__name__}", field=path)
        for i, item in enumerate(value):
            _check(item, expected[0], f"{path}[{i}]")
        return
    ok = isinstance(value, expected) and not isinstance(value, bool)
    if not ok:
        raise ConfigError(f"expected {_type_name(expected)}, got {json.dumps(value)}", field=path)


def _check_seed(value, path: str = "seed") -> int:
    if isinstance(value, bool) or not isinstance(value, int) or not 0 <= value < 2**64:
        raise ConfigError("must be an integer in [0, 2**64)", field=path)
    return value


def parse_config(text: str, base_dir: Path | str = ".", seed_override: int | None = None) -> RunConfig:
    """Validate a JSON config document and resolve its paths against ``base_dir``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    base = Path(base_dir)

    for key in doc:
        if key not in TOP_KEYS:
            raise ConfigError("unknown field", field=key)
    if "method" not in doc:
        raise ConfigError("missing required field", field="method")
    method = doc["method"]
    if method not in METHODS:
        raise ConfigError(f"must be one of {', '.join(METHODS)}; got {json.dumps(method)}",
                          field="method")
    if "seed" not in doc:
        raise ConfigError("missing required field (seeds are mandatory)", field="seed")
    seed = _check_seed(doc["seed"])
    if seed_override is not None:
        seed = _check_seed(seed_override, "--seed")

    blocks = [m for m in METHODS if m in doc]
    if blocks != [method]:
        raise ConfigError(f"exactly one method block, {json.dumps(method)}, must be present; "
                          f"found {blocks or 'none'}", field=method)
    block = doc[method]
    if not isinstance(block, dict):
        raise ConfigError("method block must be a JSON object", field=method)
    schema = SCHEMAS[method]
    for key, value in block.items():
        if key not in schema:
            raise ConfigError("unknown field", field=f"{method}.{key}")
        _check(value, schema[key], f"{method}.{key}")

    input_path = None
    if "input" in doc:
        _check(doc["input"], str, "input")
        if not doc["input"]:
            raise ConfigError("path must be nonempty", field="input")
        input_path = base / doc["input"]
    needs_input = method in ("bootstrap", "gan") or (method == "abm" and "score_column" in block)
    if needs_input and input_path is None:
        raise ConfigError(f"missing required field for method {method}", field="input")

    outputs: dict[str, Path] = {}
    out = doc.get("output", {})
    if not isinstance(out, dict):
        raise ConfigError("must be a JSON object", field="output")
    for key, value in out.items():
        if key not in OUTPUT_KEYS:
            raise ConfigError("unknown field", field=f"output.{key}")
        _check(value, str, f"output.{key}")
        if not value:
            raise ConfigError("path must be nonempty", field=f"output.{key}")
        outputs[key] = base / value

    return RunConfig(method=method, seed=seed, block=dict(block), input=input_path, outputs=outputs)


def load_config(path: Path | str, seed_override: int | None = None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    return parse_config(text, path.resolve().parent, seed_override)
