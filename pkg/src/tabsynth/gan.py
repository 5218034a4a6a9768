"""A small tabular GAN written directly in numpy.

Generator and discriminator share one architecture, a 3-layer perceptron

    f(x) = sigmoid(W3 relu(W2 relu(W1 x + b1) + b2) + b3)

trained with the non-saturating binary cross-entropy losses

    L_D = -[log D(x_real) + log(1 - D(G(z)))]
    L_G = -log D(G(z))

averaged over the batch, by plain SGD with strict 1:1 alternation. Data are
min-max scaled to [0, 1] per column because both heads are sigmoids; the
scaling travels with the model.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from tabsynth.data import Dataset
from tabsynth.errors import DegenerateColumnError, DomainError, EmptyInputError, SchemaError, ShapeError
from tabsynth.numerics import RngStream

log = logging.getLogger(__name__)

EPS = 1e-7
MODEL_FORMAT = "tabsynth-gan/1"
_PARAM_NAMES = ("W1", "b1", "W2", "b2", "W3", "b3")
# largest double below 1 and smallest positive double
_SIG_HI = 1.0 - 2.0**-53
_SIG_LO = np.nextafter(0.0, 1.0)


@dataclass
class MlpParams:
    """Weights ``W`` are ``(fan_out, fan_in)`` so a layer computes ``W @ x + b``."""

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    W3: np.ndarray
    b3: np.ndarray

    def __post_init__(self):
        for name in _PARAM_NAMES:
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        h1, n_in = self.W1.shape
        h2 = self.W2.shape[0]
        n_out = self.W3.shape[0]
        expected = {
            "W1": (h1, n_in), "b1": (h1,), "W2": (h2, h1),
            "b2": (h2,), "W3": (n_out, h2), "b3": (n_out,),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ShapeError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        if not all(np.all(np.isfinite(getattr(self, n))) for n in _PARAM_NAMES):
            raise DomainError("MLP parameters must be finite")

    @property
    def sizes(self) -> tuple[int, int, int, int]:
        return (self.W1.shape[1], self.W1.shape[0], self.W2.shape[0], self.W3.shape[0])

    def arrays(self) -> list[np.ndarray]:
        return [getattr(self, n) for n in _PARAM_NAMES]

    def copy(self) -> MlpParams:
        return MlpParams(*(a.copy() for a in self.arrays()))

    def to_dict(self) -> dict:
        out: dict = {"sizes": list(self.sizes)}
        for name in _PARAM_NAMES:
            out[name] = getattr(self, name).tolist()
        return out

    @classmethod
    def from_dict(cls, d: dict) -> MlpParams:
        params = cls(*(np.array(d[n], dtype=np.float64) for n in _PARAM_NAMES))
        if "sizes" in d and list(params.sizes) != list(d["sizes"]):
            raise ShapeError(f"stored sizes {d['sizes']} disagree with weights {params.sizes}")
        return params


def init_mlp(sizes: tuple[int, int, int, int], stream: RngStream) -> MlpParams:
    """Glorot-uniform weights, zero biases."""
    if any(s < 1 for s in sizes):
        raise DomainError(f"layer sizes must be positive, got {sizes}")
    arrays = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        u = stream.uniforms(fan_in * fan_out).reshape(fan_out, fan_in)
        arrays += [(2.0 * u - 1.0) * limit, np.zeros(fan_out)]
    return MlpParams(*arrays)


def relu(x):
    return np.maximum(x, 0.0)


def sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(over="ignore"):
        e = np.exp(-np.abs(x))
    out = np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    # saturation would otherwise round to exactly 0 or 1
    return np.clip(out, _SIG_LO, _SIG_HI)


def _check_input(p: MlpParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != p.sizes[0]:
        raise ShapeError(f"input of shape {x.shape} does not match network input size {p.sizes[0]}")
    return x


def _forward(p: MlpParams, x: np.ndarray):
    a1 = x @ p.W1.T + p.b1
    h1 = relu(a1)
    a2 = h1 @ p.W2.T + p.b2
    h2 = relu(a2)
    out = sigmoid(h2 @ p.W3.T + p.b3)
    return a1, h1, a2, h2, out


def mlp_forward(p: MlpParams, x) -> np.ndarray:
    """Batch forward pass; ``x`` is ``(batch, in)``, result ``(batch, out)`` in (0, 1)."""
    return _forward(p, _check_input(p, x))[-1]


def backprop_grads(p: MlpParams, x, d_output) -> tuple[MlpParams, np.ndarray]:
    """Gradients of a loss given its derivative ``d_output`` w.r.t. the network output.

    Returns parameter gradients shaped like ``p`` and the gradient w.r.t.
    the input batch (used to push the generator loss through the
    discriminator). The ReLU derivative at 0 is taken as 0.
    """
    x = _check_input(p, x)
    d_output = np.asarray(d_output, dtype=np.float64)
    if d_output.shape != (x.shape[0], p.sizes[3]):
        raise ShapeError(f"upstream gradient shape {d_output.shape} does not match output "
                         f"{(x.shape[0], p.sizes[3])}")
    a1, h1, a2, h2, out = _forward(p, x)
    d3 = d_output * out * (1.0 - out)
    gW3 = d3.T @ h2
    gb3 = d3.sum(axis=0)
    d2 = (d3 @ p.W3) * (a2 > 0)
    gW2 = d2.T @ h1
    gb2 = d2.sum(axis=0)
    d1 = (d2 @ p.W2) * (a1 > 0)
    gW1 = d1.T @ x
    gb1 = d1.sum(axis=0)
    return MlpParams(gW1, gb1, gW2, gb2, gW3, gb3), d1 @ p.W1


def _clamp(d):
    return np.clip(np.asarray(d, dtype=np.float64), EPS, 1.0 - EPS)


def disc_loss(d_real, d_fake) -> float:
    """Batch mean of ``-[log d_real + log(1 - d_fake)]``; inputs clamped to [EPS, 1-EPS]."""
    return float(np.mean(-np.log(_clamp(d_real))) + np.mean(-np.log1p(-_clamp(d_fake))))


def gen_loss(d_fake) -> float:
    return float(np.mean(-np.log(_clamp(d_fake))))


def disc_loss_grad(d_real, d_fake) -> tuple[np.ndarray, np.ndarray]:
    """Derivatives of :func:`disc_loss` w.r.t. each probability (zero where clamped)."""
    d_real = np.asarray(d_real, dtype=np.float64)
    d_fake = np.asarray(d_fake, dtype=np.float64)
    live_r = (d_real > EPS) & (d_real < 1.0 - EPS)
    live_f = (d_fake > EPS) & (d_fake < 1.0 - EPS)
    g_real = np.where(live_r, -1.0 / _clamp(d_real), 0.0) / d_real.size
    g_fake = np.where(live_f, 1.0 / (1.0 - _clamp(d_fake)), 0.0) / d_fake.size
    return g_real, g_fake


def gen_loss_grad(d_fake) -> np.ndarray:
    d_fake = np.asarray(d_fake, dtype=np.float64)
    live = (d_fake > EPS) & (d_fake < 1.0 - EPS)
    return np.where(live, -1.0 / _clamp(d_fake), 0.0) / d_fake.size


@dataclass(frozen=True)
class GanConfig:
    seed: int
    noise_dim: int = 8
    hidden: tuple[int, int] = (32, 32)
    learning_rate: float = 0.2
    batch_size: int = 64
    epochs: int = 6000

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if len(self.hidden) != 2:
            raise DomainError("hidden must give exactly two layer sizes")
        if min(self.noise_dim, self.batch_size, *self.hidden) < 1:
            raise DomainError("noise_dim, hidden sizes and batch_size must be at least 1")
        if self.epochs < 0:
            raise DomainError("epochs must be nonnegative")
        if not self.learning_rate > 0:
            raise DomainError("learning_rate must be positive")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


@dataclass(frozen=True)
class MinMaxScaling:
    names: tuple[str, ...]
    mins: tuple[float, ...]
    maxs: tuple[float, ...]

    @classmethod
    def fit(cls, d: Dataset) -> MinMaxScaling:
        lo = d.values.min(axis=0)
        hi = d.values.max(axis=0)
        for name, a, b in zip(d.names, lo, hi):
            if a == b:
                raise DegenerateColumnError(
                    name, f"column {name!r} is constant; degenerate min-max scaling"
                )
        return cls(d.names, tuple(map(float, lo)), tuple(map(float, hi)))

    def scale(self, values: np.ndarray) -> np.ndarray:
        lo, hi = np.asarray(self.mins), np.asarray(self.maxs)
        return (values - lo) / (hi - lo)

    def unscale(self, values: np.ndarray) -> np.ndarray:
        lo, hi = np.asarray(self.mins), np.asarray(self.maxs)
        # clip guards the last-bit rounding of lo + u*(hi - lo)
        return np.clip(lo + values * (hi - lo), lo, hi)


@dataclass
class TrainLog:
    """Per-step losses plus the post-training collapse check."""

    steps: list[tuple[int, float, float]] = field(default_factory=list)
    sample_std: list[float] = field(default_factory=list)
    real_std: list[float] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def d_losses(self) -> np.ndarray:
        return np.array([s[1] for s in self.steps])

    @property
    def g_losses(self) -> np.ndarray:
        return np.array([s[2] for s in self.steps])

    def to_csv(self) -> bytes:
        lines = ["step,d_loss,g_loss"]
        lines += [f"{i},{d:.17g},{g:.17g}" for i, d, g in self.steps]
        return ("\n".join(lines) + "\n").encode("utf-8")


@dataclass
class GanModel:
    generator: MlpParams
    discriminator: MlpParams
    scaling: MinMaxScaling
    config: GanConfig

    def to_json(self) -> str:
        doc = {
            "format": MODEL_FORMAT,
            "config": asdict(self.config),
            "scaling": {
                "columns": list(self.scaling.names),
                "min": list(self.scaling.mins),
                "max": list(self.scaling.maxs),
            },
            "generator": self.generator.to_dict(),
            "discriminator": self.discriminator.to_dict(),
        }
        # json writes floats with repr(), the shortest exact round-trip form
        return json.dumps(doc, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> GanModel:
        doc = json.loads(text)
        if doc.get("format") != MODEL_FORMAT:
            raise SchemaError(f"not a {MODEL_FORMAT} document")
        cfg = dict(doc["config"])
        cfg["hidden"] = tuple(cfg["hidden"])
        sc = doc["scaling"]
        return cls(
            generator=MlpParams.from_dict(doc["generator"]),
            discriminator=MlpParams.from_dict(doc["discriminator"]),
            scaling=MinMaxScaling(tuple(sc["columns"]), tuple(sc["min"]), tuple(sc["max"])),
            config=GanConfig(**cfg),
        )


def _sgd(p: MlpParams, g: MlpParams, lr: float) -> None:
    for name in _PARAM_NAMES:
        getattr(p, name).__isub__(lr * getattr(g, name))


def _add(a: MlpParams, b: MlpParams) -> MlpParams:
    return MlpParams(*(x + y for x, y in zip(a.arrays(), b.arrays())))


COLLAPSE_SAMPLES = 1000
COLLAPSE_RATIO = 0.05


def train_gan(real_data: Dataset, cfg: GanConfig) -> tuple[GanModel, TrainLog]:
    """Adversarial training; one discriminator step then one generator step per batch.

    Sub-streams of ``cfg.seed``: 0 generator init, 1 discriminator init,
    2 batch indices, 3 training noise, 4 collapse check.
    """
    if real_data.n_rows == 0:
        raise EmptyInputError("GAN training data has no rows")
    scaling = MinMaxScaling.fit(real_data)
    x_all = scaling.scale(real_data.values)
    k = real_data.n_cols
    root = RngStream(cfg.seed)
    gen = init_mlp((cfg.noise_dim, *cfg.hidden, k), root.spawn(0))
    disc = init_mlp((k, *cfg.hidden, 1), root.spawn(1))
    batch_stream, noise_stream = root.spawn(2), root.spawn(3)
    B, nz, lr = cfg.batch_size, cfg.noise_dim, cfg.learning_rate

    tlog = TrainLog()
    for step in range(cfg.epochs):
        x_real = x_all[batch_stream.integers(real_data.n_rows, B)]
        z = noise_stream.standard_normal(B * nz).reshape(B, nz)
        x_fake = mlp_forward(gen, z)
        d_real = mlp_forward(disc, x_real)
        d_fake = mlp_forward(disc, x_fake)
        d_loss = disc_loss(d_real, d_fake)
        g_real, g_fake = disc_loss_grad(d_real, d_fake)
        grad_r, _ = backprop_grads(disc, x_real, g_real)
        grad_f, _ = backprop_grads(disc, x_fake, g_fake)
        _sgd(disc, _add(grad_r, grad_f), lr)

        z = noise_stream.standard_normal(B * nz).reshape(B, nz)
        x_fake = mlp_forward(gen, z)
        d_fake = mlp_forward(disc, x_fake)
        g_loss = gen_loss(d_fake)
        _, dx = backprop_grads(disc, x_fake, gen_loss_grad(d_fake))
        grad_g, _ = backprop_grads(gen, z, dx)
        _sgd(gen, grad_g, lr)
        tlog.steps.append((step, d_loss, g_loss))

    model = GanModel(gen, disc, scaling, cfg)
    _collapse_check(model, x_all, root.spawn(4), tlog)
    return model, tlog


def _collapse_check(model: GanModel, x_scaled: np.ndarray, stream: RngStream, tlog: TrainLog):
    nz = model.generator.sizes[0]
    z = stream.standard_normal(COLLAPSE_SAMPLES * nz).reshape(COLLAPSE_SAMPLES, nz)
    sample_std = mlp_forward(model.generator, z).std(axis=0, ddof=1)
    real_std = x_scaled.std(axis=0, ddof=1) if x_scaled.shape[0] > 1 else np.zeros(x_scaled.shape[1])
    tlog.sample_std = [float(s) for s in sample_std]
    tlog.real_std = [float(s) for s in real_std]
    for name, s, r in zip(model.scaling.names, sample_std, real_std):
        if s < COLLAPSE_RATIO * r:
            msg = f"possible mode collapse: column {name!r} sample std {s:.3g} < 5% of real std {r:.3g}"
            tlog.warnings.append(msg)
            log.warning(msg)


def gan_sample(g: MlpParams, scaling: MinMaxScaling, n: int, stream: RngStream) -> Dataset:
    """Draw ``n`` rows from generator ``g`` in the original column units."""
    if n < 0:
        raise DomainError("sample count must be nonnegative")
    if g.sizes[3] != len(scaling.names):
        raise ShapeError(f"generator emits {g.sizes[3]} columns, scaling has {len(scaling.names)}")
    nz = g.sizes[0]
    z = stream.standard_normal(n * nz).reshape(n, nz)
    out = mlp_forward(g, z) if n else np.empty((0, g.sizes[3]))
    return Dataset(scaling.names, scaling.unscale(out))
