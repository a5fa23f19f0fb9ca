"""Conditional GAN whose generator loss adds the cyclic smoothing penalty.

The generator maps ``[noise (128), label (6)]`` to 38 loop y-values; the
discriminator scores ``[curve (38), label (6)]`` as real or generated.
Generator objective: non-saturating BCE toward "real" plus the batch mean
of the smoothing loss. ``omega = 0`` gives the plain conditional GAN.
"""
import csv
import json
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .dataset import LABEL_DIM, ClassLabel, encode_label
from .errors import NumericalError, SchemaError
from .geometry import N_COORDS
from .nn import (
    AdamState,
    adam_step,
    backward,
    bce_loss,
    forward,
    init_model,
    model_from_dict,
    model_to_dict,
)
from .rng import Rng

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "airfoilgan-gan"
CHECKPOINT_VERSION = 1


@dataclass
class GanConfig:
    noise_dim: int = 128
    label_dim: int = LABEL_DIM
    out_dim: int = N_COORDS
    omega: float = 10.0
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epochs: int = 30000
    batch_size: int = 64
    d_steps: int = 1
    seed: int = 0
    g_hidden: tuple = (256, 256, 256)
    d_hidden: tuple = (256, 256)

    def __post_init__(self):
        self.g_hidden = tuple(int(h) for h in self.g_hidden)
        self.d_hidden = tuple(int(h) for h in self.d_hidden)
        for name in ("noise_dim", "label_dim", "out_dim", "batch_size", "d_steps"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.omega < 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")

    @property
    def g_dims(self):
        return [self.noise_dim + self.label_dim, *self.g_hidden, self.out_dim]

    @property
    def d_dims(self):
        return [self.out_dim + self.label_dim, *self.d_hidden, 1]


@dataclass
class GanModel:
    generator: object
    discriminator: object
    config: GanConfig
    g_adam: AdamState = None
    d_adam: AdamState = None

    def __post_init__(self):
        c = self.config
        if self.generator.layer_dims[0] != c.noise_dim + c.label_dim or self.generator.layer_dims[-1] != c.out_dim:
            raise ValueError("generator dimensions do not match the config")
        if self.discriminator.layer_dims[0] != c.out_dim + c.label_dim or self.discriminator.layer_dims[-1] != 1:
            raise ValueError("discriminator dimensions do not match the config")
        if self.discriminator.output_activation != "sigmoid":
            raise ValueError("discriminator must end in a sigmoid")
        if self.g_adam is None:
            self.g_adam = AdamState.for_params(self.generator.parameters(), lr=c.lr, beta1=c.beta1, beta2=c.beta2)
        if self.d_adam is None:
            self.d_adam = AdamState.for_params(self.discriminator.parameters(), lr=c.lr, beta1=c.beta1, beta2=c.beta2)


@dataclass
class TrainReport:
    g_loss: list = field(default_factory=list)
    d_loss: list = field(default_factory=list)
    ce: list = field(default_factory=list)
    smooth: list = field(default_factory=list)

    def __len__(self):
        return len(self.g_loss)

    def append(self, g, d, ce, smooth):
        self.g_loss.append(g)
        self.d_loss.append(d)
        self.ce.append(ce)
        self.smooth.append(smooth)

    def save_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["epoch", "g_loss", "d_loss", "ce", "smooth"])
            for i, row in enumerate(zip(self.g_loss, self.d_loss, self.ce, self.smooth), start=1):
                w.writerow([i, *(repr(float(v)) for v in row)])


def init_gan(config):
    rng = Rng(config.seed)
    g = init_model(config.g_dims, "identity", rng.spawn())
    d = init_model(config.d_dims, "sigmoid", rng.spawn())
    return GanModel(g, d, config)


def _label_rows(label, n):
    if isinstance(label, (str, ClassLabel)):
        label = encode_label(label)
    v = np.asarray(label, dtype=np.float64)
    return np.broadcast_to(v, (n, v.shape[-1])) if v.ndim == 1 else v


def sample_noise(rng, n, dim):
    return rng.normal((n, dim))


def generator_forward(model, noise, labels):
    y, _ = forward(model.generator, np.hstack([noise, labels]))
    return y


def sample_class(model, label, n, rng):
    """``n`` independent curves for one class, shape ``(n, 38)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    noise = sample_noise(rng, n, model.config.noise_dim)
    return generator_forward(model, noise, _label_rows(label, n))


def generate(model, label, rng):
    return sample_class(model, label, 1, rng)[0]


def discriminator_loss(model, real, fake, labels):
    """Mean BCE over real (target 1) and fake (target 0) rows.

    Returns ``(loss, grads)``; ``grads`` follow
    ``model.discriminator.parameters()`` order.
    """
    real = np.atleast_2d(real)
    fake = np.atleast_2d(fake)
    if real.shape != fake.shape or len(real) == 0:
        raise ValueError(f"real {real.shape} and fake {fake.shape} batches must match and be nonempty")
    labels = _label_rows(labels, len(real))
    b = len(real)
    x = np.vstack([np.hstack([real, labels]), np.hstack([fake, labels])])
    target = np.r_[np.ones(b), np.zeros(b)][:, None]
    p, cache = forward(model.discriminator, x)
    loss, dp = bce_loss(p, target)
    grads, _ = backward(model.discriminator, cache, dp / (2 * b))
    return float(loss.mean()), grads


def _smoothing_term(y, omega):
    """Batch-mean smoothing loss and its gradient with respect to ``y``."""
    losses, grad = kernels.cyclic_smoothing(y, omega)
    return float(losses.mean()), grad / len(y)


def generator_loss(model, noise, labels, omega=None):
    """Composite generator loss.

    Returns ``(loss, ce_part, smooth_part, grads)`` with ``grads`` in
    ``model.generator.parameters()`` order. Discriminator parameters are
    read but never modified.
    """
    omega = model.config.omega if omega is None else omega
    noise = np.atleast_2d(noise)
    b = len(noise)
    labels = _label_rows(labels, b)
    y, g_cache = forward(model.generator, np.hstack([noise, labels]))
    p, d_cache = forward(model.discriminator, np.hstack([y, labels]))
    ce, dp = bce_loss(p, np.ones_like(p))
    ce_part = float(ce.mean())
    _, dx = backward(model.discriminator, d_cache, dp / b, param_grads=False)
    dy = dx[:, : model.config.out_dim]
    smooth_part = 0.0
    if omega:
        smooth_part, dsmooth = _smoothing_term(y, omega)
        dy = dy + dsmooth
    grads, _ = backward(model.generator, g_cache, dy)
    return ce_part + smooth_part, ce_part, smooth_part, grads


def _check_finite(epoch, name, value):
    if not np.isfinite(value):
        raise NumericalError(f"epoch {epoch}: non-finite {name} loss ({value})")


def train(dataset, config, model=None, progress=None):
    """Alternate discriminator and generator updates over shuffled batches.

    ``progress``, if given, is called as ``progress(epoch, report)`` after
    every epoch. Returns ``(model, report)``.
    """
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    model = init_gan(config) if model is None else model
    report = TrainReport()
    real_all = dataset.y
    labels_all = dataset.label_matrix()
    n = len(dataset)
    rng = Rng(config.seed ^ 0x5DEECE66D)
    g_params = model.generator.parameters()
    d_params = model.discriminator.parameters()
    bs = config.batch_size

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        sums = np.zeros(4)
        n_batches = 0
        for start in range(0, n, bs):
            idx = order[start : start + bs]
            real = real_all[idx]
            labels = labels_all[idx]
            b = len(idx)
            for _ in range(config.d_steps):
                fake = generator_forward(model, sample_noise(rng, b, config.noise_dim), labels)
                d_loss, d_grads = discriminator_loss(model, real, fake, labels)
                _check_finite(epoch, "discriminator", d_loss)
                adam_step(model.d_adam, d_params, d_grads)
            noise = sample_noise(rng, b, config.noise_dim)
            g_loss, ce, smooth, g_grads = generator_loss(model, noise, labels, config.omega)
            _check_finite(epoch, "generator", g_loss)
            adam_step(model.g_adam, g_params, g_grads)
            sums += (g_loss, d_loss, ce, smooth)
            n_batches += 1
        report.append(*(float(v) for v in sums / n_batches))
        if progress is not None:
            progress(epoch, report)
    return model, report


def gan_to_dict(model, with_optimizer=False):
    return {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "config": asdict(model.config),
        "generator": model_to_dict(model.generator, model.g_adam if with_optimizer else None),
        "discriminator": model_to_dict(model.discriminator, model.d_adam if with_optimizer else None),
    }


def gan_from_dict(d):
    if d.get("format") != CHECKPOINT_FORMAT:
        raise SchemaError(f"not a GAN checkpoint (format={d.get('format')!r})")
    if d.get("version") != CHECKPOINT_VERSION:
        raise SchemaError(f"unsupported GAN checkpoint version {d.get('version')!r}, expected {CHECKPOINT_VERSION}")
    config = GanConfig(**d["config"])
    g, g_adam = model_from_dict(d["generator"])
    dm, d_adam = model_from_dict(d["discriminator"])
    return GanModel(g, dm, config, g_adam, d_adam)


def save_checkpoint(model, path, with_optimizer=False):
    with open(path, "w") as fh:
        json.dump(gan_to_dict(model, with_optimizer), fh, separators=(",", ":"))
        fh.write("\n")


def load_checkpoint(path):
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    return gan_from_dict(d)
