"""Small dense-network toolkit: forward/backward passes, BCE, Adam.

Inputs are row vectors; a batch is a ``(B, d)`` array. Weights are
stored ``(fan_out, fan_in)`` so a layer computes ``x @ W.T + b``.
"""
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import NumericalError, SchemaError
from .rng import Rng

ACTIVATIONS = ("identity", "sigmoid", "relu")
BCE_CLAMP = 1e-7
CHECKPOINT_FORMAT = "airfoilgan-mlp"
CHECKPOINT_VERSION = 1


def sigmoid(z):
    # split by sign so exp never overflows
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class MlpModel:
    layer_dims: list
    weights: list
    biases: list
    output_activation: str = "identity"
    hidden_activation: str = "relu"

    def __post_init__(self):
        if len(self.layer_dims) < 2:
            raise ValueError("need at least an input and an output dimension")
        if self.output_activation not in ACTIVATIONS or self.hidden_activation != "relu":
            raise ValueError(
                f"unsupported activations {self.hidden_activation!r}/{self.output_activation!r}"
            )
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            expect = (self.layer_dims[k + 1], self.layer_dims[k])
            if w.shape != expect or b.shape != (expect[0],):
                raise ValueError(f"layer {k}: weight {w.shape}/bias {b.shape}, expected {expect}")

    @property
    def n_layers(self):
        return len(self.weights)

    def parameters(self):
        """Parameters in a fixed order: W0, b0, W1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def parameter_count(self):
        return sum(p.size for p in self.parameters())

    def copy(self):
        return MlpModel(
            list(self.layer_dims),
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.output_activation,
            self.hidden_activation,
        )


@dataclass
class ForwardCache:
    inputs: list  # input to each layer
    pre: list  # pre-activation of each layer
    output: np.ndarray
    single: bool


def init_model(layer_dims, output_activation="identity", seed=0):
    """He-uniform weights (``U(-sqrt(6/fan_in), sqrt(6/fan_in))``), zero biases.

    ``seed`` may be an integer or an :class:`~airfoilgan.rng.Rng`.
    """
    rng = seed if isinstance(seed, Rng) else Rng(seed)
    dims = [int(d) for d in layer_dims]
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-limit, limit, (fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpModel(dims, weights, biases, output_activation)


def _activate(z, kind):
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "sigmoid":
        return sigmoid(z)
    return z


def forward(model, x):
    """Run the network, returning ``(output, cache)``."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    a = np.atleast_2d(x)
    if a.shape[1] != model.layer_dims[0]:
        raise ValueError(f"input has {a.shape[1]} features, model expects {model.layer_dims[0]}")
    inputs, pre = [], []
    last = model.n_layers - 1
    for k, (w, b) in enumerate(zip(model.weights, model.biases)):
        inputs.append(a)
        z = a @ w.T + b
        pre.append(z)
        a = _activate(z, model.output_activation if k == last else model.hidden_activation)
    out = a[0] if single else a
    return out, ForwardCache(inputs, pre, a, single)


def backward(model, cache, grad_output, param_grads=True):
    """Reverse-mode pass.

    Returns ``(param_grads, grad_input)`` with ``param_grads`` ordered as
    :meth:`MlpModel.parameters` (``None`` when ``param_grads=False``).
    The ReLU derivative at exactly 0 is 0.
    """
    g = np.atleast_2d(np.asarray(grad_output, dtype=np.float64))
    if g.shape != cache.output.shape:
        raise ValueError(f"output gradient shape {g.shape} does not match {cache.output.shape}")
    grads = [None] * (2 * model.n_layers)
    last = model.n_layers - 1
    for k in range(last, -1, -1):
        kind = model.output_activation if k == last else model.hidden_activation
        z = cache.pre[k]
        if kind == "relu":
            g = g * (z > 0)
        elif kind == "sigmoid":
            s = cache.output if k == last else sigmoid(z)
            g = g * s * (1.0 - s)
        if param_grads:
            grads[2 * k] = g.T @ cache.inputs[k]
            grads[2 * k + 1] = g.sum(axis=0)
        g = g @ model.weights[k]
    return (grads if param_grads else None), (g[0] if cache.single else g)


def bce_loss(p, target):
    """Binary cross-entropy and its derivative with respect to ``p``.

    ``p`` is clamped to ``[1e-7, 1 - 1e-7]``. The derivative is that of the
    clamped loss, so it is zero where ``p`` lies outside the interval.
    Works elementwise on arrays.
    """
    p = np.asarray(p, dtype=np.float64)
    pc = np.clip(p, BCE_CLAMP, 1.0 - BCE_CLAMP)
    t = np.asarray(target, dtype=np.float64)
    loss = -(t * np.log(pc) + (1.0 - t) * np.log1p(-pc))
    dloss = np.where(pc == p, -t / pc + (1.0 - t) / (1.0 - pc), 0.0)
    if np.ndim(loss) == 0:
        return float(loss), float(dloss)
    return loss, dloss


@dataclass
class AdamState:
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    @classmethod
    def for_params(cls, params, **hyper):
        return cls(m=[np.zeros_like(p) for p in params], v=[np.zeros_like(p) for p in params], **hyper)


def adam_step(state, params, grads):
    """One bias-corrected Adam update, applied to ``params`` in place."""
    if not state.m:
        state.m = [np.zeros_like(p) for p in params]
        state.v = [np.zeros_like(p) for p in params]
    if not (len(params) == len(grads) == len(state.m)):
        raise ValueError("parameter, gradient and moment lists differ in length")
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1**state.step
    c2 = 1.0 - b2**state.step
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if p.shape != g.shape or p.shape != m.shape:
            raise ValueError(f"shape mismatch: param {p.shape}, grad {g.shape}, moment {m.shape}")
        bad = kernels.adam_update(p, g, m, v, state.lr, b1, b2, c1, c2, state.eps)
        if bad:
            raise NumericalError(f"non-finite Adam update in {bad} entries at step {state.step}")
    return params, state


def model_to_dict(model, adam=None):
    d = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "layer_dims": list(model.layer_dims),
        "hidden_activation": model.hidden_activation,
        "output_activation": model.output_activation,
        "weights": [w.ravel().tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
    }
    if adam is not None:
        d["adam"] = {
            "lr": adam.lr,
            "beta1": adam.beta1,
            "beta2": adam.beta2,
            "eps": adam.eps,
            "step": adam.step,
            "m": [a.ravel().tolist() for a in adam.m],
            "v": [a.ravel().tolist() for a in adam.v],
        }
    return d


def model_from_dict(d):
    """Inverse of :func:`model_to_dict`; returns ``(model, adam_or_None)``."""
    if d.get("format") != CHECKPOINT_FORMAT:
        raise SchemaError(f"not an MLP checkpoint (format={d.get('format')!r})")
    if d.get("version") != CHECKPOINT_VERSION:
        raise SchemaError(f"unsupported MLP checkpoint version {d.get('version')!r}, expected {CHECKPOINT_VERSION}")
    dims = [int(x) for x in d["layer_dims"]]
    shapes = list(zip(dims[1:], dims[:-1]))
    try:
        weights = [np.array(w, dtype=np.float64).reshape(s) for w, s in zip(d["weights"], shapes)]
        biases = [np.array(b, dtype=np.float64) for b in d["biases"]]
    except ValueError as exc:
        raise SchemaError(f"weight arrays do not match layer_dims {dims}: {exc}") from None
    model = MlpModel(dims, weights, biases, d["output_activation"], d.get("hidden_activation", "relu"))
    adam = None
    if "adam" in d:
        a = d["adam"]
        pshapes = [p.shape for p in model.parameters()]
        adam = AdamState(
            lr=a["lr"], beta1=a["beta1"], beta2=a["beta2"], eps=a["eps"], step=a["step"],
            m=[np.array(x, dtype=np.float64).reshape(s) for x, s in zip(a["m"], pshapes)],
            v=[np.array(x, dtype=np.float64).reshape(s) for x, s in zip(a["v"], pshapes)],
        )
    return model, adam
