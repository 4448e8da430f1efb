"""Minimal feed-forward Q-network: manual backprop, Adam, pseudo-Huber loss.

Everything is plain numpy in float64. The network is a fixed-depth MLP with
ReLU hidden layers and a linear output layer. Gradients are computed by hand
so they can be checked against finite differences.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

DEFAULT_LAYER_SIZES = (8, 200, 60, 4)

CHECKPOINT_MAGIC = b"RQNET1"


@dataclass
class NetworkParams:
    """Weights and biases of the MLP.

    weights[l] has shape (layer_sizes[l+1], layer_sizes[l]), biases[l] has
    length layer_sizes[l+1]. When `flat` is set, the per-layer arrays are
    views into that single 1-D buffer, which lets the optimizer update every
    parameter with a few whole-buffer vector operations.
    """

    layer_sizes: tuple
    weights: list = field(repr=False)
    biases: list = field(repr=False)
    flat: np.ndarray = field(default=None, repr=False)

    @property
    def n_layers(self):
        return len(self.layer_sizes) - 1


@dataclass
class Gradients:
    """Per-parameter partials, shape-congruent with NetworkParams."""

    weights: list
    biases: list
    flat: np.ndarray = field(default=None, repr=False)


@dataclass
class AdamState:
    """First/second moment accumulators plus hyperparameters."""

    m: Gradients
    v: Gradients
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps_num: float = 1e-8


def param_count(layer_sizes):
    return sum(
        fan_out * (fan_in + 1)
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:])
    )


def _flat_views(flat, layer_sizes):
    """Slice a flat buffer into (weights, biases) view lists, layer by layer
    in the order w0, b0, w1, b1, ..."""
    weights, biases = [], []
    offset = 0
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        weights.append(flat[offset:offset + fan_out * fan_in]
                       .reshape(fan_out, fan_in))
        offset += fan_out * fan_in
        biases.append(flat[offset:offset + fan_out])
        offset += fan_out
    return weights, biases


def init_params(layer_sizes=DEFAULT_LAYER_SIZES, rng=None):
    """He-uniform weight init (bound sqrt(6/fan_in)), zero biases."""
    if rng is None:
        rng = np.random.default_rng()
    layer_sizes = tuple(int(n) for n in layer_sizes)
    if len(layer_sizes) < 2 or any(n < 1 for n in layer_sizes):
        raise ValueError(f"bad layer sizes {layer_sizes}")
    flat = np.zeros(param_count(layer_sizes))
    weights, biases = _flat_views(flat, layer_sizes)
    for fan_in, w in zip(layer_sizes[:-1], weights):
        bound = np.sqrt(6.0 / fan_in)
        w[:] = rng.uniform(-bound, bound, size=w.shape)
    return NetworkParams(layer_sizes, weights, biases, flat)


def zero_like_grads(params):
    flat = np.zeros(param_count(params.layer_sizes))
    weights, biases = _flat_views(flat, params.layer_sizes)
    return Gradients(weights, biases, flat)


def init_adam_state(params, beta1=0.9, beta2=0.999, eps_num=1e-8):
    return AdamState(
        m=zero_like_grads(params),
        v=zero_like_grads(params),
        step_count=0,
        beta1=beta1,
        beta2=beta2,
        eps_num=eps_num,
    )


def forward(params, observation):
    """Q-values for a single observation (1-D input, 1-D output)."""
    x = np.asarray(observation, dtype=float)
    if x.ndim != 1 or x.shape[0] != params.layer_sizes[0]:
        raise ValueError(
            f"observation has shape {x.shape}, expected ({params.layer_sizes[0]},)"
        )
    n = params.n_layers
    for l in range(n):
        x = params.weights[l] @ x + params.biases[l]
        if l < n - 1:
            np.maximum(x, 0.0, out=x)
    return x


def forward_batch(params, observations):
    """Row-wise Q-values for a batch of observations (B x in -> B x out)."""
    x = np.asarray(observations, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError(f"batch has shape {x.shape}, expected (B, in) with B >= 1")
    if x.shape[1] != params.layer_sizes[0]:
        raise ValueError(
            f"batch width {x.shape[1]} != input size {params.layer_sizes[0]}"
        )
    n = params.n_layers
    for l in range(n):
        x = x @ params.weights[l].T + params.biases[l]
        if l < n - 1:
            np.maximum(x, 0.0, out=x)
    return x


def huber_loss(td_error, kappa=1.0):
    """Pseudo-Huber loss: kappa^2 * (sqrt(1 + (d/kappa)^2) - 1).

    Quadratic near zero, linear in the tails.
    """
    if kappa <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    d = np.asarray(td_error, dtype=float)
    return kappa * kappa * (np.sqrt(1.0 + (d / kappa) ** 2) - 1.0)


def backward(params, batch_obs, actions, targets, kappa=1.0):
    """Gradients of mean pseudo-Huber TD loss over a batch.

    Loss = (1/B) * sum_i huber(Q(s_i, a_i) - target_i, kappa). Only the
    selected action's output unit receives loss signal per sample. Returns
    (Gradients, mean_loss).
    """
    if kappa <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    x = np.asarray(batch_obs, dtype=float)
    actions = np.asarray(actions, dtype=int)
    targets = np.asarray(targets, dtype=float)
    if not np.all(np.isfinite(targets)):
        raise ValueError("non-finite targets")
    batch = x.shape[0]
    if actions.shape != (batch,) or targets.shape != (batch,):
        raise ValueError("actions/targets must be 1-D of batch length")
    n_out = params.layer_sizes[-1]
    if np.any(actions < 0) or np.any(actions >= n_out):
        raise ValueError("action id out of range")

    n = params.n_layers
    # Forward pass, keeping post-activation values per layer.
    acts = [x]
    h = x
    for l in range(n):
        h = h @ params.weights[l].T + params.biases[l]
        if l < n - 1:
            h = np.maximum(h, 0.0)
        acts.append(h)

    q_sel = acts[-1][np.arange(batch), actions]
    delta = q_sel - targets
    root = np.sqrt(1.0 + (delta / kappa) ** 2)
    mean_loss = float(np.mean(kappa * kappa * (root - 1.0)))
    dloss = delta / root / batch  # d mean_loss / d q_sel

    # Backward pass, written straight into a flat-backed Gradients.
    grads = zero_like_grads(params)
    grad_out = np.zeros_like(acts[-1])
    grad_out[np.arange(batch), actions] = dloss
    d = grad_out
    for l in range(n - 1, -1, -1):
        np.matmul(d.T, acts[l], out=grads.weights[l])
        d.sum(axis=0, out=grads.biases[l])
        if l > 0:
            d = (d @ params.weights[l]) * (acts[l] > 0)
    return grads, mean_loss


def adam_step(params, grads, state, lr):
    """One Adam update with bias correction, in place.

    Returns (params, state) for convenience. Refuses non-finite gradients.
    """
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    fused = (params.flat is not None and grads.flat is not None
             and state.m.flat is not None and state.v.flat is not None)
    if fused:
        if not np.isfinite(grads.flat).all():
            raise ValueError("non-finite gradients, update refused")
    else:
        for g in grads.weights + grads.biases:
            if not np.all(np.isfinite(g)):
                raise ValueError("non-finite gradients, update refused")
    state.step_count += 1
    t = state.step_count
    b1, b2 = state.beta1, state.beta2
    corr1 = 1.0 - b1**t
    corr2 = 1.0 - b2**t
    if fused:
        triples = [(params.flat, grads.flat, state.m.flat, state.v.flat)]
    else:
        triples = zip(
            params.weights + params.biases,
            grads.weights + grads.biases,
            state.m.weights + state.m.biases,
            state.v.weights + state.v.biases,
        )
    for theta, g, m, v in triples:
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        theta -= lr * (m / corr1) / (np.sqrt(v / corr2) + state.eps_num)
    return params, state


def clone_params(params):
    """Deep, independent copy (flat-backed)."""
    flat = np.zeros(param_count(params.layer_sizes))
    weights, biases = _flat_views(flat, params.layer_sizes)
    for dst, src in zip(weights + biases, params.weights + params.biases):
        dst[:] = src
    return NetworkParams(params.layer_sizes, weights, biases, flat)


def save_network(params, path):
    """Binary checkpoint: magic "RQNET1", u32 LE layer count, u32 LE layer
    sizes, then per layer the weight matrix (row-major) and bias vector as
    little-endian float64."""
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", len(params.layer_sizes)))
        for n in params.layer_sizes:
            fh.write(struct.pack("<I", n))
        for w, b in zip(params.weights, params.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_network(path):
    with open(path, "rb") as fh:
        magic = fh.read(len(CHECKPOINT_MAGIC))
        if magic != CHECKPOINT_MAGIC:
            raise ValueError(f"{path}: not a network checkpoint")
        (count,) = struct.unpack("<I", fh.read(4))
        layer_sizes = tuple(
            int(n) for n in struct.unpack(f"<{count}I", fh.read(4 * count))
        )
        flat = np.zeros(param_count(layer_sizes))
        weights, biases = _flat_views(flat, layer_sizes)
        for fan_in, fan_out, w, b in zip(layer_sizes[:-1], layer_sizes[1:],
                                         weights, biases):
            w[:] = np.frombuffer(fh.read(8 * fan_out * fan_in),
                                 dtype="<f8").reshape(fan_out, fan_in)
            b[:] = np.frombuffer(fh.read(8 * fan_out), dtype="<f8")
    return NetworkParams(layer_sizes, weights, biases, flat)
