"""Dense multi-layer perceptron with an explicit reverse pass.

Layers compute ``z = x @ W + b``; hidden layers apply the activation,
the output layer is linear (one Q-value per action). ``forward`` and
``backward`` work on a single vector or a batch of row vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

import numpy as np

from rdq_lab.errors import TrainingError, UsageError

ACTIVATIONS = ("relu", "tanh")


@dataclass
class MlpParams:
    """Weights ``(fan_in, fan_out)`` and biases ``(fan_out,)`` per layer."""

    weights: List[np.ndarray]
    biases: List[np.ndarray]
    activation: str = "relu"

    def __post_init__(self) -> None:
        if self.activation not in ACTIVATIONS:
            raise UsageError(f"Unknown activation '{self.activation}'.")
        if len(self.weights) != len(self.biases) or not self.weights:
            raise UsageError("MlpParams needs one bias per weight matrix and at least one layer.")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise UsageError(f"Layer {i}: weight {w.shape} and bias {b.shape} do not match.")
            if i and self.weights[i - 1].shape[1] != w.shape[0]:
                raise UsageError(f"Layer {i} input size does not match layer {i - 1} output.")

    @property
    def layer_sizes(self) -> List[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @property
    def input_size(self) -> int:
        return self.weights[0].shape[0]

    @property
    def output_size(self) -> int:
        return self.weights[-1].shape[1]

    def arrays(self) -> List[np.ndarray]:
        """Parameter arrays in (W0, b0, W1, b1, ...) order."""
        out: List[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def copy(self) -> "MlpParams":
        return MlpParams(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            activation=self.activation,
        )

    def zeros_like(self) -> "MlpParams":
        return MlpParams(
            weights=[np.zeros_like(w) for w in self.weights],
            biases=[np.zeros_like(b) for b in self.biases],
            activation=self.activation,
        )

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(arr)) for arr in self.arrays())

    def flatten(self) -> np.ndarray:
        return np.concatenate([arr.ravel() for arr in self.arrays()])

    def unflatten(self, theta: np.ndarray) -> "MlpParams":
        """Params of the same shapes filled from the flat vector *theta*."""
        arrays = []
        offset = 0
        for arr in self.arrays():
            arrays.append(theta[offset : offset + arr.size].reshape(arr.shape).copy())
            offset += arr.size
        return MlpParams(weights=arrays[0::2], biases=arrays[1::2], activation=self.activation)


@dataclass
class ForwardCache:
    """Per-layer inputs and pre-activations kept for :func:`backward`."""

    inputs: List[np.ndarray] = field(default_factory=list)
    pre_activations: List[np.ndarray] = field(default_factory=list)
    squeezed: bool = False


def init_params(
    layer_sizes: Sequence[int],
    rng: np.random.Generator,
    activation: str = "relu",
) -> MlpParams:
    """Uniform initialization in ``±1/sqrt(fan_in)`` for weights and biases."""
    if len(layer_sizes) < 2 or any(size < 1 for size in layer_sizes):
        raise UsageError(f"Invalid layer sizes {list(layer_sizes)}.")
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(rng.uniform(-bound, bound, size=(fan_out,)))
    return MlpParams(weights=weights, biases=biases, activation=activation)


def _activate(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return np.maximum(z, 0.0)
    return np.tanh(z)


def _activation_grad(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return (z > 0.0).astype(z.dtype)
    return 1.0 - np.tanh(z) ** 2


def forward_with_cache(p: MlpParams, x: np.ndarray) -> Tuple[np.ndarray, ForwardCache]:
    x = np.asarray(x, dtype=np.float64)
    squeezed = x.ndim == 1
    batch = x[None, :] if squeezed else x
    if batch.ndim != 2 or batch.shape[1] != p.input_size:
        raise UsageError(
            f"Input of shape {x.shape} does not match network input size {p.input_size}."
        )
    cache = ForwardCache(squeezed=squeezed)
    h = batch
    last = len(p.weights) - 1
    for i, (w, b) in enumerate(zip(p.weights, p.biases)):
        cache.inputs.append(h)
        z = h @ w + b
        cache.pre_activations.append(z)
        h = z if i == last else _activate(z, p.activation)
    return (h[0] if squeezed else h), cache


def forward(p: MlpParams, x: np.ndarray) -> np.ndarray:
    """Q-values for one state vector (shape ``(|A|,)``) or a batch (``(n, |A|)``)."""
    q, _ = forward_with_cache(p, x)
    return q


def backward(p: MlpParams, cache: ForwardCache, dq: np.ndarray) -> MlpParams:
    """Gradients of a scalar loss given ``dq = dLoss/dQ`` for the cached forward pass."""
    delta = np.asarray(dq, dtype=np.float64)
    if cache.squeezed:
        delta = delta[None, :]
    if not np.all(np.isfinite(delta)):
        raise TrainingError("non-finite loss gradient reached the network")
    grads_w: List[np.ndarray] = [np.empty(0)] * len(p.weights)
    grads_b: List[np.ndarray] = [np.empty(0)] * len(p.weights)
    for i in range(len(p.weights) - 1, -1, -1):
        grads_w[i] = cache.inputs[i].T @ delta
        grads_b[i] = delta.sum(axis=0)
        if i:
            delta = (delta @ p.weights[i].T) * _activation_grad(
                cache.pre_activations[i - 1], p.activation
            )
    grads = MlpParams(weights=grads_w, biases=grads_b, activation=p.activation)
    if not grads.is_finite():
        raise TrainingError("non-finite parameter gradient")
    return grads


def finite_difference_grad(
    loss_fn: Callable[[MlpParams], float],
    p: MlpParams,
    delta: float = 1e-5,
) -> MlpParams:
    """Central-difference gradient of *loss_fn* at *p*, for checking :func:`backward`."""
    theta = p.flatten()
    numeric = np.zeros_like(theta)
    for i in range(theta.size):
        plus = theta.copy()
        plus[i] += delta
        minus = theta.copy()
        minus[i] -= delta
        numeric[i] = (loss_fn(p.unflatten(plus)) - loss_fn(p.unflatten(minus))) / (2 * delta)
    return p.unflatten(numeric)
