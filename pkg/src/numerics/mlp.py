import hashlib
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from src.errors import NumericError, ShapeError

CHECKPOINT_SCHEMA_VERSION = 1
ACTIVATIONS = ("relu", "identity")


class MlpParams:
    """Weights and biases of a dense ReLU network with a linear output layer.

    weights[i] has shape (layer_sizes[i], layer_sizes[i + 1]); inputs are
    row vectors, so a batch of shape (B, in) maps to (B, out).
    """

    def __init__(self, layer_sizes: Sequence[int], weights: List[np.ndarray],
                 biases: List[np.ndarray], activations: Optional[List[str]] = None):
        self.layer_sizes = [int(n) for n in layer_sizes]
        self.weights = [np.asarray(w, dtype=np.float64) for w in weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in biases]
        n_layers = len(self.layer_sizes) - 1
        if activations is None:
            activations = ["relu"] * (n_layers - 1) + ["identity"]
        self.activations = list(activations)
        self.validate()

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_dim(self) -> int:
        return self.layer_sizes[-1]

    def validate(self):
        if len(self.layer_sizes) < 2 or any(n <= 0 for n in self.layer_sizes):
            raise ShapeError(f"Invalid layer sizes: {self.layer_sizes}")
        n_layers = len(self.layer_sizes) - 1
        if len(self.weights) != n_layers or len(self.biases) != n_layers:
            raise ShapeError(f"Expected {n_layers} weight/bias pairs")
        if len(self.activations) != n_layers:
            raise ShapeError(f"Expected {n_layers} activations, got {len(self.activations)}")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            expected = (self.layer_sizes[i], self.layer_sizes[i + 1])
            if w.shape != expected:
                raise ShapeError(f"Layer {i} weight shape {w.shape} != {expected}")
            if b.shape != (self.layer_sizes[i + 1],):
                raise ShapeError(f"Layer {i} bias shape {b.shape} != {(self.layer_sizes[i + 1],)}")
        for act in self.activations:
            if act not in ACTIVATIONS:
                raise ShapeError(f"Unknown activation: {act}")
        if self.activations[-1] != "identity":
            raise ShapeError("Output layer activation must be identity")

    @classmethod
    def zeros(cls, layer_sizes: Sequence[int]) -> "MlpParams":
        sizes = list(layer_sizes)
        weights = [np.zeros((sizes[i], sizes[i + 1])) for i in range(len(sizes) - 1)]
        biases = [np.zeros(sizes[i + 1]) for i in range(len(sizes) - 1)]
        return cls(sizes, weights, biases)

    @classmethod
    def initialize(cls, layer_sizes: Sequence[int], rng) -> "MlpParams":
        """He-normal weights, zero biases."""
        sizes = list(layer_sizes)
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return cls(sizes, weights, biases)

    def zeros_like(self) -> "MlpParams":
        return MlpParams(self.layer_sizes,
                         [np.zeros_like(w) for w in self.weights],
                         [np.zeros_like(b) for b in self.biases],
                         self.activations)

    def copy(self) -> "MlpParams":
        return MlpParams(self.layer_sizes,
                         [w.copy() for w in self.weights],
                         [b.copy() for b in self.biases],
                         self.activations)

    def arrays(self) -> List[np.ndarray]:
        """Parameter arrays in a fixed order: w0, b0, w1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out

    def ravel(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    def unravel(self, flat: np.ndarray) -> "MlpParams":
        flat = np.asarray(flat, dtype=np.float64)
        if flat.size != count_parameters(self):
            raise ShapeError(f"Flat vector has {flat.size} entries, expected {count_parameters(self)}")
        weights, biases, offset = [], [], 0
        for w, b in zip(self.weights, self.biases):
            weights.append(flat[offset:offset + w.size].reshape(w.shape))
            offset += w.size
            biases.append(flat[offset:offset + b.size].copy())
            offset += b.size
        return MlpParams(self.layer_sizes, weights, biases, self.activations)

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())

    def checksum(self) -> str:
        digest = hashlib.sha256()
        for a in self.arrays():
            digest.update(np.ascontiguousarray(a).tobytes())
        return digest.hexdigest()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": CHECKPOINT_SCHEMA_VERSION,
            "layer_sizes": list(self.layer_sizes),
            "activations": list(self.activations),
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MlpParams":
        version = data.get("schema_version")
        if version != CHECKPOINT_SCHEMA_VERSION:
            raise ShapeError(f"Unsupported checkpoint schema version: {version}")
        return cls(data["layer_sizes"],
                   [np.array(w, dtype=np.float64) for w in data["weights"]],
                   [np.array(b, dtype=np.float64) for b in data["biases"]],
                   data.get("activations"))

    def __repr__(self) -> str:
        return f"MlpParams(layer_sizes={self.layer_sizes})"


def _as_input(params: MlpParams, state) -> np.ndarray:
    x = np.asarray(state, dtype=np.float64)
    if x.ndim not in (1, 2) or x.shape[-1] != params.input_dim:
        raise ShapeError(f"State shape {x.shape} does not match input dim {params.input_dim}")
    return x


def _forward_trace(params: MlpParams, x: np.ndarray):
    """Forward pass that keeps pre-activations"""
    inputs, pre_acts = [], []
    h = x
    for w, b, act in zip(params.weights, params.biases, params.activations):
        inputs.append(h)
        z = h @ w + b
        pre_acts.append(z)
        h = np.maximum(z, 0.0) if act == "relu" else z
    return h, inputs, pre_acts


def forward(params: MlpParams, state) -> np.ndarray:
    """Q-values for one state (1-D) or a batch of states (2-D)."""
    x = _as_input(params, state)
    out, _, _ = _forward_trace(params, x)
    return out


def backward(params: MlpParams, state, grad_output) -> MlpParams:
    """Gradient of a scalar loss w.r.t. every parameter.

    `grad_output` is dLoss/dOutput with the same shape as `forward(params, state)`;
    batch contributions are summed, so callers fold any 1/B into it.
    """
    x = _as_input(params, state)
    g = np.asarray(grad_output, dtype=np.float64)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(g))):
        raise NumericError("Non-finite input to backward pass")
    single = x.ndim == 1
    if single:
        x = x[None, :]
        g = g.reshape(1, -1)
    if g.shape != (x.shape[0], params.output_dim):
        raise ShapeError(f"Output gradient shape {g.shape} != {(x.shape[0], params.output_dim)}")

    _, inputs, pre_acts = _forward_trace(params, x)
    n_layers = len(params.weights)
    grad_w: List[Optional[np.ndarray]] = [None] * n_layers
    grad_b: List[Optional[np.ndarray]] = [None] * n_layers
    delta = g
    for i in reversed(range(n_layers)):
        if params.activations[i] == "relu":
            delta = delta * (pre_acts[i] > 0.0)
        grad_w[i] = inputs[i].T @ delta
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = delta @ params.weights[i].T
    grads = MlpParams(params.layer_sizes, grad_w, grad_b, params.activations)
    if not grads.is_finite():
        raise NumericError("Non-finite gradient")
    return grads


def count_parameters(params: Union[MlpParams, Sequence[int]]) -> int:
    sizes = params.layer_sizes if isinstance(params, MlpParams) else list(params)
    return int(sum(n_in * n_out + n_out for n_in, n_out in zip(sizes[:-1], sizes[1:])))


def layer_sizes_for(input_dim: int, hidden: Sequence[int], output_dim: int) -> List[int]:
    return [int(input_dim), *[int(h) for h in hidden], int(output_dim)]
