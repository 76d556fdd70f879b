import numpy as np

from .mlp import MlpParams, _forward_trace, backward, forward

# Inputs whose pre-activations sit this close to a ReLU kink are redrawn
KINK_MARGIN = 1e-3


def finite_difference_gradient(params: MlpParams, state, grad_output, h: float = 1e-5) -> np.ndarray:
    """Central differences of <grad_output, forward(params, state)> over the flat parameters."""
    flat = params.ravel()
    upstream = np.asarray(grad_output, dtype=np.float64)
    numeric = np.zeros_like(flat)
    for i in range(flat.size):
        plus = flat.copy()
        plus[i] += h
        minus = flat.copy()
        minus[i] -= h
        f_plus = float(np.sum(upstream * forward(params.unravel(plus), state)))
        f_minus = float(np.sum(upstream * forward(params.unravel(minus), state)))
        numeric[i] = (f_plus - f_minus) / (2.0 * h)
    return numeric


def max_relative_error(params: MlpParams, state, grad_output, h: float = 1e-5,
                       min_magnitude: float = 1e-8) -> float:
    analytic = backward(params, state, grad_output).ravel()
    numeric = finite_difference_gradient(params, state, grad_output, h)
    mask = np.abs(analytic) > min_magnitude
    if not np.any(mask):
        return 0.0
    denom = np.maximum(np.abs(analytic[mask]), np.abs(numeric[mask]))
    return float(np.max(np.abs(analytic[mask] - numeric[mask]) / denom))


def random_gradient_check(rng, n_nets: int = 100, layer_sizes=(2, 32, 3), batch: int = 4) -> float:
    """Worst relative error over `n_nets` random networks and inputs."""
    worst = 0.0
    for _ in range(n_nets):
        params = MlpParams.initialize(layer_sizes, rng)
        for b in params.biases:
            b[:] = rng.normal(0.0, 0.1, size=b.shape)
        state = _away_from_kinks(params, rng, batch)
        upstream = rng.normal(0.0, 1.0, size=(batch, layer_sizes[-1]))
        worst = max(worst, max_relative_error(params, state, upstream))
    return worst


def _away_from_kinks(params: MlpParams, rng, batch: int, attempts: int = 100) -> np.ndarray:
    for _ in range(attempts):
        state = rng.normal(0.0, 1.0, size=(batch, params.input_dim))
        _, _, pre_acts = _forward_trace(params, state)
        hidden = [z for z, act in zip(pre_acts, params.activations) if act == "relu"]
        if all(np.min(np.abs(z)) > KINK_MARGIN for z in hidden):
            return state
    return state
