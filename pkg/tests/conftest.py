import numpy as np
import pytest

from src.envs import EnvSpec
from src.numerics import MlpParams, Rng
from src.pipeline import RunConfig


@pytest.fixture
def rng():
    return Rng(1234)


@pytest.fixture
def small_net(rng):
    net = MlpParams.initialize([3, 8, 2], rng)
    net.biases[0][:] = rng.normal(0.0, 0.1, size=8)
    return net


@pytest.fixture
def tiny_run():
    """A run small enough to finish in a second or two."""
    return RunConfig(
        env=EnvSpec(name="cartpole", max_steps=50),
        k=2,
        weak_hidden=[8],
        student_hidden=[16],
        total_steps=600,
        distill_steps=20,
        batch_size=16,
        learning_starts=16,
        eval_episodes=3,
        diversity_states=32,
    )


def scalar_forward(params: MlpParams, x) -> np.ndarray:
    """Straight-line loop evaluation of the affine + ReLU chain."""
    h = [float(v) for v in x]
    for w, b, act in zip(params.weights, params.biases, params.activations):
        out = []
        for j in range(w.shape[1]):
            z = b[j]
            for i in range(w.shape[0]):
                z += h[i] * w[i, j]
            out.append(max(z, 0.0) if act == "relu" else z)
        h = out
    return np.array(h)
