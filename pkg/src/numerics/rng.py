import zlib
from typing import Any, Dict, Tuple

import numpy as np


def _purpose_key(purpose: str) -> int:
    return zlib.crc32(purpose.encode("utf-8"))


class Rng:
    """Seeded PCG64 stream; derive(purpose) gives independent named children"""

    def __init__(self, seed: int, path: Tuple[int, ...] = ()):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.path = tuple(path)
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def derive(self, purpose: str) -> "Rng":
        return Rng(self.seed, self.path + (_purpose_key(purpose),))

    def derive_index(self, index: int) -> "Rng":
        return Rng(self.seed, self.path + (int(index),))

    def random(self, size=None):
        return self.generator.random(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.generator.uniform(low, high, size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self.generator.normal(loc, scale, size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size)

    def dirichlet(self, alpha, size=None):
        return self.generator.dirichlet(alpha, size)

    def get_state(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "path": list(self.path),
            "bit_generator": self.generator.bit_generator.state,
        }

    @classmethod
    def from_state(cls, state: Dict[str, Any]) -> "Rng":
        rng = cls(state["seed"], tuple(state.get("path", ())))
        rng.generator.bit_generator.state = state["bit_generator"]
        return rng
