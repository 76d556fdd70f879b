import logging
from typing import NamedTuple, Optional

from src.envs import EnvSpec, NoiseConfig, make_env
from src.numerics import MlpParams
from src.pipeline import evaluate_policy

logger = logging.getLogger(__name__)


class RobustnessResult(NamedTuple):
    clean_mean: float
    noisy_mean: float
    ratio: Optional[float]

    @property
    def ratio_defined(self) -> bool:
        return self.ratio is not None


def robustness_eval(policy: MlpParams, env_spec: EnvSpec, noise: NoiseConfig, episodes: int,
                    rng) -> RobustnessResult:
    """Clean vs noisy greedy return, both rolled out from the same stream state"""
    state = rng.get_state()
    clean = evaluate_policy(policy, make_env(env_spec, action_noise_prob=0.0), episodes,
                            type(rng).from_state(state))
    noisy = evaluate_policy(policy, make_env(env_spec, action_noise_prob=noise.action_noise_prob), episodes,
                            type(rng).from_state(state))
    if clean.mean <= 0.0:
        logger.warning(f"Clean return {clean.mean:.3f} is not positive; robustness ratio undefined")
        return RobustnessResult(clean.mean, noisy.mean, None)
    return RobustnessResult(clean.mean, noisy.mean, noisy.mean / clean.mean)
