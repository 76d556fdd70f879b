from .buffer import Transition, TransitionBatch, ReplayBuffer, PooledReplay, pool

__all__ = ["Transition", "TransitionBatch", "ReplayBuffer", "PooledReplay", "pool"]
