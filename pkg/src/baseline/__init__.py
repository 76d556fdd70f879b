from .episodic import Baseline, EpisodicBaseline
from .learned import LearnedBaseline

__all__ = ["Baseline", "EpisodicBaseline", "LearnedBaseline"]
