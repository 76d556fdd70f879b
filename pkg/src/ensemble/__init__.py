from .exploration import LinearSchedule, epsilon_greedy, greedy_action
from .weak import WeakEnsemble, LearnerStreams, EpisodeRecord

__all__ = ["LinearSchedule", "epsilon_greedy", "greedy_action", "WeakEnsemble", "LearnerStreams", "EpisodeRecord"]
