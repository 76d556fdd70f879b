# Sat-EnQ: satisficing weak-learner ensembles, distillation and Double-DQN polishing
