from .targets import SatConfig, LearnerState, sat_target, sat_targets, sat_loss_and_grad, sync_target
from .tabular import TabularMDP, random_mdp, tabular_sat_backup, iterate_sat_backup, iterations_bound

__all__ = [
    "SatConfig", "LearnerState", "sat_target", "sat_targets", "sat_loss_and_grad", "sync_target",
    "TabularMDP", "random_mdp", "tabular_sat_backup", "iterate_sat_backup", "iterations_bound",
]
