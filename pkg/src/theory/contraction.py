import logging
from typing import NamedTuple

import numpy as np

from src.satcore import (
    SatConfig, TabularMDP, iterate_sat_backup, iterations_bound, random_mdp, tabular_sat_backup,
)

logger = logging.getLogger(__name__)

TOLERANCE = 1e-12


class ContractionResult(NamedTuple):
    max_ratio: float
    trials: int
    skipped: int


def check_contraction(mdp: TabularMDP, b_const: float, margin: float, gamma: float,
                      trials: int, rng) -> ContractionResult:
    """Worst observed sup-norm ratio of the satisficing backup over random Q pairs."""
    cfg = SatConfig(margin=margin, gamma=gamma)
    shape = (mdp.n_states, mdp.n_actions)
    worst, skipped = 0.0, 0
    for _ in range(trials):
        scale = float(rng.uniform(0.1, 10.0))
        q1 = rng.normal(0.0, scale, size=shape)
        q2 = rng.normal(0.0, scale, size=shape)
        gap = float(np.max(np.abs(q1 - q2)))
        if gap == 0.0:
            skipped += 1
            continue
        out_gap = float(np.max(np.abs(tabular_sat_backup(mdp, q1, b_const, cfg)
                                      - tabular_sat_backup(mdp, q2, b_const, cfg))))
        worst = max(worst, out_gap / gap)
    return ContractionResult(worst, trials - skipped, skipped)


class BoundednessResult(NamedTuple):
    """Bounds observed at the fixed point of the iterated backup.

    `clipped_ok` is the literal consequence of the min-clip: the bootstrap
    value never exceeds B_max + m. `printed_bound_ok` tests the looser
    statement Q <= B_max + m, which ignores reward and discount and can fail.
    """

    iterations: int
    first_gap: float
    final_gap: float
    value_bound_ok: bool
    clipped_ok: bool
    printed_bound_ok: bool
    max_q: float
    max_bootstrap: float


def check_boundedness(mdp: TabularMDP, b_const: float, margin: float, gamma: float,
                      tol: float = 1e-10) -> BoundednessResult:
    cfg = SatConfig(margin=margin, gamma=gamma)
    fp = iterate_sat_backup(mdp, b_const, cfg, tol=tol)
    r_max = float(np.max(np.abs(mdp.R)))
    bootstrap = np.minimum(fp.Q.max(axis=1), b_const + margin)
    max_q = float(fp.Q.max())
    return BoundednessResult(
        iterations=fp.iterations,
        first_gap=fp.gaps[0],
        final_gap=fp.gaps[-1],
        value_bound_ok=bool(np.max(np.abs(fp.Q)) <= r_max / (1.0 - gamma) + TOLERANCE),
        clipped_ok=bool(bootstrap.max() <= b_const + margin + TOLERANCE),
        printed_bound_ok=bool(max_q <= b_const + margin + TOLERANCE),
        max_q=max_q,
        max_bootstrap=float(bootstrap.max()),
    )


class MdpSweepResult(NamedTuple):
    max_ratio: float
    worst_gap: float
    slow_convergence: int
    boundedness_ok: bool
    printed_bound_violations: int
    mdps: int


def contraction_sweep(rng, n_mdps: int = 1000, trials_per_mdp: int = 1, gamma: float = 0.99,
                      margin: float = 0.5, max_states: int = 20, max_actions: int = 4) -> MdpSweepResult:
    """Contraction and fixed-point checks over random tabular MDPs with a constant baseline."""
    worst_ratio, worst_gap = 0.0, 0.0
    slow = 0
    bounded = True
    printed_violations = 0
    for _ in range(n_mdps):
        mdp = random_mdp(int(rng.integers(1, max_states + 1)), int(rng.integers(1, max_actions + 1)), rng)
        b_const = float(rng.uniform(-5.0, 5.0))
        worst_ratio = max(worst_ratio,
                          check_contraction(mdp, b_const, margin, gamma, trials_per_mdp, rng).max_ratio)
        result = check_boundedness(mdp, b_const, margin, gamma)
        worst_gap = max(worst_gap, result.final_gap)
        bounded = bounded and result.value_bound_ok and result.clipped_ok
        printed_violations += int(not result.printed_bound_ok)
        slow += int(result.iterations > iterations_bound(result.first_gap, gamma))
    if printed_violations:
        logger.info(f"Q exceeded B_max + m at {printed_violations}/{n_mdps} fixed points "
                    f"(reward and discount are outside the clip)")
    return MdpSweepResult(worst_ratio, worst_gap, slow, bounded, printed_violations, n_mdps)
