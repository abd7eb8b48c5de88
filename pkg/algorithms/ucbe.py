# algorithms/ucbe.py
import logging
import math
from dataclasses import dataclass

import numpy as np

from core.environment import SimulationLedger, execute_batch
from core.errors import ConfigError, InfeasibleDeadlineError

logger = logging.getLogger(__name__)


@dataclass
class UcbeResult:
    best_arm: int
    virtual_time: float
    total_pulls: int
    pull_counts: list


def run_ucbe(instance, spec, T, a, seed, max_total_pulls=None):
    """
    Sequential UCB-E under a deadline: one pull at a time, each costing lambda(1).

    Every arm is pulled once, then the arm maximising mu_hat + a / sqrt(N) is
    pulled until the next pull would overrun T. The recommendation is the arm
    with the highest empirical mean.
    """
    if a < 0:
        raise ConfigError(f"exploration scale a must be non-negative, got {a}")
    n = instance.n
    unit = spec.evaluate(1)
    budget = int(math.floor(T / unit))
    if budget < n:
        raise InfeasibleDeadlineError(
            f"deadline {T} pays for {budget} sequential pulls, fewer than the {n} arms")

    ledger = SimulationLedger.for_run(n, seed, max_total_pulls)
    for arm in range(n):
        if ledger.virtual_time + unit > T:
            raise InfeasibleDeadlineError(f"deadline {T} runs out before every arm is pulled once")
        execute_batch(ledger, instance, spec, [(arm, 1)])
    # same float accumulation as the ledger, so the clock never passes T
    while ledger.virtual_time + unit <= T:
        index = ledger.reward_sums / ledger.pull_counts + a / np.sqrt(ledger.pull_counts)
        execute_batch(ledger, instance, spec, [(int(np.argmax(index)), 1)])

    means = ledger.empirical_means()
    logger.debug(f"UCB-E spent {ledger.total_pulls} pulls in {ledger.virtual_time:.4g} time")
    return UcbeResult(best_arm=int(np.argmax(means)), virtual_time=ledger.virtual_time,
                      total_pulls=ledger.total_pulls, pull_counts=ledger.pull_counts.tolist())
