# algorithms/apr.py
"""
Adaptive Parallel Racing (fixed confidence).

Round r is allocated t_r = beta^(r-1) * lambda(n) time. Every surviving arm
is pulled q_r = floor(lambda^-1(t_r) / |S_r|) times in one batch, then every
arm whose upper confidence bound is below the highest lower bound is
eliminated. The run ends when a single arm survives.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from core.confidence import ConfidenceConfig, intervals
from core.environment import SimulationLedger, execute_batch
from core.errors import BudgetExhaustedError, ConfigError
from core.scaling import max_pulls

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AprConfig:
    beta: float = 2.0
    delta: float = 0.1
    deviation_scale: float = 1.0
    max_rounds: int = 64

    def __post_init__(self):
        if not self.beta > 1:
            raise ConfigError(f"beta must exceed 1, got {self.beta}")
        if not 0 < self.delta < 1:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if not self.deviation_scale > 0:
            raise ConfigError(f"deviation_scale must be positive, got {self.deviation_scale}")
        if self.max_rounds < 1:
            raise ConfigError(f"max_rounds must be at least 1, got {self.max_rounds}")


@dataclass(frozen=True)
class RoundRecord:
    round: int
    allocated: float
    survivors: int
    pulls_per_arm: int
    elapsed: float
    virtual_time_cum: float
    eliminated: tuple


@dataclass
class AprResult:
    best_arm: int
    virtual_time: float
    allocated_time: float
    rounds: int
    trace: list = field(default_factory=list)
    total_pulls: int = 0


def eliminate(ledger, survivors, confidence):
    """Drop every arm whose UCB is strictly below the best LCB; returns (kept, dropped)."""
    bounds = intervals(ledger, confidence, survivors)
    best_lower = bounds.lower.max()
    keep = bounds.upper >= best_lower
    if not keep.any():
        # Keep the highest empirical mean, lowest index on ties.
        keep[int(np.argmax(bounds.mean_estimates))] = True
    kept = [int(a) for a in bounds.arms[keep]]
    dropped = tuple(int(a) for a in bounds.arms[~keep])
    return kept, dropped


def run_apr(instance, spec, config, seed, max_total_pulls=None):
    n = instance.n
    if config.beta > n:
        logger.warning(f"beta={config.beta} is above n={n}; the runtime bound assumes beta <= n")
    ledger = SimulationLedger.for_run(n, seed, max_total_pulls)
    confidence = ConfidenceConfig(config.delta, n, config.deviation_scale)
    survivors = list(range(n))
    first_allocation = spec.evaluate(n)
    allocated_time = 0.0
    trace = []

    while len(survivors) > 1:
        r = len(trace) + 1
        if r > config.max_rounds:
            raise BudgetExhaustedError(
                f"APR did not finish within max_rounds={config.max_rounds} "
                f"({len(survivors)} arms left)", trace)
        allocation = config.beta ** (r - 1) * first_allocation
        pulls_per_arm = max_pulls(spec, allocation) // len(survivors)
        assert pulls_per_arm >= 1, f"round {r} allocates no pulls"

        try:
            elapsed = execute_batch(ledger, instance, spec, [(arm, pulls_per_arm) for arm in survivors])
        except BudgetExhaustedError as e:
            raise BudgetExhaustedError(str(e), trace) from e
        allocated_time += allocation
        kept, dropped = eliminate(ledger, survivors, confidence)
        trace.append(RoundRecord(round=r, allocated=allocation, survivors=len(survivors),
                                 pulls_per_arm=pulls_per_arm, elapsed=elapsed,
                                 virtual_time_cum=ledger.virtual_time, eliminated=dropped))
        logger.debug(f"APR round {r}: t_r={allocation:.4g}, |S|={len(survivors)}, "
                     f"q_r={pulls_per_arm}, eliminated {list(dropped)}")
        survivors = kept

    return AprResult(best_arm=survivors[0], virtual_time=ledger.virtual_time,
                     allocated_time=allocated_time, rounds=len(trace), trace=trace,
                     total_pulls=ledger.total_pulls)
