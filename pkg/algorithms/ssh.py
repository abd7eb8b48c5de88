# algorithms/ssh.py
"""
Staged Sequential Halving (fixed deadline) and its time-scale SH special case.

With parameter k the deadline T is split into s = ceil(log_{2^k} n) stages of
equal length. Each stage pulls every survivor as often as the stage time
allows, in a single batch, and keeps the ceil(|S| / 2^k) arms with the
highest empirical mean. k = 1 is SH.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from core.environment import SimulationLedger, execute_batch
from core.errors import ConfigError, DomainError, InfeasibleDeadlineError
from core.scaling import max_pulls

logger = logging.getLogger(__name__)

RANKING_MODES = ("cumulative", "stage")


def ceil_log2(n):
    return (n - 1).bit_length()


def num_stages(n, k):
    """ceil(log_{2^k} n), computed on integers."""
    stages = 0
    while 2 ** (k * stages) < n:
        stages += 1
    return stages


def stage_budget(T, stages):
    """Largest per-stage time whose running sum over `stages` stages stays within T."""
    stage_time = T / stages
    while _running_sum(stage_time, stages) > T:
        stage_time = math.nextafter(stage_time, 0.0)
    return stage_time


def _running_sum(value, count):
    total = 0.0
    for _ in range(count):
        total += value
    return total


def x_of_k(k, n, T, spec):
    if k < 1:
        raise DomainError(f"k must be at least 1, got {k}")
    if T <= 0:
        return 0
    stages = max(1, num_stages(n, k))
    denominator = 2 ** (k * stages) * (2 ** k - 1)
    return max_pulls(spec, stage_budget(T, stages)) // denominator


def k_star(n, T, spec):
    """argmax of x(k) over k in 1..ceil(log2 n); ties go to the smaller k."""
    best_k, best_x = 1, x_of_k(1, n, T, spec)
    for k in range(2, max(1, ceil_log2(n)) + 1):
        x = x_of_k(k, n, T, spec)
        if x > best_x:
            best_k, best_x = k, x
    return best_k


def h2(gapvec):
    """max over ranks i >= 2 of i / Delta_i^2."""
    deltas = gapvec.suboptimal
    ranks = np.arange(2, len(deltas) + 2)
    return float(np.max(ranks * deltas ** -2.0))


def error_bound(k, n, T, spec, h2_value):
    if not h2_value > 0:
        raise DomainError(f"H2 must be positive, got {h2_value}")
    x = x_of_k(k, n, T, spec)
    return min(1.0, 3 * ceil_log2(n) * math.exp(-n * x / (8.0 * h2_value)))


@dataclass(frozen=True)
class SshConfig:
    deadline: float
    k: object = "auto"
    ranking: str = "cumulative"

    def __post_init__(self):
        if not self.deadline > 0:
            raise ConfigError(f"deadline must be positive, got {self.deadline}")
        if self.k != "auto" and (not isinstance(self.k, int) or self.k < 1):
            raise ConfigError(f"k must be a positive integer or 'auto', got {self.k!r}")
        if self.ranking not in RANKING_MODES:
            raise ConfigError(f"ranking must be one of {RANKING_MODES}, got {self.ranking!r}")

    def resolve_k(self, n, spec):
        if self.k == "auto":
            return k_star(n, self.deadline, spec)
        if self.k > max(1, ceil_log2(n)):
            raise ConfigError(f"k={self.k} exceeds ceil(log2 n)={ceil_log2(n)}")
        return self.k


@dataclass(frozen=True)
class StageRecord:
    stage: int
    survivors_in: int
    pulls_per_arm: int
    survivors_out: int
    virtual_time_cum: float
    survivors: tuple


@dataclass
class SshResult:
    best_arm: int
    virtual_time: float
    k: int
    stage_trace: list = field(default_factory=list)
    total_pulls: int = 0


def _top_arms(survivors, scores, keep):
    order = sorted(range(len(survivors)), key=lambda i: (-scores[i], survivors[i]))
    return sorted(survivors[i] for i in order[:keep])


def run_ssh(instance, spec, config, seed, max_total_pulls=None):
    n = instance.n
    if n < 2:
        raise DomainError("SSH needs at least two arms")
    k = config.resolve_k(n, spec)
    stages = num_stages(n, k)
    stage_time = stage_budget(config.deadline, stages)
    stage_pulls = max_pulls(spec, stage_time)
    ledger = SimulationLedger.for_run(n, seed, max_total_pulls)
    survivors = list(range(n))
    trace = []

    for stage in range(stages):
        pulls_per_arm = stage_pulls // len(survivors)
        if pulls_per_arm == 0:
            raise InfeasibleDeadlineError(
                f"stage {stage}: {stage_pulls} pulls fit in {stage_time:.4g} time, "
                f"fewer than the {len(survivors)} surviving arms", stage=stage)
        before = ledger.reward_sums[survivors].copy()
        execute_batch(ledger, instance, spec, [(arm, pulls_per_arm) for arm in survivors])
        if config.ranking == "stage":
            scores = (ledger.reward_sums[survivors] - before) / pulls_per_arm
        else:
            scores = ledger.empirical_means(survivors)
        keep = -(-len(survivors) // 2 ** k)
        survivors_in = len(survivors)
        survivors = _top_arms(survivors, scores, keep)
        trace.append(StageRecord(stage=stage, survivors_in=survivors_in, pulls_per_arm=pulls_per_arm,
                                 survivors_out=len(survivors), virtual_time_cum=ledger.virtual_time,
                                 survivors=tuple(survivors)))
        logger.debug(f"SSH(k={k}) stage {stage}: {survivors_in} -> {len(survivors)} arms, "
                     f"{pulls_per_arm} pulls each")

    return SshResult(best_arm=survivors[0], virtual_time=ledger.virtual_time, k=k,
                     stage_trace=trace, total_pulls=ledger.total_pulls)


def run_sh(instance, spec, T, seed, ranking="cumulative", max_total_pulls=None):
    return run_ssh(instance, spec, SshConfig(deadline=T, k=1, ranking=ranking), seed,
                   max_total_pulls=max_total_pulls)
