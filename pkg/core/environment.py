# core/environment.py
"""
Simulated bandit instances and the virtual-time executor.

A batch of m simultaneous pulls advances the virtual clock by lambda(m).
Nothing ever sleeps: the cost of a run in wall-clock time is proportional
to the number of batches, not to lambda.
"""
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from core.errors import BudgetExhaustedError, ConfigError, DegenerateInstanceError, DomainError
from core.seeding import make_rng

logger = logging.getLogger(__name__)

BEST_MEAN = 0.9
WORST_MEAN = 0.1
ARM_KINDS = ("bernoulli", "gaussian")
MAX_COUNT = int(np.iinfo(np.int64).max)


@dataclass(frozen=True)
class ArmDistribution:
    kind: str
    mean: float

    def __post_init__(self):
        if self.kind not in ARM_KINDS:
            raise ConfigError(f"unknown arm kind {self.kind!r}")
        if self.kind == "bernoulli" and not 0.0 <= self.mean <= 1.0:
            raise ConfigError(f"bernoulli mean must lie in [0, 1], got {self.mean}")

    def sample_sum(self, rng, count):
        """Sum of `count` independent rewards."""
        if self.kind == "bernoulli":
            return float(rng.binomial(count, self.mean))
        # unit variance
        return float(rng.normal(self.mean * count, math.sqrt(count)))


@dataclass(frozen=True)
class BanditInstance:
    arms: tuple

    def __post_init__(self):
        if len(self.arms) < 1:
            raise ConfigError("an instance needs at least one arm")
        means = self.means
        top = means.max()
        if np.count_nonzero(means == top) > 1:
            raise DegenerateInstanceError(f"best arm is not unique: mean {top} appears more than once")

    @classmethod
    def from_means(cls, means, kind="bernoulli"):
        return cls(arms=tuple(ArmDistribution(kind, float(mu)) for mu in means))

    @property
    def n(self):
        return len(self.arms)

    @property
    def means(self):
        return np.array([arm.mean for arm in self.arms])

    @property
    def kind(self):
        kinds = {arm.kind for arm in self.arms}
        return kinds.pop() if len(kinds) == 1 else "mixed"

    @property
    def best_arm(self):
        return int(np.argmax(self.means))

    def to_json(self):
        return json.dumps({"kind": self.kind, "means": [arm.mean for arm in self.arms]})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text) if isinstance(text, str) else text
        return cls.from_means(data["means"], kind=data.get("kind", "bernoulli"))


@dataclass(frozen=True)
class GapVector:
    """deltas[r] is the gap of the arm with rank r + 1; ordering[arm] is that arm's rank - 1."""

    deltas: np.ndarray
    ordering: np.ndarray

    @property
    def suboptimal(self):
        """Gaps for ranks 2..n."""
        return self.deltas[1:]


def make_linear_gap_instance(n, delta2, clip=False):
    """mu_1 = 0.9, mu_i = 0.9 - delta2 - 0.8 (i - 2) / (n - 1) for i >= 2."""
    if n < 2:
        raise ConfigError(f"a linear-gap instance needs n >= 2, got {n}")
    if not 0 < delta2 <= BEST_MEAN - WORST_MEAN:
        raise ConfigError(f"delta2 must lie in (0, 0.8], got {delta2}")
    means = [BEST_MEAN] + [
        BEST_MEAN - delta2 - (BEST_MEAN - WORST_MEAN) * (i - 2) / (n - 1)
        for i in range(2, n + 1)
    ]
    if means[-1] < 0:
        if not clip:
            raise ConfigError(f"n={n}, delta2={delta2} gives mu_n={means[-1]:.4f} < 0; "
                              f"pass clip=True to clip negative means to 0")
        clipped = sum(1 for mu in means if mu < 0)
        logger.warning(f"Clipping {clipped} negative means to 0 (n={n}, delta2={delta2})")
        means = [max(0.0, mu) for mu in means]
    return BanditInstance.from_means(means)


def make_uniform_instance(n, seed):
    """n Bernoulli arms with means drawn i.i.d. from Uniform[0, 1]."""
    if n < 2:
        raise ConfigError(f"a uniform instance needs n >= 2, got {n}")
    rng = make_rng(seed)
    while True:
        means = rng.uniform(0.0, 1.0, size=n)
        top_two = np.sort(means)[-2:]
        if top_two[0] != top_two[1]:
            return BanditInstance.from_means(means)


def gaps(instance):
    means = instance.means
    if instance.n < 2:
        raise DomainError("gaps need at least two arms")
    by_rank = np.argsort(-means, kind="stable")
    if means[by_rank[0]] == means[by_rank[1]]:
        raise DegenerateInstanceError("best arm is not unique")
    ranked = means[by_rank]
    deltas = ranked[0] - ranked
    deltas[0] = deltas[1]
    ordering = np.empty(instance.n, dtype=int)
    ordering[by_rank] = np.arange(instance.n)
    return GapVector(deltas=deltas, ordering=ordering)


@dataclass
class SimulationLedger:
    """Clock, per-arm sufficient statistics and RNG of a single replication."""

    n: int
    rng: np.random.Generator
    max_total_pulls: int = None
    virtual_time: float = 0.0
    total_pulls: int = 0
    batches: int = 0
    pull_counts: np.ndarray = field(default=None)
    reward_sums: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.pull_counts is None:
            self.pull_counts = np.zeros(self.n, dtype=np.int64)
        if self.reward_sums is None:
            self.reward_sums = np.zeros(self.n, dtype=float)

    @classmethod
    def for_run(cls, n, seed, max_total_pulls=None):
        return cls(n=n, rng=make_rng(seed), max_total_pulls=max_total_pulls)

    def empirical_means(self, arms=None):
        arms = np.arange(self.n) if arms is None else np.asarray(arms, dtype=int)
        counts = self.pull_counts[arms]
        if np.any(counts == 0):
            raise DomainError(f"empirical mean requested for unpulled arm(s) {arms[counts == 0].tolist()}")
        return self.reward_sums[arms] / counts

    def snapshot(self):
        return {
            "virtual_time": self.virtual_time,
            "total_pulls": self.total_pulls,
            "pull_counts": self.pull_counts.tolist(),
            "reward_sums": self.reward_sums.tolist(),
        }


def execute_batch(ledger, instance, spec, requests):
    """Run one synchronous batch of (arm, count) requests; returns the virtual time it took."""
    if not requests:
        return 0.0
    for arm, count in requests:
        if not 0 <= arm < instance.n:
            raise DomainError(f"arm index {arm} out of range for n={instance.n}")
        if count < 1:
            raise DomainError(f"pull count must be positive, got {count} for arm {arm}")
    batch_size = sum(int(count) for _, count in requests)
    # per-arm counters and the binomial sampler are int64
    largest = max(int(ledger.pull_counts[arm]) + int(count) for arm, count in requests)
    if ledger.total_pulls + batch_size > MAX_COUNT or largest > MAX_COUNT:
        raise BudgetExhaustedError(
            f"batch of {batch_size} pulls overflows the 64-bit pull counters")
    if ledger.max_total_pulls is not None and ledger.total_pulls + batch_size > ledger.max_total_pulls:
        raise BudgetExhaustedError(
            f"batch of {batch_size} pulls would exceed max_total_pulls={ledger.max_total_pulls}")

    # arm-index-major order
    for arm, count in sorted(requests, key=lambda r: r[0]):
        ledger.reward_sums[arm] += instance.arms[arm].sample_sum(ledger.rng, int(count))
        ledger.pull_counts[arm] += int(count)

    elapsed = spec.evaluate(batch_size)
    ledger.virtual_time += elapsed
    ledger.total_pulls += batch_size
    ledger.batches += 1
    return elapsed
