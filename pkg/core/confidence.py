# core/confidence.py
"""
Iterated-logarithm confidence intervals and the per-arm sample-complexity
constants used by the fixed-confidence runtime bound.

"log" is the natural logarithm; base 2 appears only inside the
iterated-logarithm term.
"""
import math
from dataclasses import dataclass

import numpy as np

from core.errors import ConfigError, DomainError

OMEGA_MAX = math.sqrt(1.0 / 6.0)


@dataclass(frozen=True)
class ConfidenceConfig:
    delta: float
    n: int
    deviation_scale: float = 1.0

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if self.n < 1:
            raise ConfigError(f"n must be positive, got {self.n}")
        if not self.deviation_scale > 0:
            raise ConfigError(f"deviation_scale must be positive, got {self.deviation_scale}")

    @property
    def omega(self):
        return math.sqrt(self.delta / (6 * self.n))


@dataclass(frozen=True)
class IntervalSet:
    arms: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    counts: np.ndarray
    mean_estimates: np.ndarray

    def __len__(self):
        return len(self.arms)

    def interval(self, arm):
        i = int(np.flatnonzero(self.arms == arm)[0])
        return float(self.lower[i]), float(self.upper[i])


def _check_omega(omega):
    if not 0 < omega < OMEGA_MAX:
        raise ConfigError(f"omega must lie in (0, sqrt(1/6)), got {omega}")


def deviation(count, omega):
    """D(N, omega) = sqrt(4 log(log2(2N) / omega) / N); accepts scalars or arrays."""
    _check_omega(omega)
    counts = np.asarray(count, dtype=float)
    if np.any(counts < 1):
        raise DomainError("deviation is undefined for zero pulls")
    value = np.sqrt(4.0 * np.log(np.log2(2.0 * counts) / omega) / counts)
    return float(value) if value.ndim == 0 else value


def intervals(ledger, config, arms=None):
    arms = np.arange(ledger.n) if arms is None else np.asarray(arms, dtype=int)
    counts = ledger.pull_counts[arms]
    if np.any(counts == 0):
        raise DomainError(f"confidence interval requested for unpulled arm(s) {arms[counts == 0].tolist()}")
    means = ledger.reward_sums[arms] / counts
    width = config.deviation_scale * np.asarray(deviation(counts, config.omega))
    return IntervalSet(arms=arms, lower=means - width, upper=means + width,
                       counts=counts.copy(), mean_estimates=means)


def nbar(delta_i, omega):
    """1 + floor(64 / delta_i^2 * log((2 / omega) * log2(192 / (delta_i^2 omega))))."""
    if delta_i <= 0:
        raise DomainError(f"gap must be positive, got {delta_i}")
    _check_omega(omega)
    inv_sq = delta_i ** -2
    return 1 + int(math.floor(64.0 * inv_sq * math.log((2.0 / omega) * math.log2(192.0 * inv_sq / omega))))
