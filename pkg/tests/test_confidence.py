import math

import numpy as np
import pytest

from core.confidence import ConfidenceConfig, deviation, intervals, nbar
from core.environment import SimulationLedger
from core.errors import ConfigError, DomainError


def test_deviation_values():
    assert deviation(1, 0.1) == pytest.approx(math.sqrt(4 * math.log(10)), rel=1e-12)
    assert deviation(1, 0.1) == pytest.approx(3.03485, abs=1e-5)
    assert deviation(2, 0.1) == pytest.approx(math.sqrt(2 * math.log(20)), rel=1e-12)
    assert deviation(2, 0.1) == pytest.approx(2.4477, abs=1e-4)


def test_deviation_shrinks_with_pulls():
    counts = 2 ** np.arange(0, 20)
    values = deviation(counts, 0.05)
    assert np.all(np.diff(values) < 0)
    assert deviation(10, 0.01) > deviation(10, 0.1)


def test_deviation_preconditions():
    with pytest.raises(DomainError):
        deviation(0, 0.1)
    with pytest.raises(ConfigError):
        deviation(5, 0.5)
    with pytest.raises(ConfigError):
        deviation(5, 0.0)


def test_confidence_config():
    assert ConfidenceConfig(delta=0.06, n=1).omega == pytest.approx(0.1)
    with pytest.raises(ConfigError):
        ConfidenceConfig(delta=1.0, n=4)
    with pytest.raises(ConfigError):
        ConfidenceConfig(delta=0.1, n=4, deviation_scale=0)


def _ledger(counts, sums):
    ledger = SimulationLedger.for_run(len(counts), seed=0)
    ledger.pull_counts[:] = counts
    ledger.reward_sums[:] = sums
    return ledger


def test_interval_example():
    ledger = _ledger([2], [1.0])
    result = intervals(ledger, ConfidenceConfig(delta=0.06, n=1))
    width = math.sqrt(2 * math.log(20))
    assert result.mean_estimates[0] == pytest.approx(0.5)
    assert result.interval(0) == pytest.approx((0.5 - width, 0.5 + width), rel=1e-9)


def test_deviation_scale_shrinks_width():
    ledger = _ledger([50, 50], [30.0, 10.0])
    full = intervals(ledger, ConfidenceConfig(delta=0.1, n=2))
    scaled = intervals(ledger, ConfidenceConfig(delta=0.1, n=2, deviation_scale=0.2))
    assert scaled.upper - scaled.mean_estimates == pytest.approx(0.2 * (full.upper - full.mean_estimates))


def test_symmetric_arms_get_identical_intervals():
    result = intervals(_ledger([40, 40], [12.0, 12.0]), ConfidenceConfig(delta=0.1, n=2))
    assert result.interval(0) == result.interval(1)


def test_unpulled_arm_is_rejected():
    with pytest.raises(DomainError):
        intervals(_ledger([3, 0], [1.0, 0.0]), ConfidenceConfig(delta=0.1, n=2))


def test_nbar_value():
    omega = math.sqrt(0.1 / (6 * 16))
    assert nbar(1.0, omega) == 426


def test_nbar_grows_as_gap_shrinks():
    omega = math.sqrt(0.1 / 96)
    values = [nbar(d, omega) for d in (0.9, 0.5, 0.2, 0.1, 0.01)]
    assert values == sorted(values)
    assert nbar(0.5, omega) >= 4 * (nbar(1.0, omega) - 1)
    with pytest.raises(DomainError):
        nbar(0.0, omega)


def test_unit_variance_coverage():
    """Gaussian running means should leave the band on at most a 6 omega^2 share of paths."""
    omega, paths, horizon = 0.05, 2000, 4096
    rng = np.random.default_rng(12345)
    counts = np.arange(1, horizon + 1)
    band = deviation(counts, omega)
    misses = 0
    for _ in range(paths // 500):
        running = np.cumsum(rng.standard_normal((500, horizon)), axis=1) / counts
        misses += int(np.any(np.abs(running) > band, axis=1).sum())
    p = 6 * omega ** 2
    assert misses / paths <= p + 3 * math.sqrt(p * (1 - p) / paths)
