import math

import numpy as np
import pytest
from scipy.stats import chisquare

from core.environment import (BanditInstance, SimulationLedger, execute_batch, gaps,
                              make_linear_gap_instance, make_uniform_instance)
from core.errors import BudgetExhaustedError, ConfigError, DegenerateInstanceError, DomainError
from core.scaling import LinearScaling, PowerLawScaling


def test_linear_gap_means():
    instance = make_linear_gap_instance(16, 0.01)
    means = instance.means
    assert means[0] == pytest.approx(0.9)
    assert means[1] == pytest.approx(0.89)
    assert means[2] == pytest.approx(0.89 - 0.8 / 15)
    assert instance.best_arm == 0

    assert make_linear_gap_instance(2, 0.3).means.tolist() == pytest.approx([0.9, 0.6])


def test_linear_gap_negative_means_need_clip():
    with pytest.raises(ConfigError):
        make_linear_gap_instance(16, 0.5)
    clipped = make_linear_gap_instance(16, 0.5, clip=True)
    assert clipped.means[1] == pytest.approx(0.4)
    assert clipped.means.min() == 0.0
    assert clipped.best_arm == 0


def test_linear_gap_preconditions():
    with pytest.raises(ConfigError):
        make_linear_gap_instance(1, 0.1)
    with pytest.raises(ConfigError):
        make_linear_gap_instance(4, 0.0)


def test_uniform_instance_is_deterministic():
    a = make_uniform_instance(32, seed=5)
    b = make_uniform_instance(32, seed=5)
    assert a == b
    big = make_uniform_instance(1024, seed=7)
    assert big.n == 1024
    assert np.all((big.means >= 0) & (big.means <= 1))


def test_uniform_best_arm_is_uniform_over_positions():
    counts = np.bincount([make_uniform_instance(2, seed=s).best_arm for s in range(1000)], minlength=2)
    assert chisquare(counts).pvalue > 0.01


def test_gaps():
    gapvec = gaps(BanditInstance.from_means([0.9, 0.6, 0.1]))
    assert gapvec.deltas.tolist() == pytest.approx([0.3, 0.3, 0.8])
    assert gaps(BanditInstance.from_means([0.9, 0.89])).deltas[1] == pytest.approx(0.01)


def test_gaps_follow_rank_not_index():
    gapvec = gaps(BanditInstance.from_means([0.1, 0.9, 0.6]))
    assert gapvec.ordering.tolist() == [2, 0, 1]
    assert gapvec.deltas.tolist() == pytest.approx([0.3, 0.3, 0.8])
    assert np.all(np.diff(gapvec.suboptimal) >= 0)


def test_duplicate_best_mean_is_degenerate():
    with pytest.raises(DegenerateInstanceError):
        gaps(BanditInstance.from_means([0.5, 0.5]))


def test_batch_costs_lambda_of_total():
    instance = make_linear_gap_instance(4, 0.1)
    spec = PowerLawScaling(q=0.5)
    ledger = SimulationLedger.for_run(4, seed=0)
    elapsed = execute_batch(ledger, instance, spec, [(0, 16), (1, 16), (2, 16), (3, 16)])
    assert elapsed == pytest.approx(8.0)
    assert ledger.virtual_time == pytest.approx(8.0)
    assert ledger.total_pulls == 64
    assert ledger.pull_counts.tolist() == [16, 16, 16, 16]


def test_empty_batch_is_a_no_op():
    instance = make_linear_gap_instance(4, 0.1)
    ledger = SimulationLedger.for_run(4, seed=0)
    before = ledger.snapshot()
    assert execute_batch(ledger, instance, PowerLawScaling(q=0.5), []) == 0
    assert ledger.snapshot() == before


def test_split_batches_cost_more():
    instance = make_linear_gap_instance(2, 0.3)
    spec = PowerLawScaling(q=0.5)
    ledger = SimulationLedger.for_run(2, seed=0)
    execute_batch(ledger, instance, spec, [(0, 16), (1, 16)])
    execute_batch(ledger, instance, spec, [(0, 16), (1, 16)])
    assert ledger.virtual_time == pytest.approx(2 * math.sqrt(32))
    assert ledger.virtual_time > spec.evaluate(64)


def test_invalid_requests():
    instance = make_linear_gap_instance(2, 0.3)
    ledger = SimulationLedger.for_run(2, seed=0)
    with pytest.raises(DomainError):
        execute_batch(ledger, instance, LinearScaling(), [(2, 1)])
    with pytest.raises(DomainError):
        execute_batch(ledger, instance, LinearScaling(), [(0, 0)])


def test_pull_cap():
    instance = make_linear_gap_instance(2, 0.3)
    ledger = SimulationLedger.for_run(2, seed=0, max_total_pulls=10)
    execute_batch(ledger, instance, LinearScaling(), [(0, 5), (1, 5)])
    with pytest.raises(BudgetExhaustedError):
        execute_batch(ledger, instance, LinearScaling(), [(0, 1)])


def test_identical_seeds_give_identical_ledgers():
    instance = make_uniform_instance(8, seed=3)
    spec = PowerLawScaling(q=0.3)
    requests = [[(0, 3), (5, 2)], [(1, 7)], [(a, 4) for a in range(8)]]
    ledgers = []
    for _ in range(2):
        ledger = SimulationLedger.for_run(8, seed=99)
        for batch in requests:
            execute_batch(ledger, instance, spec, batch)
        ledgers.append(ledger)
    assert ledgers[0].snapshot() == ledgers[1].snapshot()


def test_virtual_time_is_sum_over_batches():
    instance = make_uniform_instance(6, seed=1)
    spec = PowerLawScaling(q=0.7)
    ledger = SimulationLedger.for_run(6, seed=1)
    expected = 0.0
    rng = np.random.default_rng(4)
    for _ in range(50):
        arms = rng.choice(6, size=rng.integers(1, 7), replace=False)
        batch = [(int(a), int(rng.integers(1, 20))) for a in arms]
        execute_batch(ledger, instance, spec, batch)
        expected += spec.evaluate(sum(c for _, c in batch))
    assert ledger.virtual_time == expected
    assert ledger.total_pulls == ledger.pull_counts.sum()


def test_empirical_mean_concentrates():
    instance = BanditInstance.from_means([0.3, 0.7])
    ledger = SimulationLedger.for_run(2, seed=11)
    pulls = 100_000
    execute_batch(ledger, instance, LinearScaling(), [(0, pulls), (1, pulls)])
    means = ledger.empirical_means()
    assert np.all(np.abs(means - instance.means) <= 4 * math.sqrt(0.25 / pulls))


def test_gaussian_arms():
    instance = BanditInstance.from_means([1.0, -0.5], kind="gaussian")
    ledger = SimulationLedger.for_run(2, seed=2)
    execute_batch(ledger, instance, LinearScaling(), [(0, 40_000), (1, 40_000)])
    assert ledger.empirical_means() == pytest.approx([1.0, -0.5], abs=0.03)


def test_instance_json():
    instance = make_linear_gap_instance(4, 0.2)
    restored = BanditInstance.from_json(instance.to_json())
    assert restored == instance
    assert '"kind": "bernoulli"' in instance.to_json()


def test_batches_past_64_bit_counters_are_refused():
    instance = BanditInstance.from_means([0.9, 0.1])
    ledger = SimulationLedger.for_run(2, seed=0)
    with pytest.raises(BudgetExhaustedError):
        execute_batch(ledger, instance, PowerLawScaling(q=0.05), [(0, 2 ** 63)])
    ledger.pull_counts[1] = np.iinfo(np.int64).max - 5
    with pytest.raises(BudgetExhaustedError):
        execute_batch(ledger, instance, PowerLawScaling(q=0.05), [(1, 10)])
    assert ledger.total_pulls == 0
    assert ledger.virtual_time == 0.0
