import numpy as np
import pytest

from algorithms import apr
from algorithms.apr import AprConfig, run_apr
from core.analysis import dp_tstar, nbar_vector, theorem1_bound
from core.environment import BanditInstance, execute_batch, gaps, make_linear_gap_instance
from core.errors import BudgetExhaustedError, ConfigError
from core.scaling import AmdahlScaling, LinearScaling, PowerLawScaling, max_pulls

SQRT = PowerLawScaling(q=0.5)
FAST = AprConfig(beta=2, delta=0.1, deviation_scale=0.2)


@pytest.fixture
def easy_instance():
    return make_linear_gap_instance(16, 0.5, clip=True)


def test_single_arm_needs_no_rounds():
    result = run_apr(BanditInstance.from_means([0.3]), SQRT, FAST, seed=0)
    assert result.best_arm == 0
    assert result.virtual_time == 0
    assert result.rounds == 0


def test_config_validation():
    with pytest.raises(ConfigError):
        AprConfig(beta=1.0)
    with pytest.raises(ConfigError):
        AprConfig(delta=0)
    with pytest.raises(ConfigError):
        AprConfig(max_rounds=0)


@pytest.mark.parametrize("spec", [SQRT, PowerLawScaling(q=0.1), LinearScaling(c=2.0),
                                  AmdahlScaling(serial=0.2, parallel=1.0)])
@pytest.mark.parametrize("n", [2, 5, 16, 100])
def test_first_round_pulls_every_arm_once(spec, n):
    instance = make_linear_gap_instance(n, 0.5, clip=True)
    result = run_apr(instance, spec, FAST, seed=1)
    assert result.trace[0].pulls_per_arm == 1
    assert result.trace[0].survivors == n


def test_finds_best_arm(easy_instance):
    successes = 0
    gapvec = gaps(easy_instance)
    runtime_bound = theorem1_bound(2, 16, dp_tstar(nbar_vector(gapvec, 0.1, 16), SQRT).value)
    for seed in range(200):
        result = run_apr(easy_instance, SQRT, FAST, seed=seed)
        if result.best_arm == easy_instance.best_arm:
            successes += 1
            assert result.virtual_time <= runtime_bound
    assert successes / 200 >= 0.9


def test_round_bookkeeping(easy_instance):
    for seed in range(20):
        result = run_apr(easy_instance, SQRT, FAST, seed=seed)
        assert result.virtual_time <= result.allocated_time
        assert result.total_pulls == sum(r.pulls_per_arm * r.survivors for r in result.trace)
        survivors = [r.survivors for r in result.trace]
        assert survivors == sorted(survivors, reverse=True)
        eliminated = [arm for r in result.trace for arm in r.eliminated]
        assert len(eliminated) == len(set(eliminated)) == 15
        assert result.best_arm not in eliminated
        for r in result.trace:
            q_times_s = r.pulls_per_arm * r.survivors
            assert SQRT.evaluate(q_times_s) <= r.allocated
            assert SQRT.evaluate(2 * q_times_s) > r.allocated
            assert r.allocated == pytest.approx(2 ** (r.round - 1) * SQRT.evaluate(16))


def test_allocation_respects_integer_inverse():
    spec = PowerLawScaling(q=0.3)
    instance = make_linear_gap_instance(7, 0.4, clip=True)
    result = run_apr(instance, spec, AprConfig(beta=3, deviation_scale=0.2), seed=4)
    for r in result.trace:
        assert r.pulls_per_arm == max_pulls(spec, r.allocated) // r.survivors


def test_full_width_intervals_rarely_fail():
    instance = make_linear_gap_instance(4, 0.3)
    config = AprConfig(beta=2, delta=0.1, deviation_scale=1.0)
    failures = sum(run_apr(instance, SQRT, config, seed=s).best_arm != instance.best_arm
                   for s in range(200))
    p = 0.1
    assert failures / 200 <= p + 3 * np.sqrt(p * (1 - p) / 200)


def test_identical_seeds_identical_runs(easy_instance):
    a = run_apr(easy_instance, SQRT, FAST, seed=9)
    b = run_apr(easy_instance, SQRT, FAST, seed=9)
    assert a == b


def test_round_cap_raises_with_trace():
    instance = BanditInstance.from_means([0.9, 0.8999])
    with pytest.raises(BudgetExhaustedError) as excinfo:
        run_apr(instance, SQRT, AprConfig(max_rounds=2), seed=0)
    assert len(excinfo.value.trace) == 2


def test_pull_cap_raises(easy_instance):
    with pytest.raises(BudgetExhaustedError):
        run_apr(easy_instance, SQRT, AprConfig(), seed=0, max_total_pulls=20)


def test_eliminated_arms_are_never_pulled_again(easy_instance, monkeypatch):
    batches = []

    def recording_batch(ledger, instance, spec, requests):
        batches.append([arm for arm, _ in requests])
        return execute_batch(ledger, instance, spec, requests)

    monkeypatch.setattr(apr, "execute_batch", recording_batch)
    for seed in range(10):
        batches.clear()
        result = run_apr(easy_instance, SQRT, FAST, seed=seed)
        assert len(batches) == len(result.trace)
        gone = set()
        for pulled, record in zip(batches, result.trace):
            assert gone.isdisjoint(pulled)
            gone.update(record.eliminated)
