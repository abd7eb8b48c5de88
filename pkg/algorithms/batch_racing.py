# algorithms/batch_racing.py
"""
Batch-Racing(m): a fixed amount of parallelism for the whole run.

Each batch pulls the min(m, |S|) least-pulled surviving arms once (ties go to
the lower index) and costs lambda(batch size). Elimination uses the same
confidence intervals as APR and starts once every survivor has a sample.
"""
import logging

import numpy as np

from algorithms.apr import AprResult, RoundRecord, eliminate
from core.confidence import ConfidenceConfig
from core.environment import SimulationLedger, execute_batch
from core.errors import BudgetExhaustedError, ConfigError

logger = logging.getLogger(__name__)

DEFAULT_MAX_BATCHES = 10_000_000


def run_batch_racing(instance, spec, batch_size, delta, deviation_scale, seed,
                     max_batches=DEFAULT_MAX_BATCHES, max_total_pulls=None):
    if batch_size < 1:
        raise ConfigError(f"batch_size must be at least 1, got {batch_size}")
    n = instance.n
    ledger = SimulationLedger.for_run(n, seed, max_total_pulls)
    confidence = ConfidenceConfig(delta, n, deviation_scale)
    survivors = list(range(n))
    trace = []

    while len(survivors) > 1:
        if ledger.batches >= max_batches:
            raise BudgetExhaustedError(
                f"Batch-Racing({batch_size}) did not finish within {max_batches} batches", trace)
        counts = ledger.pull_counts[survivors]
        # stable sort keeps lower indices first among equal counts
        order = np.argsort(counts, kind="stable")[:min(batch_size, len(survivors))]
        chosen = sorted(survivors[i] for i in order)
        try:
            elapsed = execute_batch(ledger, instance, spec, [(arm, 1) for arm in chosen])
        except BudgetExhaustedError as e:
            raise BudgetExhaustedError(str(e), trace) from e

        dropped = ()
        if ledger.pull_counts[survivors].min() > 0:
            kept, dropped = eliminate(ledger, survivors, confidence)
        else:
            kept = survivors
        trace.append(RoundRecord(round=ledger.batches, allocated=elapsed, survivors=len(survivors),
                                 pulls_per_arm=1, elapsed=elapsed,
                                 virtual_time_cum=ledger.virtual_time, eliminated=dropped))
        survivors = kept

    logger.debug(f"Batch-Racing({batch_size}) finished after {ledger.batches} batches, "
                 f"virtual time {ledger.virtual_time:.4g}")
    return AprResult(best_arm=survivors[0], virtual_time=ledger.virtual_time,
                     allocated_time=ledger.virtual_time, rounds=ledger.batches, trace=trace,
                     total_pulls=ledger.total_pulls)
