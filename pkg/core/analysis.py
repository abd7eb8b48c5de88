# core/analysis.py
"""
The oracle elimination planner and the fixed-confidence bounds built on it.

For z_2 >= ... >= z_n > 0 and z_{n+1} = 0:

    T_{n+1} = 0
    T_j     = min over k in {j..n} of  lambda(k (z_j - z_{k+1})) + T_{k+1}

T_2 is the planner's value. With z_i = Delta_i^-2 it is T*, with z_i = Nbar_i
it is the quantity in the APR runtime bound.
"""
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from core.confidence import nbar
from core.errors import DomainError, SizeError

BRUTE_FORCE_MAX_N = 14


@dataclass(frozen=True)
class DpSolution:
    value: float
    schedule: tuple
    level_values: dict = field(default_factory=dict)


def _check_z(z):
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or len(z) == 0:
        raise DomainError("z must be a non-empty list (ranks 2..n)")
    if np.any(z <= 0):
        raise DomainError("z values must be positive")
    if np.any(np.diff(z) > 0):
        raise DomainError("z values must be non-increasing in rank")
    return np.append(z, 0.0)


def _segment_cost(spec, zpad, j, k):
    # j, k are ranks; zpad[r - 2] holds z_r and zpad[n - 1] holds z_{n+1} = 0
    return spec.evaluate(k * (zpad[j - 2] - zpad[k - 1]))


def dp_tstar(z, spec):
    zpad = _check_z(z)
    n = len(zpad)
    values = {n + 1: 0.0}
    choice = {}
    for j in range(n, 1, -1):
        best, best_k = math.inf, None
        for k in range(j, n + 1):
            cost = _segment_cost(spec, zpad, j, k) + values[k + 1]
            if cost < best:
                best, best_k = cost, k
        values[j] = best
        choice[j] = best_k

    schedule = []
    j = 2
    while j <= n:
        schedule.append(choice[j])
        j = choice[j] + 1
    return DpSolution(value=values[2], schedule=tuple(schedule),
                      level_values=dict(sorted(values.items())))


def replay_schedule(z, spec, schedule):
    """Cost of following a breakpoint schedule from level 2."""
    zpad = _check_z(z)
    total, j = 0.0, 2
    for k in schedule:
        if k < j:
            raise DomainError(f"schedule breakpoint {k} is below level {j}")
        total += _segment_cost(spec, zpad, j, k)
        j = k + 1
    if j != len(zpad) + 1:
        raise DomainError("schedule does not end at the last rank")
    return total


def brute_force_tstar(z, spec):
    """Minimum over every breakpoint schedule; exponential, for checking dp_tstar."""
    zpad = _check_z(z)
    n = len(zpad)
    if n > BRUTE_FORCE_MAX_N:
        raise SizeError(f"brute force is limited to n <= {BRUTE_FORCE_MAX_N}, got n={n}")
    best = math.inf
    inner = range(2, n)
    for size in range(len(inner) + 1):
        for cuts in itertools.combinations(inner, size):
            cost, j = 0.0, 2
            for k in cuts + (n,):
                cost += _segment_cost(spec, zpad, j, k)
                j = k + 1
            best = min(best, cost)
    return best


def tstar(gapvec, spec):
    return dp_tstar(gapvec.suboptimal ** -2.0, spec)


def nbar_vector(gapvec, delta, n):
    omega = math.sqrt(delta / (6 * n))
    return [nbar(float(d), omega) for d in gapvec.suboptimal]


def theorem1_bound(beta, n, dp_value):
    """4 beta^(3 + 4 sqrt(log_beta n)) / (beta - 1) * T_2({Nbar_i})."""
    if not beta > 1:
        raise DomainError(f"beta must exceed 1, got {beta}")
    exponent = 3.0 + 4.0 * math.sqrt(math.log(n, beta))
    return 4.0 * beta ** exponent / (beta - 1.0) * dp_value


def lower_bound_value(delta, c_lambda, tstar_value):
    """2 c_lambda log(1 / (2.4 delta)) T*."""
    if not 0 < delta <= 0.15:
        raise DomainError(f"the lower bound holds for delta in (0, 0.15], got {delta}")
    if not 0 < c_lambda <= 1:
        raise DomainError(f"c_lambda must lie in (0, 1], got {c_lambda}")
    return 2.0 * c_lambda * math.log(1.0 / (2.4 * delta)) * tstar_value
