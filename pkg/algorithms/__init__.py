# algorithms/__init__.py
"""
Registry mapping config names to algorithm runners.

`build_runner(name, params)` validates the parameters up front and returns a
callable `runner(instance, spec, seed, max_total_pulls)`.
"""
from algorithms.apr import AprConfig, run_apr
from algorithms.batch_racing import DEFAULT_MAX_BATCHES, run_batch_racing
from algorithms.ssh import SshConfig, run_sh, run_ssh
from algorithms.ucbe import run_ucbe
from core.errors import ConfigError


def _build_apr(params):
    config = AprConfig(beta=float(params.get("beta", 2.0)),
                       delta=float(params.get("delta", 0.1)),
                       deviation_scale=float(params.get("deviation_scale", 1.0)),
                       max_rounds=int(params.get("max_rounds", 64)))
    return lambda instance, spec, seed, max_total_pulls=None: run_apr(
        instance, spec, config, seed, max_total_pulls=max_total_pulls)


def _build_batch_racing(params):
    if "batch_size" not in params:
        raise ConfigError("batch_racing needs a batch_size")
    batch_size = int(params["batch_size"])
    if batch_size < 1:
        raise ConfigError(f"batch_size must be at least 1, got {batch_size}")
    delta = float(params.get("delta", 0.1))
    if not 0 < delta < 1:
        raise ConfigError(f"delta must lie in (0, 1), got {delta}")
    deviation_scale = float(params.get("deviation_scale", 1.0))
    if not deviation_scale > 0:
        raise ConfigError(f"deviation_scale must be positive, got {deviation_scale}")
    max_batches = int(params.get("max_batches", DEFAULT_MAX_BATCHES))
    return lambda instance, spec, seed, max_total_pulls=None: run_batch_racing(
        instance, spec, batch_size, delta, deviation_scale, seed,
        max_batches=max_batches, max_total_pulls=max_total_pulls)


def _deadline(params):
    if "deadline" not in params:
        raise ConfigError("fixed-deadline algorithms need a deadline")
    return float(params["deadline"])


def _build_ssh(params):
    config = SshConfig(deadline=_deadline(params), k=params.get("k", "auto"),
                       ranking=params.get("ranking", "cumulative"))
    return lambda instance, spec, seed, max_total_pulls=None: run_ssh(
        instance, spec, config, seed, max_total_pulls=max_total_pulls)


def _build_sh(params):
    config = SshConfig(deadline=_deadline(params), k=1, ranking=params.get("ranking", "cumulative"))
    return lambda instance, spec, seed, max_total_pulls=None: run_sh(
        instance, spec, config.deadline, seed, ranking=config.ranking, max_total_pulls=max_total_pulls)


def _build_ucbe(params):
    deadline = _deadline(params)
    a = float(params.get("a", 1.0))
    if a < 0:
        raise ConfigError(f"exploration scale a must be non-negative, got {a}")
    return lambda instance, spec, seed, max_total_pulls=None: run_ucbe(
        instance, spec, deadline, a, seed, max_total_pulls=max_total_pulls)


# name -> (setting, builder)
ALGORITHMS = {
    "apr": ("fixed_confidence", _build_apr),
    "batch_racing": ("fixed_confidence", _build_batch_racing),
    "ssh": ("fixed_deadline", _build_ssh),
    "sh": ("fixed_deadline", _build_sh),
    "ucbe": ("fixed_deadline", _build_ucbe),
}


def build_runner(name, params):
    if name not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {name!r}; expected one of {sorted(ALGORITHMS)}")
    _, builder = ALGORITHMS[name]
    return builder(params)


def setting_of(name):
    if name not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {name!r}; expected one of {sorted(ALGORITHMS)}")
    return ALGORITHMS[name][0]
