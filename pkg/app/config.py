# app/config.py
"""
Experiment configuration: JSON files, load-time validation and sweep expansion.

A config names an instance recipe, a scaling function, a list of algorithms
and the replication plan. Top-level `delta`, `deviation_scale` and
`deadline` act as defaults for algorithms that do not set their own.
"""
import copy
import hashlib
import itertools
import json
import os
from dataclasses import dataclass, field

from algorithms import build_runner, setting_of
from core import scaling
from core.environment import BanditInstance, make_linear_gap_instance, make_uniform_instance
from core.errors import ConfigError
from core.seeding import child_seed

RECIPES_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "recipes")

SETTINGS = ("fixed_confidence", "fixed_deadline")
DEFAULT_MAX_TOTAL_PULLS = 10_000_000
# stream tag for instance draws; run seeds come from child_seed(base_seed, pair_index)
INSTANCE_STREAM = 0x696E7374616E6365
SHARED_KEYS = ("delta", "deviation_scale", "deadline")
LABEL_KEYS = ("batch_size", "k", "beta", "a", "ranking")


@dataclass
class ExperimentConfig:
    experiment: str
    setting: str
    instance: dict
    scaling: dict
    algorithms: list
    replications: int = 10
    base_seed: int = 0
    max_total_pulls: int = DEFAULT_MAX_TOTAL_PULLS
    workers: int = 1
    c_lambda: float = 1.0
    defaults: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw):
        if "sweep" in raw:
            raise ConfigError("config has a 'sweep' section; expand it with expand_sweep first")
        for key in ("setting", "instance", "scaling", "algorithms"):
            if key not in raw:
                raise ConfigError(f"config is missing required key {key!r}")
        config = cls(
            experiment=str(raw.get("experiment", "experiment")),
            setting=raw["setting"],
            instance=dict(raw["instance"]),
            scaling=dict(raw["scaling"]),
            algorithms=[dict(a) for a in raw["algorithms"]],
            replications=int(raw.get("replications", 10)),
            base_seed=int(raw.get("base_seed", 0)),
            max_total_pulls=int(raw.get("max_total_pulls", DEFAULT_MAX_TOTAL_PULLS)),
            workers=int(raw.get("workers", 1)),
            c_lambda=float(raw.get("c_lambda", 1.0)),
            defaults={k: raw[k] for k in SHARED_KEYS if k in raw},
        )
        validate_config(config)
        return config

    def algorithm_params(self, algorithm):
        params = dict(self.defaults)
        params.update({k: v for k, v in algorithm.items() if k not in ("name", "label")})
        return params

    def scaling_function(self):
        return scaling.from_config(self.scaling)

    def make_instance(self, replication=0):
        return make_instance(self.instance, replication)


def validate_config(config):
    if config.setting not in SETTINGS:
        raise ConfigError(f"setting must be one of {SETTINGS}, got {config.setting!r}")
    if config.replications < 1:
        raise ConfigError(f"replications must be at least 1, got {config.replications}")
    if config.workers < 1:
        raise ConfigError(f"workers must be at least 1, got {config.workers}")
    if config.max_total_pulls < 1:
        raise ConfigError(f"max_total_pulls must be positive, got {config.max_total_pulls}")
    if not config.algorithms:
        raise ConfigError("config lists no algorithms")
    config.scaling_function()
    config.make_instance(0)
    for algorithm in config.algorithms:
        name = algorithm.get("name")
        if setting_of(name) != config.setting:
            raise ConfigError(f"algorithm {name!r} belongs to the {setting_of(name)} setting, "
                              f"not {config.setting}")
        build_runner(name, config.algorithm_params(algorithm))


def make_instance(recipe, replication=0):
    kind = recipe.get("kind")
    try:
        if kind == "linear_gap":
            return make_linear_gap_instance(int(recipe["n"]), float(recipe["delta2"]),
                                            clip=bool(recipe.get("clip", False)))
        if kind == "uniform":
            return make_uniform_instance(int(recipe["n"]), instance_seed(recipe, replication))
        if kind == "explicit":
            return BanditInstance.from_means(recipe["means"], kind=recipe.get("arm_kind", "bernoulli"))
    except KeyError as e:
        raise ConfigError(f"instance recipe {kind!r} is missing key {e.args[0]!r}") from e
    raise ConfigError(f"unknown instance kind {kind!r}; expected linear_gap, uniform or explicit")


def instance_seed(recipe, replication=0):
    """Seed of a uniform instance, drawn from a stream disjoint from the run seeds."""
    seed = child_seed(int(recipe.get("seed", 0)), INSTANCE_STREAM)
    if recipe.get("resample", True):
        seed = child_seed(seed, replication)
    return seed


def algorithm_label(algorithm):
    if "label" in algorithm:
        return str(algorithm["label"])
    args = [f"{k}={algorithm[k]}" for k in LABEL_KEYS if k in algorithm]
    return f"{algorithm['name']}({','.join(args)})" if args else algorithm["name"]


def params_digest(params):
    canonical = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return hashlib.sha1(canonical.encode("utf-8")).hexdigest()[:10]


def _set_path(raw, dotted, value):
    keys = dotted.split(".")
    target = raw
    for key in keys[:-1]:
        if key not in target or not isinstance(target[key], dict):
            raise ConfigError(f"sweep path {dotted!r} does not name a config section")
        target = target[key]
    target[keys[-1]] = value


def expand_sweep(raw):
    """One concrete config dict per grid point of raw['sweep'], in deterministic order."""
    sweep = raw.get("sweep")
    if not sweep:
        return [copy.deepcopy(raw)]
    keys = list(sweep)
    for key in keys:
        if not isinstance(sweep[key], list) or not sweep[key]:
            raise ConfigError(f"sweep entry {key!r} must be a non-empty list")
    base_id = raw.get("experiment", "experiment")
    points = []
    for values in itertools.product(*(sweep[k] for k in keys)):
        point = copy.deepcopy(raw)
        del point["sweep"]
        for key, value in zip(keys, values):
            _set_path(point, key, value)
        point["experiment"] = f"{base_id}[{','.join(f'{k}={v}' for k, v in zip(keys, values))}]"
        points.append(point)
    return points


def load_raw(path):
    path = resolve_config_path(path)
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e


def load_config(path):
    return ExperimentConfig.from_dict(load_raw(path))


def resolve_config_path(path):
    """A path to a JSON file, or the name of a shipped recipe."""
    if os.path.exists(path):
        return path
    candidate = os.path.join(RECIPES_DIR, path if path.endswith(".json") else f"{path}.json")
    if os.path.exists(candidate):
        return candidate
    raise ConfigError(f"no config file or recipe named {path!r}")


def list_recipes():
    if not os.path.isdir(RECIPES_DIR):
        return []
    return sorted(f[:-5] for f in os.listdir(RECIPES_DIR) if f.endswith(".json"))
