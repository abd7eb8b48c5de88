# core/scaling.py
"""
Scaling functions: lambda(m) is the time needed to run m simultaneous arm
pulls when the whole resource is split evenly between them.

Every scaling function is increasing, concave and passes through the
origin. Instances are immutable and can be shared between replications.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from core.errors import ConfigError, DomainError, RangeError

INVERSE_RTOL = 1e-10
EXACT_INT_LIMIT = 2 ** 53


class ScalingFunction:
    """Base class. Subclasses implement `_evaluate` and optionally `_inverse`."""

    KIND = None

    def __call__(self, m):
        return self.evaluate(m)

    def evaluate(self, m):
        if m < 0:
            raise DomainError(f"lambda is undefined for m={m} < 0")
        if m == 0:
            return 0.0
        return float(self._evaluate(float(m)))

    def inverse(self, t):
        if t < 0:
            raise DomainError(f"lambda^-1 is undefined for t={t} < 0")
        if t == 0:
            return 0.0
        return float(self._inverse(float(t)))

    def _evaluate(self, m):
        raise NotImplementedError

    def _inverse(self, t):
        # Bracket by doubling, then bisect; lambda is monotone so the root is unique.
        hi = 1.0
        while self._evaluate(hi) < t:
            hi *= 2.0
        return bisect(lambda m: self._evaluate(m) - t, 0.0, hi,
                      xtol=1e-15, rtol=INVERSE_RTOL, maxiter=400)

    def to_config(self):
        raise NotImplementedError


@dataclass(frozen=True)
class PowerLawScaling(ScalingFunction):
    q: float

    KIND = "power"

    def __post_init__(self):
        if not 0 < self.q <= 1:
            raise ConfigError(f"power-law exponent q must lie in (0, 1], got {self.q}")

    def _evaluate(self, m):
        return m ** self.q

    def _inverse(self, t):
        return t ** (1.0 / self.q)

    def to_config(self):
        return {"kind": self.KIND, "q": self.q}


@dataclass(frozen=True)
class LinearScaling(ScalingFunction):
    c: float = 1.0

    KIND = "linear"

    def __post_init__(self):
        if not self.c > 0:
            raise ConfigError(f"linear slope c must be positive, got {self.c}")

    def _evaluate(self, m):
        return self.c * m

    def _inverse(self, t):
        return t / self.c

    def to_config(self):
        return {"kind": self.KIND, "c": self.c}


@dataclass(frozen=True)
class AmdahlScaling(ScalingFunction):
    """lambda(m) = serial * m + parallel * sqrt(m)."""

    serial: float
    parallel: float

    KIND = "amdahl"

    def __post_init__(self):
        if not 0 <= self.serial <= 1:
            raise ConfigError(f"amdahl serial share must lie in [0, 1], got {self.serial}")
        if not self.parallel > 0:
            raise ConfigError(f"amdahl parallel weight must be positive, got {self.parallel}")

    def _evaluate(self, m):
        return self.serial * m + self.parallel * math.sqrt(m)

    def to_config(self):
        return {"kind": self.KIND, "serial": self.serial, "parallel": self.parallel}


@dataclass(frozen=True)
class TabulatedScaling(ScalingFunction):
    """Piecewise-linear interpolation of a profiled curve; no extrapolation."""

    points: tuple
    ms: np.ndarray = field(init=False, repr=False, compare=False)
    ts: np.ndarray = field(init=False, repr=False, compare=False)

    KIND = "tabulated"

    def __post_init__(self):
        points = tuple((float(m), float(t)) for m, t in self.points)
        if len(points) < 2:
            raise ConfigError("a tabulated scaling function needs at least two points")
        if points[0] != (0.0, 0.0):
            raise ConfigError(f"tabulated points must start at (0, 0), got {points[0]}")
        ms = np.array([p[0] for p in points])
        ts = np.array([p[1] for p in points])
        if np.any(np.diff(ms) <= 0) or np.any(np.diff(ts) <= 0):
            raise ConfigError("tabulated points must be strictly increasing in both coordinates")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "ms", ms)
        object.__setattr__(self, "ts", ts)

    def _evaluate(self, m):
        if m > self.ms[-1]:
            raise RangeError(f"m={m} lies beyond the last tabulated point m={self.ms[-1]}")
        return np.interp(m, self.ms, self.ts)

    def _inverse(self, t):
        if t > self.ts[-1]:
            raise RangeError(f"t={t} lies beyond the last tabulated point t={self.ts[-1]}")
        return bisect(lambda m: self._evaluate(m) - t, 0.0, float(self.ms[-1]),
                      xtol=1e-15, rtol=INVERSE_RTOL, maxiter=400)

    def to_config(self):
        return {"kind": self.KIND, "points": [list(p) for p in self.points]}


SCALING_KINDS = {
    "power": lambda cfg: PowerLawScaling(q=float(cfg["q"])),
    "linear": lambda cfg: LinearScaling(c=float(cfg.get("c", 1.0))),
    "amdahl": lambda cfg: AmdahlScaling(serial=float(cfg["serial"]),
                                        parallel=float(cfg["parallel"])),
    "tabulated": lambda cfg: TabulatedScaling(points=tuple(map(tuple, cfg["points"]))),
}


def from_config(config):
    """Build a scaling function from {"kind": ..., params} (or {"scaling": {...}})."""
    if "scaling" in config:
        config = config["scaling"]
    kind = config.get("kind")
    if kind not in SCALING_KINDS:
        raise ConfigError(f"unknown scaling kind {kind!r}; expected one of {sorted(SCALING_KINDS)}")
    try:
        return SCALING_KINDS[kind](config)
    except KeyError as e:
        raise ConfigError(f"scaling kind {kind!r} is missing key {e.args[0]!r}") from e


def evaluate(spec, m):
    return spec.evaluate(m)


def inverse(spec, t):
    return spec.inverse(t)


def max_pulls(spec, t):
    """Largest integer m with lambda(m) <= t."""
    if t < 0:
        raise DomainError(f"time budget must be non-negative, got {t}")
    m = int(math.floor(spec.inverse(t)))
    if m >= EXACT_INT_LIMIT:
        # consecutive integers are no longer distinct floats; step down relatively
        while spec.evaluate(m) > t:
            m = int(m * (1.0 - 1e-15))
        return m
    while m > 0 and spec.evaluate(m) > t:
        m -= 1
    try:
        if spec.evaluate(m + 1) <= t:
            m += 1
    except RangeError:
        pass
    return m


@dataclass
class ValidationReport:
    monotone: bool = True
    zero_at_zero: bool = True
    concave: bool = True
    surjective_hint: bool = True
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return self.monotone and self.zero_at_zero and self.concave and self.surjective_hint


def validate(spec, grid, tol=1e-12):
    """Check the scaling axioms on a grid of positive sizes; violations are reported, not raised."""
    grid = [float(m) for m in grid]
    if not grid:
        raise DomainError("validation grid is empty")
    if grid[0] <= 0 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError(f"validation grid must be positive and strictly ascending, got {grid}")
    report = ValidationReport()

    try:
        at_zero = spec.evaluate(0)
    except Exception as e:
        at_zero = None
        report.violations.append((0.0, 0.0, f"lambda(0) failed: {e}"))
    if at_zero != 0:
        report.zero_at_zero = False
        if at_zero is not None:
            report.violations.append((0.0, 0.0, f"lambda(0) = {at_zero}, expected 0"))

    values = [0.0]
    points = [0.0]
    for m in grid:
        try:
            values.append(spec.evaluate(m))
            points.append(m)
        except RangeError as e:
            report.surjective_hint = False
            report.violations.append((m, m, f"grid point outside the domain: {e}"))

    points = np.array(points)
    values = np.array(values)
    steps = np.diff(values)
    for i in np.flatnonzero(steps <= 0):
        report.monotone = False
        report.violations.append((points[i], points[i + 1],
                                  f"not increasing: lambda={values[i]} then {values[i + 1]}"))

    widths = np.diff(points)
    keep = widths > 0
    slopes = steps[keep] / widths[keep]
    left = points[:-1][keep]
    right = points[1:][keep]
    for i in range(len(slopes) - 1):
        if slopes[i + 1] > slopes[i] + tol * max(1.0, abs(slopes[i])):
            report.concave = False
            report.violations.append((left[i], right[i + 1],
                                      f"slope increases from {slopes[i]:.6g} to {slopes[i + 1]:.6g}"))
    return report
