"""Shared value types: agents, kernel selectors, run configuration, traces.

All types here are plain values, immutable after construction. Vector
fields are stored as read-only float64 numpy arrays. Construction rejects
non-finite entries; the numeric run invariants (population size, bounds
box, ...) are checked by :func:`validate_config`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Default softening constant for the force-law denominators. Far below
#: benchmark length scales yet above double-precision noise at them.
DEFAULT_EPSILON = 1e-12

_UINT64_MAX = 2**64 - 1


class ConfigError(ValueError):
    """A run configuration violates one of its invariants."""


def _readonly_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a 1-D vector with at least one entry")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    arr.flags.writeable = False
    return arr


def _finite_scalar(value, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class AgentState:
    """One point-mass agent: a candidate solution plus its dynamics.

    position encodes the candidate solution, fitness its objective value,
    and mass the dimensionless quality weight used by the force law.
    """

    position: np.ndarray
    velocity: np.ndarray
    fitness: float
    mass: float

    def __post_init__(self):
        position = _readonly_vector(self.position, "position")
        velocity = _readonly_vector(self.velocity, "velocity")
        if position.size != velocity.size:
            raise ValueError(
                f"position and velocity must have equal length "
                f"({position.size} != {velocity.size})"
            )
        mass = _finite_scalar(self.mass, "mass")
        if mass < 0.0:
            raise ValueError(f"mass must be >= 0, got {mass}")
        object.__setattr__(self, "position", position)
        object.__setattr__(self, "velocity", velocity)
        object.__setattr__(self, "fitness", _finite_scalar(self.fitness, "fitness"))
        object.__setattr__(self, "mass", mass)

    @property
    def dims(self) -> int:
        return self.position.size


@dataclass(frozen=True)
class KernelSpec:
    """Selects the pairwise force law.

    ``exponent`` (q) is the distance exponent of the force magnitude: with
    epsilon = 0 the magnitude is G*m_i*m_j / R**q. The per-component rule
    divides by R**(q+1) + epsilon, so q = 0 reproduces the classic GSA
    rule G*m_i*m_j / (R + epsilon) * (x_j - x_i) bit for bit, while q = 1
    and q = 2 give the inverse-linear and inverse-square laws. The named
    constructors are exact aliases of ``power_law`` at q = 0, 1, 2.
    """

    exponent: float
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        exponent = _finite_scalar(self.exponent, "exponent")
        epsilon = _finite_scalar(self.epsilon, "epsilon")
        if exponent < 0.0:
            raise ValueError(f"exponent must be >= 0, got {exponent}")
        if epsilon < 0.0:
            raise ValueError(f"epsilon must be >= 0, got {epsilon}")
        object.__setattr__(self, "exponent", exponent)
        object.__setattr__(self, "epsilon", epsilon)

    @classmethod
    def original(cls, epsilon: float = DEFAULT_EPSILON) -> "KernelSpec":
        """Classic GSA rule: magnitude independent of distance."""
        return cls(0.0, epsilon)

    @classmethod
    def inverse_linear(cls, epsilon: float = DEFAULT_EPSILON) -> "KernelSpec":
        """Magnitude proportional to 1/R (denominator R**2)."""
        return cls(1.0, epsilon)

    @classmethod
    def inverse_square(cls, epsilon: float = DEFAULT_EPSILON) -> "KernelSpec":
        """Magnitude proportional to 1/R**2 (denominator R**3)."""
        return cls(2.0, epsilon)

    @classmethod
    def power_law(cls, exponent: float, epsilon: float = DEFAULT_EPSILON) -> "KernelSpec":
        return cls(float(exponent), epsilon)

    @property
    def name(self) -> str:
        """Canonical name used by the CLI and in CSV output."""
        if self.exponent == 0.0:
            return "original"
        if self.exponent == 1.0:
            return "linear"
        if self.exponent == 2.0:
            return "square"
        return f"power:{self.exponent:g}"


@dataclass(frozen=True)
class GsaConfig:
    """Full configuration of one optimization run."""

    population: int
    dims: int
    lower_bound: np.ndarray
    upper_bound: np.ndarray
    kernel: KernelSpec
    g0: float = 100.0
    alpha: float = 20.0
    max_iters: int = 1000
    kbest_initial_fraction: float = 1.0
    deterministic_weights: bool = False
    seed: int = 0
    record_positions: bool = False

    def __post_init__(self):
        object.__setattr__(self, "population", int(self.population))
        object.__setattr__(self, "dims", int(self.dims))
        object.__setattr__(
            self, "lower_bound", _readonly_vector(self.lower_bound, "lower_bound")
        )
        object.__setattr__(
            self, "upper_bound", _readonly_vector(self.upper_bound, "upper_bound")
        )
        object.__setattr__(self, "g0", _finite_scalar(self.g0, "g0"))
        object.__setattr__(self, "alpha", _finite_scalar(self.alpha, "alpha"))
        object.__setattr__(self, "max_iters", int(self.max_iters))
        object.__setattr__(
            self,
            "kbest_initial_fraction",
            _finite_scalar(self.kbest_initial_fraction, "kbest_initial_fraction"),
        )
        object.__setattr__(
            self, "deterministic_weights", bool(self.deterministic_weights)
        )
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "record_positions", bool(self.record_positions))
        if not isinstance(self.kernel, KernelSpec):
            raise ValueError("kernel must be a KernelSpec")


def validate_config(config: GsaConfig) -> None:
    """Check every GsaConfig invariant.

    Raises ConfigError naming the first violated invariant; returns None
    when the configuration is valid.
    """
    if config.population < 2:
        raise ConfigError("population >= 2 required")
    if config.dims < 1:
        raise ConfigError("dims >= 1 required")
    if config.lower_bound.size != config.dims:
        raise ConfigError(
            f"lower_bound length {config.lower_bound.size} != dims {config.dims}"
        )
    if config.upper_bound.size != config.dims:
        raise ConfigError(
            f"upper_bound length {config.upper_bound.size} != dims {config.dims}"
        )
    if not np.all(config.lower_bound < config.upper_bound):
        raise ConfigError("bounds describe an empty box (lower < upper required)")
    if config.g0 <= 0.0:
        raise ConfigError("g0 > 0 required")
    if config.alpha < 0.0:
        raise ConfigError("alpha >= 0 required")
    if config.max_iters < 1:
        raise ConfigError("max_iters >= 1 required")
    if not 0.0 < config.kbest_initial_fraction <= 1.0:
        raise ConfigError("kbest_initial_fraction must lie in (0, 1]")
    if not 0 <= config.seed <= _UINT64_MAX:
        raise ConfigError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class TraceRecord:
    """Scalar summary of the population after one iteration."""

    iteration: int
    best_so_far: float
    population_best: float
    population_mean: float

    def __post_init__(self):
        object.__setattr__(self, "iteration", int(self.iteration))
        object.__setattr__(
            self, "best_so_far", _finite_scalar(self.best_so_far, "best_so_far")
        )
        object.__setattr__(
            self,
            "population_best",
            _finite_scalar(self.population_best, "population_best"),
        )
        object.__setattr__(
            self,
            "population_mean",
            _finite_scalar(self.population_mean, "population_mean"),
        )


@dataclass(frozen=True)
class RunTrace:
    """Per-iteration record of a completed run.

    records holds one TraceRecord per iteration; best_so_far is
    non-increasing across them. positions carries per-iteration position
    dumps only when the run was configured with record_positions.
    """

    records: tuple[TraceRecord, ...]
    final_best_position: np.ndarray
    positions: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        records = tuple(self.records)
        if not records:
            raise ValueError("trace must contain at least one record")
        for earlier, later in zip(records, records[1:]):
            if later.best_so_far > earlier.best_so_far:
                raise ValueError("best_so_far must be non-increasing")
        object.__setattr__(self, "records", records)
        object.__setattr__(
            self,
            "final_best_position",
            _readonly_vector(self.final_best_position, "final_best_position"),
        )

    @property
    def final_best(self) -> float:
        return self.records[-1].best_so_far


@dataclass(frozen=True)
class ProbeReport:
    """Sampled (distance, force magnitude) pairs and their log-log fit."""

    samples: tuple[tuple[float, float], ...]
    fitted_slope: float
    fitted_intercept: float
    max_residual: float

    def __post_init__(self):
        samples = tuple((float(r), float(m)) for r, m in self.samples)
        distances = {r for r, _ in samples}
        if len(distances) < 2:
            raise ValueError("probe needs at least two distinct distances")
        for r, m in samples:
            if not (math.isfinite(r) and math.isfinite(m)):
                raise ValueError("probe samples must be finite")
            if r <= 0.0:
                raise ValueError(f"probe distance must be > 0, got {r}")
            if m < 0.0:
                raise ValueError(f"force magnitude must be >= 0, got {m}")
        max_residual = _finite_scalar(self.max_residual, "max_residual")
        if max_residual < 0.0:
            raise ValueError("max_residual must be >= 0")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(
            self, "fitted_slope", _finite_scalar(self.fitted_slope, "fitted_slope")
        )
        object.__setattr__(
            self,
            "fitted_intercept",
            _finite_scalar(self.fitted_intercept, "fitted_intercept"),
        )
        object.__setattr__(self, "max_residual", max_residual)
