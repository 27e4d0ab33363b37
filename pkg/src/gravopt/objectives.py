"""Benchmark objectives with known optima: sphere, rastrigin, rosenbrock, ackley.

All four are minimized; the global optimum value is 0 (sphere, rastrigin
and ackley at the origin, rosenbrock at the all-ones point). Each carries
its customary symmetric box bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


def sphere(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(x * x))


def rastrigin(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x) + 10.0))


def rosenbrock(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def ackley(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    n = x.size
    s1 = np.sum(x * x)
    s2 = np.sum(np.cos(2.0 * np.pi * x))
    return float(
        -20.0 * np.exp(-0.2 * np.sqrt(s1 / n)) - np.exp(s2 / n) + 20.0 + np.e
    )


# name -> (function, symmetric half-width of the default box)
_REGISTRY: dict[str, tuple[Callable[[np.ndarray], float], float]] = {
    "sphere": (sphere, 100.0),
    "rastrigin": (rastrigin, 5.12),
    "rosenbrock": (rosenbrock, 30.0),
    "ackley": (ackley, 32.0),
}


def objective_names() -> tuple[str, ...]:
    return tuple(_REGISTRY)


@dataclass(frozen=True)
class ObjectiveSpec:
    """A named benchmark function at a fixed dimensionality."""

    name: str
    dims: int
    default_lower: float
    default_upper: float

    def __post_init__(self):
        if self.name not in _REGISTRY:
            raise ValueError(
                f"unknown objective '{self.name}'; valid names: "
                + ", ".join(objective_names())
            )
        if self.dims < 1:
            raise ValueError("dims >= 1 required")

    @property
    def function(self) -> Callable[[np.ndarray], float]:
        return _REGISTRY[self.name][0]


def make_objective(name: str, dims: int) -> ObjectiveSpec:
    """Look up a benchmark by name (case-insensitive) at the given dims."""
    key = str(name).strip().lower()
    if key not in _REGISTRY:
        raise ValueError(
            f"unknown objective '{name}'; valid names: " + ", ".join(objective_names())
        )
    half_width = _REGISTRY[key][1]
    return ObjectiveSpec(
        name=key, dims=int(dims), default_lower=-half_width, default_upper=half_width
    )


def evaluate(spec: ObjectiveSpec, x) -> float:
    """Evaluate the benchmark, validating length and finiteness of x."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size != spec.dims:
        raise ValueError(f"expected a vector of length {spec.dims}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("objective input must be finite")
    return spec.function(arr)
