"""The optimization loop: masses from fitness, G decay, Kbest forces, motion.

Determinism contract
--------------------
Each run owns a single numpy PCG64 generator seeded from the config
(``RNG_NAME`` names the algorithm for trace headers). Uniform draws are
consumed in a fixed order so traces are bit-identical across machines:

1. ``initialize``: population * dims uniforms fill the positions
   row-major (agent index ascending, dimension ascending).
2. each ``step``, when ``deterministic_weights`` is false:
   a. force weights: for each agent i in index order, one block of
      uniforms, one per Kbest member j != i in ascending j order;
   b. velocity coefficients: population * dims uniforms, row-major.

With ``deterministic_weights`` set, no draws are consumed inside steps
and every weight and velocity coefficient is exactly 1, which makes
single-step oracle comparisons exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import AgentState, GsaConfig, KernelSpec, RunTrace, TraceRecord, validate_config
from .kernels import ForceOverflowError, _raw_force

#: Softening added to the acceleration denominator; the worst agent's
#: mass is exactly zero under min-max scaling, so a = F / m needs it.
MASS_SOFTENING = 1e-12

#: Name of the random-generator algorithm, recorded in trace headers.
RNG_NAME = "numpy-pcg64"

Objective = Callable[[np.ndarray], float]


class EvaluationError(RuntimeError):
    """The objective returned a non-finite value."""


class DivergenceError(RuntimeError):
    """The dynamics produced non-finite positions or velocities."""


def make_rng(seed: int) -> np.random.Generator:
    """The run generator: PCG64 seeded directly with the config seed."""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass
class SwarmState:
    """Mutable-by-replacement snapshot of one run in progress.

    Arrays are stored population-major: positions and velocities are
    (population, dims), fitnesses and masses are (population,). ``rng``
    is the single generator owned by the run; stepping consumes it.
    """

    positions: np.ndarray
    velocities: np.ndarray
    fitnesses: np.ndarray
    masses: np.ndarray
    iteration: int
    g_current: float
    best_so_far_fitness: float
    best_so_far_position: np.ndarray
    rng: np.random.Generator

    @property
    def population(self) -> int:
        return self.positions.shape[0]

    @property
    def dims(self) -> int:
        return self.positions.shape[1]

    @property
    def agents(self) -> tuple[AgentState, ...]:
        """The swarm as individual agent values (copies, for inspection)."""
        return tuple(
            AgentState(
                position=self.positions[i].copy(),
                velocity=self.velocities[i].copy(),
                fitness=float(self.fitnesses[i]),
                mass=float(self.masses[i]),
            )
            for i in range(self.population)
        )


def compute_masses(fitnesses: Sequence[float]) -> np.ndarray:
    """Min-max mass assignment under minimization.

    raw_i = (worst - fit_i) / (worst - best), normalized to sum to 1.
    The best agent gets the maximum mass, the worst gets exactly 0, and
    a population with all-equal fitness gets uniform masses 1/n. The
    scheme is invariant under positive affine transforms of the fitness.
    """
    fits = np.asarray(fitnesses, dtype=float)
    if fits.ndim != 1 or fits.size < 2:
        raise ValueError("compute_masses needs at least two fitness values")
    if not np.all(np.isfinite(fits)):
        raise ValueError("fitness values must be finite")
    best = fits.min()
    worst = fits.max()
    if best == worst:
        return np.full(fits.size, 1.0 / fits.size)
    raw = (worst - fits) / (worst - best)
    return raw / raw.sum()


def g_schedule(g0: float, alpha: float, t: int, max_iters: int) -> float:
    """Exponentially decaying gravitational constant g0 * exp(-alpha*t/T)."""
    if g0 <= 0.0:
        raise ValueError("g0 must be > 0")
    if alpha < 0.0:
        raise ValueError("alpha must be >= 0")
    if not 0 <= t <= max_iters:
        raise ValueError(f"t must lie in [0, {max_iters}], got {t}")
    return g0 * math.exp(-alpha * t / max_iters)


def kbest_size(t: int, max_iters: int, population: int, initial_fraction: float) -> int:
    """Number of force-exerting agents at iteration t.

    Decreases linearly from ceil(initial_fraction * population) at t = 0
    to 1 at t = max_iters - 1, rounding half up; always within [1, n].
    """
    if not 0.0 < initial_fraction <= 1.0:
        raise ValueError("initial_fraction must lie in (0, 1]")
    # The 1e-9 nudge keeps ceil() honest when fraction * n lands a few
    # ulps above an exact integer (e.g. 0.2 * 50).
    k0 = math.ceil(initial_fraction * population - 1e-9)
    k0 = min(max(k0, 1), population)
    if max_iters <= 1:
        return k0
    span = t / (max_iters - 1)
    k = math.floor(k0 + (1 - k0) * span + 0.5)
    return min(max(k, 1), population)


def kbest_indices(fitnesses: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k best-fitness agents, ties broken by lower index."""
    order = np.argsort(fitnesses, kind="stable")
    return order[:k]


def _evaluate_population(objective: Objective, positions: np.ndarray) -> np.ndarray:
    fitnesses = np.empty(positions.shape[0])
    for i in range(positions.shape[0]):
        value = float(objective(positions[i].copy()))
        if not math.isfinite(value):
            raise EvaluationError(
                f"objective returned non-finite value {value} for agent {i} "
                f"at position {positions[i].tolist()}"
            )
        fitnesses[i] = value
    return fitnesses


def initialize(config: GsaConfig, objective: Objective) -> SwarmState:
    """Seeded uniform start: positions in the box, velocities zero."""
    validate_config(config)
    rng = make_rng(config.seed)
    n, d = config.population, config.dims
    width = config.upper_bound - config.lower_bound
    positions = config.lower_bound + rng.random((n, d)) * width
    velocities = np.zeros((n, d))
    fitnesses = _evaluate_population(objective, positions)
    masses = compute_masses(fitnesses)
    best = int(np.argmin(fitnesses))
    return SwarmState(
        positions=positions,
        velocities=velocities,
        fitnesses=fitnesses,
        masses=masses,
        iteration=0,
        g_current=g_schedule(config.g0, config.alpha, 0, config.max_iters),
        best_so_far_fitness=float(fitnesses[best]),
        best_so_far_position=positions[best].copy(),
        rng=rng,
    )


def total_force(
    i: int,
    state: SwarmState,
    kernel: KernelSpec,
    config: GsaConfig,
    weights: np.ndarray | None = None,
) -> np.ndarray:
    """Aggregate force on agent i from the current Kbest set.

    F_i = sum over Kbest members j != i of w_j * f_ij, with f_ij the
    pairwise kernel force at the state's current G. Weights are 1 when
    the config is deterministic; otherwise they are either supplied
    (aligned with the Kbest members in ascending j order) or drawn from
    the state's generator in that same order.
    """
    n = state.population
    if not 0 <= i < n:
        raise ValueError(f"agent index {i} out of range [0, {n})")
    k = kbest_size(
        state.iteration, config.max_iters, n, config.kbest_initial_fraction
    )
    members = np.sort(kbest_indices(state.fitnesses, k))
    others = members[members != i]
    if weights is None:
        if config.deterministic_weights:
            weights = np.ones(others.size)
        else:
            weights = state.rng.random(others.size)
    else:
        weights = np.asarray(weights, dtype=float)
        if weights.size != others.size:
            raise ValueError(
                f"expected {others.size} weights for agent {i}, got {weights.size}"
            )
    force = np.zeros(state.dims)
    for w, j in zip(weights, others):
        force += w * _raw_force(
            kernel.exponent,
            kernel.epsilon,
            state.g_current,
            float(state.masses[i]),
            float(state.masses[j]),
            state.positions[i],
            state.positions[j],
        )
    return force


def _batch_forces(
    positions: np.ndarray,
    masses: np.ndarray,
    g: float,
    kernel: KernelSpec,
    kbest: np.ndarray,
    weight_matrix: np.ndarray,
) -> np.ndarray:
    """All agents' total forces at once; matches total_force per row."""
    n = positions.shape[0]
    diff = positions[None, :, :] - positions[:, None, :]  # diff[i, j] = x_j - x_i
    r = np.sqrt(np.einsum("ijd,ijd->ij", diff, diff))
    # Same grouping as the pairwise kernel: the mass-product matrix is
    # exactly symmetric, so pairwise forces cancel exactly in the sum.
    num = g * (masses[:, None] * masses[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        coeff = num / (r ** (kernel.exponent + 1.0) + kernel.epsilon)
    coeff[r == 0.0] = 0.0
    coeff[num == 0.0] = 0.0
    mask = np.zeros((n, n), dtype=bool)
    mask[:, kbest] = True
    np.fill_diagonal(mask, False)
    coeff = np.where(mask, coeff * weight_matrix, 0.0)
    forces = np.einsum("ij,ijd->id", coeff, diff)
    if not np.all(np.isfinite(forces)):
        raise ForceOverflowError("force overflow; increase epsilon")
    return forces


def step(state: SwarmState, config: GsaConfig, objective: Objective) -> SwarmState:
    """Advance the swarm by one iteration; consumes the input state's rng."""
    if state.iteration >= config.max_iters:
        raise ValueError("run already reached max_iters")
    n, d = state.positions.shape
    k = kbest_size(
        state.iteration, config.max_iters, n, config.kbest_initial_fraction
    )
    members = kbest_indices(state.fitnesses, k)

    weight_matrix = np.ones((n, n))
    if not config.deterministic_weights:
        sorted_members = np.sort(members)
        for i in range(n):
            js = sorted_members[sorted_members != i]
            weight_matrix[i, js] = state.rng.random(js.size)

    forces = _batch_forces(
        state.positions, state.masses, state.g_current, config.kernel,
        members, weight_matrix,
    )
    accel = forces / (state.masses + MASS_SOFTENING)[:, None]

    if config.deterministic_weights:
        velocities = state.velocities + accel
    else:
        velocities = state.rng.random((n, d)) * state.velocities + accel
    raw = state.positions + velocities
    if not (np.all(np.isfinite(raw)) and np.all(np.isfinite(velocities))):
        raise DivergenceError("dynamics diverged; increase epsilon or reduce g0")
    positions = np.clip(raw, config.lower_bound, config.upper_bound)
    velocities = np.where(positions != raw, 0.0, velocities)

    fitnesses = _evaluate_population(objective, positions)
    masses = compute_masses(fitnesses)
    iteration = state.iteration + 1
    best = int(np.argmin(fitnesses))
    if fitnesses[best] < state.best_so_far_fitness:
        best_fitness = float(fitnesses[best])
        best_position = positions[best].copy()
    else:
        best_fitness = state.best_so_far_fitness
        best_position = state.best_so_far_position
    return SwarmState(
        positions=positions,
        velocities=velocities,
        fitnesses=fitnesses,
        masses=masses,
        iteration=iteration,
        g_current=g_schedule(config.g0, config.alpha, iteration, config.max_iters),
        best_so_far_fitness=best_fitness,
        best_so_far_position=best_position,
        rng=state.rng,
    )


def run(config: GsaConfig, objective: Objective) -> RunTrace:
    """Initialize then step exactly max_iters times.

    Bit-identical traces for identical (config, objective).
    """
    state = initialize(config, objective)
    records = []
    position_dumps = [] if config.record_positions else None
    for _ in range(config.max_iters):
        state = step(state, config, objective)
        records.append(
            TraceRecord(
                iteration=state.iteration,
                best_so_far=state.best_so_far_fitness,
                population_best=float(state.fitnesses.min()),
                population_mean=float(state.fitnesses.mean()),
            )
        )
        if position_dumps is not None:
            position_dumps.append(state.positions.copy())
    return RunTrace(
        records=tuple(records),
        final_best_position=state.best_so_far_position.copy(),
        positions=tuple(position_dumps) if position_dumps is not None else None,
    )
