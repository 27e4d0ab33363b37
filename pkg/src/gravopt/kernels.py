"""Pairwise force kernels and the log-log exponent probe.

Every kernel in the family computes the force exerted on agent i by
agent j, per dimension d, as

    f_d = G * m_i * m_j / (R**(q+1) + epsilon) * (x_j_d - x_i_d)

where R is the Euclidean distance between the agents and q >= 0 is the
kernel exponent. With epsilon = 0 the force magnitude reduces to
G * m_i * m_j / R**q:

* q = 0 (``original``): the classic GSA rule. The R in the denominator
  cancels the length of the un-normalized difference vector, so the
  magnitude is G * m_i * m_j regardless of distance.
* q = 1 (``linear``): denominator R**2, magnitude proportional to 1/R.
* q = 2 (``square``): denominator R**3, magnitude proportional to 1/R**2,
  i.e. a genuine inverse-square law.

``probe_exponent`` measures the effective distance exponent of any kernel
empirically by fitting log magnitude against log distance.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .core import AgentState, KernelSpec, ProbeReport

#: 25 logarithmically spaced probe distances spanning nine decades.
DEFAULT_PROBE_DISTANCES: tuple[float, ...] = tuple(np.geomspace(1e-3, 1e6, 25))


class ForceOverflowError(ArithmeticError):
    """A force evaluation produced a non-finite component."""


def distance(x_i, x_j) -> float:
    """Euclidean distance between two positions of equal length."""
    a = np.asarray(x_i, dtype=float)
    b = np.asarray(x_j, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"positions must be 1-D and equal length, got {a.shape} and {b.shape}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("positions must be finite")
    delta = b - a
    return math.sqrt(float(np.dot(delta, delta)))


def _raw_force(
    exponent: float,
    epsilon: float,
    g: float,
    m_i: float,
    m_j: float,
    x_i: np.ndarray,
    x_j: np.ndarray,
) -> np.ndarray:
    """Force on i from j, on raw arrays. Callers validate their inputs."""
    delta = x_j - x_i
    r = math.sqrt(float(np.dot(delta, delta)))
    # Grouping the mass product keeps the coefficient bit-identical under
    # argument swap, which makes antisymmetry exact rather than approximate.
    num = g * (m_i * m_j)
    if r == 0.0 or num == 0.0:
        # Coincident agents exert no force on each other; a zero mass
        # annihilates the pair product before any division can misbehave.
        return np.zeros_like(delta)
    denominator = r ** (exponent + 1.0) + epsilon
    if denominator == 0.0:
        # R below the underflow scale of R**(q+1) with epsilon = 0
        raise ForceOverflowError("force overflow; increase epsilon")
    force = num / denominator * delta
    if not np.all(np.isfinite(force)):
        raise ForceOverflowError("force overflow; increase epsilon")
    return force


def pairwise_force(
    kernel: KernelSpec, g: float, agent_i: AgentState, agent_j: AgentState
) -> np.ndarray:
    """Force vector exerted on agent_i by agent_j under the given kernel.

    Returns an array of agent dimensionality. Antisymmetric in the two
    agents and always pointing from i toward j. Coincident agents yield
    the zero vector for every kernel kind and any epsilon.
    """
    if agent_i.dims != agent_j.dims:
        raise ValueError(
            f"agents have mismatched dimensionality ({agent_i.dims} != {agent_j.dims})"
        )
    g = float(g)
    if not math.isfinite(g) or g <= 0.0:
        raise ValueError(f"G must be finite and > 0, got {g}")
    return _raw_force(
        kernel.exponent,
        kernel.epsilon,
        g,
        agent_i.mass,
        agent_j.mass,
        agent_i.position,
        agent_j.position,
    )


def force_magnitude(
    kernel: KernelSpec, g: float, agent_i: AgentState, agent_j: AgentState
) -> float:
    """Euclidean norm of the pairwise force between two agents."""
    force = pairwise_force(kernel, g, agent_i, agent_j)
    return math.sqrt(float(np.dot(force, force)))


def probe_exponent(
    kernel: KernelSpec,
    g: float,
    m_i: float,
    m_j: float,
    r_values: Sequence[float] = DEFAULT_PROBE_DISTANCES,
) -> ProbeReport:
    """Empirically fit the kernel's force-magnitude distance exponent.

    Places one agent at the origin and the other at distance r along the
    first coordinate axis for every r in r_values (magnitudes are
    rotation-invariant, so one axis suffices), then fits log magnitude
    against log distance by ordinary least squares. For an exact power
    law with epsilon = 0 the fitted slope is -q to floating-point noise.
    """
    rs = np.asarray(r_values, dtype=float)
    if rs.ndim != 1 or np.unique(rs).size < 2:
        raise ValueError("r_values needs at least two distinct entries")
    if not np.all(np.isfinite(rs)) or np.any(rs <= 0.0):
        raise ValueError("all probe distances must be finite and > 0")
    m_i = float(m_i)
    m_j = float(m_j)
    if not (m_i > 0.0 and m_j > 0.0 and math.isfinite(m_i) and math.isfinite(m_j)):
        raise ValueError("probe masses must be finite and > 0")

    zero = np.zeros(2)
    origin = AgentState(position=zero, velocity=zero, fitness=0.0, mass=m_i)
    magnitudes = np.empty(rs.size)
    for idx, r in enumerate(rs):
        other = AgentState(
            position=np.array([r, 0.0]), velocity=zero, fitness=0.0, mass=m_j
        )
        magnitudes[idx] = force_magnitude(kernel, g, origin, other)
    if np.any(magnitudes == 0.0):
        raise ValueError("zero force magnitude encountered during probe")

    log_r = np.log(rs)
    log_m = np.log(magnitudes)
    slope, intercept = np.polyfit(log_r, log_m, 1)
    residuals = log_m - (slope * log_r + intercept)
    return ProbeReport(
        samples=tuple(zip(rs.tolist(), magnitudes.tolist())),
        fitted_slope=float(slope),
        fitted_intercept=float(intercept),
        max_residual=float(np.max(np.abs(residuals))),
    )
