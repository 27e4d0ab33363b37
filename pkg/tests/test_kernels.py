import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gravopt import (
    AgentState,
    ForceOverflowError,
    KernelSpec,
    distance,
    force_magnitude,
    pairwise_force,
    probe_exponent,
)

ALL_KERNELS_EPS0 = [
    KernelSpec.original(0.0),
    KernelSpec.inverse_linear(0.0),
    KernelSpec.inverse_square(0.0),
    KernelSpec.power_law(1.5, 0.0),
]


def agent(position, mass=1.0):
    position = np.asarray(position, dtype=float)
    return AgentState(
        position=position, velocity=np.zeros_like(position), fitness=0.0, mass=mass
    )


def random_pair(rng, dims, mass_range=(1e-3, 1e3), r_range=(1e-6, 1e6)):
    """Two agents at a log-uniform random distance along a random direction."""
    m_i = 10.0 ** rng.uniform(np.log10(mass_range[0]), np.log10(mass_range[1]))
    m_j = 10.0 ** rng.uniform(np.log10(mass_range[0]), np.log10(mass_range[1]))
    r = 10.0 ** rng.uniform(np.log10(r_range[0]), np.log10(r_range[1]))
    direction = rng.normal(size=dims)
    direction /= math.sqrt(float(np.dot(direction, direction)))
    x_i = rng.uniform(-1.0, 1.0, dims)
    return agent(x_i, m_i), agent(x_i + r * direction, m_j)


class TestDistance:
    def test_coincident_points(self):
        assert distance([0.0, 0.0], [0.0, 0.0]) == 0.0

    def test_three_four_five(self):
        assert distance([0.0, 0.0], [3.0, 4.0]) == pytest.approx(5.0, abs=0.0)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            distance([0.0], [0.0, 1.0])

    @given(
        st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=8),
        st.integers(min_value=0, max_value=2**32 - 1),
    )
    def test_symmetry(self, a, seed):
        rng = np.random.Generator(np.random.PCG64(seed))
        b = rng.uniform(-1e6, 1e6, len(a))
        assert distance(a, b) == distance(b, a)


class TestPairwiseForce:
    @pytest.mark.parametrize("kernel", ALL_KERNELS_EPS0 + [KernelSpec.original()])
    def test_zero_mass_annihilates(self, kernel):
        f = pairwise_force(kernel, 2.0, agent([0.0, 0.0], 0.0), agent([3.0, 4.0], 4.0))
        assert np.array_equal(f, np.zeros(2))

    def test_original_kernel_hand_value(self):
        # independent evaluation: R = 5, coeff = 2*3*4/5 = 4.8, f = 4.8*(3, 4)
        kernel = KernelSpec.original(0.0)
        f = pairwise_force(kernel, 2.0, agent([0.0, 0.0], 3.0), agent([3.0, 4.0], 4.0))
        assert f == pytest.approx([14.4, 19.2], rel=1e-15)
        assert force_magnitude(kernel, 2.0, agent([0.0, 0.0], 3.0), agent([3.0, 4.0], 4.0)) == pytest.approx(24.0, rel=1e-13)

    def test_original_magnitude_ignores_distance(self):
        # same masses and G, ten times the separation: magnitude unchanged
        kernel = KernelSpec.original(0.0)
        mag = force_magnitude(kernel, 2.0, agent([0.0, 0.0], 3.0), agent([30.0, 40.0], 4.0))
        assert mag == pytest.approx(24.0, rel=1e-13)

    def test_unit_distance_coincidence(self):
        # 1**q = 1 for every q: all kernels agree at R = 1
        a, b = agent([0.2, -0.3], 2.0), None
        direction = np.array([0.6, 0.8])
        b = agent(np.asarray([0.2, -0.3]) + direction, 3.0)
        reference = pairwise_force(ALL_KERNELS_EPS0[0], 1.5, a, b)
        for kernel in ALL_KERNELS_EPS0[1:]:
            assert pairwise_force(kernel, 1.5, a, b) == pytest.approx(
                reference, rel=1e-12
            )

    def test_inverse_square_hand_value(self):
        # independent evaluation: R = 5, R**3 = 125, coeff = 24/125 = 0.192
        kernel = KernelSpec.inverse_square(0.0)
        f = pairwise_force(kernel, 2.0, agent([0.0, 0.0], 3.0), agent([3.0, 4.0], 4.0))
        assert f == pytest.approx([0.576, 0.768], rel=1e-14)
        assert force_magnitude(kernel, 2.0, agent([0.0, 0.0], 3.0), agent([3.0, 4.0], 4.0)) == pytest.approx(0.96, rel=1e-13)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            pairwise_force(KernelSpec.original(), 1.0, agent([0.0]), agent([0.0, 1.0]))

    def test_overflow_raises(self):
        # R**3 underflows to zero for R = 1e-150, epsilon = 0 (any smaller
        # R underflows inside the norm itself and hits the coincident rule)
        kernel = KernelSpec.inverse_square(0.0)
        with pytest.raises(ForceOverflowError, match="increase epsilon"):
            pairwise_force(kernel, 1.0, agent([0.0], 1.0), agent([1e-150], 1.0))


class TestForceMagnitude:
    def test_unit_masses_far_apart(self):
        kernel = KernelSpec.original(0.0)
        mag = force_magnitude(kernel, 1.0, agent([0.0], 1.0), agent([1e6], 1.0))
        assert mag == pytest.approx(1.0, rel=1e-13)

    def test_coincident_agents(self):
        for kernel in ALL_KERNELS_EPS0:
            assert force_magnitude(kernel, 1.0, agent([1.0, 2.0]), agent([1.0, 2.0])) == 0.0

    def test_inverse_linear_hand_value(self):
        # G*m_i*m_j/R with R = 4 -> 0.25
        kernel = KernelSpec.inverse_linear(0.0)
        mag = force_magnitude(kernel, 1.0, agent([0.0], 1.0), agent([4.0], 1.0))
        assert mag == pytest.approx(0.25, rel=1e-14)


class TestProbeExponent:
    def test_original_slope_zero(self):
        report = probe_exponent(
            KernelSpec.original(0.0), 1.0, 1.0, 1.0, [1e-3, 1.0, 1e3, 1e6]
        )
        assert abs(report.fitted_slope) < 1e-9
        assert report.max_residual < 1e-9

    def test_inverse_square_slope(self):
        report = probe_exponent(
            KernelSpec.inverse_square(0.0), 1.0, 1.0, 1.0, [1e-3, 1.0, 1e3, 1e6]
        )
        assert report.fitted_slope == pytest.approx(-2.0, abs=1e-9)

    def test_fractional_exponent_matches_closed_form(self):
        g, m_i, m_j, q = 3.0, 2.0, 5.0, 1.5
        rs = np.geomspace(0.1, 1e4, 12)
        report = probe_exponent(KernelSpec.power_law(q, 0.0), g, m_i, m_j, rs)
        assert report.fitted_slope == pytest.approx(-q, abs=1e-9)
        # samples must match the closed-form magnitude G*m_i*m_j/R**q
        for r, magnitude in report.samples:
            assert magnitude == pytest.approx(g * m_i * m_j / r**q, rel=1e-12)

    def test_intercept_is_log_gmm(self):
        report = probe_exponent(KernelSpec.original(0.0), 100.0, 1.0, 1.0)
        assert report.fitted_intercept == pytest.approx(math.log(100.0), abs=1e-12)

    def test_nonpositive_distance_rejected(self):
        with pytest.raises(ValueError):
            probe_exponent(KernelSpec.original(0.0), 1.0, 1.0, 1.0, [0.0, 1.0])

    def test_needs_two_distinct_distances(self):
        with pytest.raises(ValueError):
            probe_exponent(KernelSpec.original(0.0), 1.0, 1.0, 1.0, [2.0, 2.0])

    def test_nonpositive_mass_rejected(self):
        with pytest.raises(ValueError):
            probe_exponent(KernelSpec.original(0.0), 1.0, 0.0, 1.0, [1.0, 2.0])


class TestInvariants:
    def test_antisymmetry_exact(self):
        rng = np.random.Generator(np.random.PCG64(101))
        for _ in range(200):
            dims = int(rng.integers(1, 8))
            a, b = random_pair(rng, dims)
            for kernel in ALL_KERNELS_EPS0:
                f_ij = pairwise_force(kernel, 2.5, a, b)
                f_ji = pairwise_force(kernel, 2.5, b, a)
                assert np.array_equal(f_ij, -f_ji)

    def test_attraction(self):
        rng = np.random.Generator(np.random.PCG64(202))
        for _ in range(200):
            dims = int(rng.integers(1, 8))
            a, b = random_pair(rng, dims)
            delta = b.position - a.position
            for kernel in ALL_KERNELS_EPS0:
                f = pairwise_force(kernel, 2.5, a, b)
                assert float(np.dot(f, delta)) >= 0.0

    def test_original_magnitude_closed_form(self):
        # |‖f‖ - G*m_i*m_j| <= 1e-12 * G*m_i*m_j across the randomized domain
        rng = np.random.Generator(np.random.PCG64(303))
        kernel = KernelSpec.original(0.0)
        for _ in range(500):
            dims = int(rng.integers(1, 51))
            a, b = random_pair(rng, dims)
            g = 10.0 ** rng.uniform(-3, 3)
            expected = g * a.mass * b.mass
            assert abs(force_magnitude(kernel, g, a, b) - expected) <= 1e-12 * expected

    @pytest.mark.parametrize("q", [0.0, 1.0, 2.0])
    def test_scaling_law(self, q):
        # scaling positions by lambda multiplies the magnitude by lambda**(-q)
        kernel = KernelSpec.power_law(q, 0.0)
        rng = np.random.Generator(np.random.PCG64(404))
        for _ in range(50):
            x_i = rng.uniform(-2.0, 2.0, 3)
            x_j = rng.uniform(-2.0, 2.0, 3)
            if np.array_equal(x_i, x_j):
                continue
            base = force_magnitude(kernel, 2.0, agent(x_i, 3.0), agent(x_j, 4.0))
            for lam in (0.01, 1.0, 100.0):
                scaled = force_magnitude(
                    kernel, 2.0, agent(lam * x_i, 3.0), agent(lam * x_j, 4.0)
                )
                tol = 1e-12 if q == 0.0 else 1e-9
                assert scaled == pytest.approx(base * lam ** (-q), rel=tol)

    @pytest.mark.parametrize("q", [0.0, 1.0, 2.0, 1.5])
    def test_unit_vector_form(self, q):
        # f equals [G*m_i*m_j/R**q] times the unit vector from i to j
        kernel = KernelSpec.power_law(q, 0.0)
        rng = np.random.Generator(np.random.PCG64(505))
        for _ in range(100):
            dims = int(rng.integers(1, 10))
            a, b = random_pair(rng, dims, r_range=(1e-3, 1e3))
            g = 2.0
            delta = b.position - a.position
            r = math.sqrt(float(np.dot(delta, delta)))
            expected = (g * a.mass * b.mass / r**q) * (delta / r)
            f = pairwise_force(kernel, g, a, b)
            np.testing.assert_allclose(f, expected, rtol=1e-12, atol=0.0)

    @pytest.mark.parametrize("q", [0.0, 1.0, 2.0])
    def test_epsilon_continuity(self, q):
        a, b = agent([0.1, -0.4], 2.0), agent([1.3, 0.9], 5.0)
        exact = pairwise_force(KernelSpec.power_law(q, 0.0), 3.0, a, b)
        deviations = []
        for eps in (1e-6, 1e-9, 1e-12):
            f = pairwise_force(KernelSpec.power_law(q, eps), 3.0, a, b)
            deviations.append(float(np.max(np.abs(f - exact))))
        assert deviations[0] >= deviations[1] >= deviations[2]
        assert deviations[2] <= 1e-11 * float(np.max(np.abs(exact)))

    def test_magnitude_rotation_invariant_2d(self):
        rng = np.random.Generator(np.random.PCG64(606))
        for kernel in ALL_KERNELS_EPS0:
            for _ in range(25):
                x_i = rng.uniform(-3.0, 3.0, 2)
                x_j = rng.uniform(-3.0, 3.0, 2)
                theta = rng.uniform(0.0, 2.0 * np.pi)
                rot = np.array(
                    [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
                )
                base = force_magnitude(kernel, 2.0, agent(x_i, 2.0), agent(x_j, 3.0))
                rotated = force_magnitude(
                    kernel, 2.0, agent(rot @ x_i, 2.0), agent(rot @ x_j, 3.0)
                )
                assert rotated == pytest.approx(base, rel=1e-12)

    def test_alias_kinds_bit_identical(self):
        rng = np.random.Generator(np.random.PCG64(707))
        pairs = [
            (KernelSpec.original(1e-12), KernelSpec.power_law(0.0, 1e-12)),
            (KernelSpec.inverse_linear(1e-12), KernelSpec.power_law(1.0, 1e-12)),
            (KernelSpec.inverse_square(1e-12), KernelSpec.power_law(2.0, 1e-12)),
        ]
        for _ in range(50):
            a, b = random_pair(rng, 4, r_range=(1e-3, 1e3))
            for named, generic in pairs:
                assert np.array_equal(
                    pairwise_force(named, 2.0, a, b),
                    pairwise_force(generic, 2.0, a, b),
                )
