# test_statevector_sim.py
import math
import unittest

import numpy as np

from circuit_ir import Circuit, Gate
from spectral_analysis import InitialCoefficients, analytic_purity
from statevector_sim import (
    PurityMethod, ResourceLimitError, StateVector, apply_circuit, exact_trace_purity,
    point_seed, reduced_purity_exact, sample_purity, simulate_pipeline_state,
    simulate_swap_test_p0, swap_operator, swap_test_p0, swap_trace,
)
from walsh_core import EvolutionParams, phase_vector


def _basis(width, index):
    amplitudes = np.zeros(2 ** width, dtype=complex)
    amplitudes[index] = 1.0
    return StateVector(width, amplitudes)


class TestGateApplication(unittest.TestCase):
    """Тесты применения вентилей"""

    def test_hadamard(self):
        state = apply_circuit(StateVector.zero(1), Circuit(1, (Gate.h(0),)))
        np.testing.assert_allclose(state.amplitudes, [1 / math.sqrt(2)] * 2)

    def test_rotation_z(self):
        theta = 0.7
        state = apply_circuit(StateVector.zero(1), Circuit(1, (Gate.h(0), Gate.rz(0, theta))))
        expected = np.array([np.exp(-0.5j * theta), np.exp(0.5j * theta)]) / math.sqrt(2)
        np.testing.assert_allclose(state.amplitudes, expected)

    def test_qubit_zero_is_most_significant(self):
        """|10> (индекс 2) -> CNOT(0 -> 1) -> |11> (индекс 3)"""
        state = apply_circuit(_basis(2, 2), Circuit(2, (Gate.cx(0, 1),)))
        np.testing.assert_allclose(state.amplitudes, [0, 0, 0, 1])
        unchanged = apply_circuit(_basis(2, 1), Circuit(2, (Gate.cx(0, 1),)))
        np.testing.assert_allclose(unchanged.amplitudes, [0, 1, 0, 0])

    def test_controlled_swap(self):
        """|101> -> |110>"""
        state = apply_circuit(_basis(3, 0b101), Circuit(3, (Gate.cswap(0, 1, 2),)))
        self.assertAlmostEqual(abs(state.amplitudes[0b110]), 1.0)

    def test_input_state_not_modified(self):
        state = StateVector.zero(2)
        apply_circuit(state, Circuit(2, (Gate.h(0),)))
        np.testing.assert_allclose(state.amplitudes, [1, 0, 0, 0])

    def test_errors(self):
        with self.assertRaises(ValueError):
            apply_circuit(StateVector.zero(2), Circuit(3, (Gate.h(0),)))
        with self.assertRaises(ValueError):
            apply_circuit(StateVector.zero(1), Circuit(1, (Gate.h(0), Gate.measure(0))))
        with self.assertRaises(ValueError):
            StateVector(2, np.zeros(3))


class TestPipelineState(unittest.TestCase):
    """Тесты состояния после подготовки и эволюции"""

    def test_zero_time_is_uniform(self):
        state = simulate_pipeline_state(2, EvolutionParams(0.1, 0.0, 2), check_norm=True)
        np.testing.assert_allclose(state.amplitudes, [0.5] * 4, atol=1e-12)

    def test_phases_follow_product(self):
        """Амплитуда с индексом (n_A-1)*2 + (n_B-1) получает фазу exp(-i 0.1 n_A n_B)"""
        state = simulate_pipeline_state(2, EvolutionParams(0.1, 1.0, 2))
        f = phase_vector(2).entries
        np.testing.assert_allclose(np.abs(state.amplitudes), 0.5, atol=1e-12)
        ratio = state.amplitudes / np.exp(-0.1j * f)
        np.testing.assert_allclose(ratio, ratio[0], atol=1e-12)


class TestPurity(unittest.TestCase):
    """Тесты точной чистоты и SWAP-теста"""

    def test_product_state(self):
        state = simulate_pipeline_state(4, EvolutionParams(0.1, 0.0, 4))
        self.assertAlmostEqual(reduced_purity_exact(state, 2).value, 1.0, places=12)

    def test_bell_state(self):
        bell = StateVector(2, np.array([1, 0, 0, 1]) / math.sqrt(2))
        estimate = reduced_purity_exact(bell, 1)
        self.assertAlmostEqual(estimate.value, 0.5, places=12)
        self.assertEqual(estimate.method, PurityMethod.EXACT_TRACE)
        self.assertEqual(estimate.shots, 0)

    def test_cut_mismatch(self):
        with self.assertRaises(ValueError):
            reduced_purity_exact(StateVector.zero(4), 1)
        with self.assertRaises(ValueError):
            reduced_purity_exact(StateVector.zero(3), 1)

    def test_matches_analytic_d4(self):
        value = exact_trace_purity(4, EvolutionParams(0.1, 5.0, 4)).value
        expected = analytic_purity(InitialCoefficients.uniform(4), 0.1, 5.0)
        self.assertAlmostEqual(value, expected, delta=1e-10)

    def test_swap_p0_at_zero_time(self):
        estimate = simulate_swap_test_p0(2, EvolutionParams(0.1, 0.0, 2))
        self.assertAlmostEqual(estimate.p0, 1.0, places=12)
        self.assertAlmostEqual(estimate.value, 1.0, places=12)

    def test_swap_p0_quarter_period(self):
        params = EvolutionParams(0.1, 0.25 * 2 * math.pi / 0.1, 2)
        gamma = exact_trace_purity(2, params).value
        estimate = simulate_swap_test_p0(2, params)
        self.assertAlmostEqual(estimate.p0, (1 + gamma) / 2, delta=1e-10)

    def test_backends_agree(self):
        """exact-trace, swap-exact и аналитика совпадают до 1e-9"""
        rng = np.random.default_rng(5)
        for d in (2, 4, 8):
            coeffs = InitialCoefficients.uniform(d)
            for t in rng.uniform(0.0, 2 * math.pi / 0.1, size=10):
                params = EvolutionParams(0.1, float(t), d)
                exact = exact_trace_purity(d, params).value
                swap = simulate_swap_test_p0(d, params)
                analytic = analytic_purity(coeffs, 0.1, float(t))
                self.assertAlmostEqual(exact, analytic, delta=1e-9)
                self.assertAlmostEqual(swap.value, analytic, delta=1e-9)
                self.assertAlmostEqual(swap.value, 2 * swap.p0 - 1, places=15)

    def test_swap_p0_requires_odd_width(self):
        with self.assertRaises(ValueError):
            swap_test_p0(StateVector.zero(4))

    def test_resource_limit(self):
        with self.assertRaises(ResourceLimitError):
            simulate_swap_test_p0(128, EvolutionParams(0.1, 1.0, 128))


class TestSampling(unittest.TestCase):
    """Тесты выборки по shots"""

    def test_certain_outcome(self):
        estimate = sample_purity(1.0, 1000, seed=3)
        self.assertEqual(estimate.value, 1.0)
        self.assertEqual(estimate.method, PurityMethod.SWAP_SAMPLED)
        self.assertEqual(estimate.shots, 1000)

    def test_statistical_accuracy(self):
        estimate = sample_purity(0.9, 100_000, seed=7)
        self.assertLessEqual(abs(estimate.value - 0.8), 0.012)

    def test_deterministic(self):
        self.assertEqual(sample_purity(0.6, 5000, 42).value, sample_purity(0.6, 5000, 42).value)

    def test_validation(self):
        with self.assertRaises(ValueError):
            sample_purity(0.5, 0, 1)
        with self.assertRaises(ValueError):
            sample_purity(1.5, 10, 1)

    def test_point_seeds(self):
        seeds = [point_seed(2024, i) for i in range(200)]
        self.assertEqual(len(set(seeds)), 200)
        self.assertEqual(point_seed(2024, 17), seeds[17])
        self.assertNotEqual(point_seed(2025, 0), seeds[0])
        self.assertTrue(all(0 <= s < 2 ** 64 for s in seeds))


class TestSwapTrace(unittest.TestCase):
    """Тождество Tr((V1 x V2) SWAP) = Tr(V1 V2)"""

    def test_swap_operator_permutes(self):
        swap = swap_operator(3)
        a, b = np.eye(3)[0], np.eye(3)[2]
        np.testing.assert_array_equal(swap @ np.kron(a, b), np.kron(b, a))

    def test_identity_random_matrices(self):
        rng = np.random.default_rng(19)
        for dim in (2, 5, 16):
            v1 = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            v2 = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            self.assertAlmostEqual(abs(swap_trace(v1, v2) - np.trace(v1 @ v2)), 0.0, delta=1e-10)


if __name__ == "__main__":
    unittest.main()
