# test_primality.py
import unittest

import numpy as np

from primality import (
    RegimeLabel, Tolerance, Verdict, classify, default_tolerance, minimal_composite_excess,
    regime_of, sieve_oracle, tolerance_budget,
)
from run_config import default_partitions
from spectral_analysis import (
    FourierSpectrum, InitialCoefficients, PuritySeries, analytic_fourier_modes, analytic_series,
    simpson_fourier,
)

OMEGA = 0.1


def _analytic(d):
    return analytic_fourier_modes(InitialCoefficients.uniform(d))


def _sampled_series(d, p, shots, seed):
    """Ряд как у fast-sampled: точная чистота плюс биномиальная выборка P0 = (1 + gamma) / 2"""
    exact = analytic_series(InitialCoefficients.uniform(d), OMEGA, p)
    rng = np.random.default_rng(seed)
    p0 = (1.0 + np.clip(exact.values, -1.0, 1.0)) / 2.0
    values = 2.0 * rng.binomial(shots, p0) / shots - 1.0
    return PuritySeries(d, OMEGA, p, exact.times, values, method="fast-sampled", shots=shots)


class TestRegimes(unittest.TestCase):
    """Тесты разбиения n на режимы"""

    def test_boundaries_d16(self):
        self.assertEqual(regime_of(2, 16), RegimeLabel.I)
        self.assertEqual(regime_of(15, 16), RegimeLabel.I)
        self.assertEqual(regime_of(16, 16), RegimeLabel.II)
        self.assertEqual(regime_of(30, 16), RegimeLabel.II)
        self.assertEqual(regime_of(31, 16), RegimeLabel.III)
        self.assertEqual(regime_of(225, 16), RegimeLabel.III)

    def test_out_of_range(self):
        with self.assertRaises(ValueError):
            regime_of(1, 16)
        with self.assertRaises(ValueError):
            regime_of(226, 16)


class TestSieve(unittest.TestCase):
    """Тесты эталонного решета"""

    def test_small(self):
        self.assertEqual(sieve_oracle(10), frozenset({2, 3, 5, 7}))
        self.assertEqual(sieve_oracle(2), frozenset({2}))

    def test_counts(self):
        self.assertEqual(len(sieve_oracle(30)), 10)
        self.assertEqual(len(sieve_oracle(126)), 30)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            sieve_oracle(1)


class TestClassify(unittest.TestCase):
    """Тесты классификации по модам"""

    def test_d16_matches_sieve(self):
        report = classify(_analytic(16), 2 / 16 ** 4, include_regime_three=False)
        self.assertEqual(report.disagreements, [])
        primes = {row.n for row in report.rows if row.verdict == Verdict.PRIME}
        self.assertEqual(primes, {2, 3, 5, 7, 11, 13, 17, 19, 23, 29})
        self.assertEqual(len(report.rows), 29)

    def test_d16_n22_composite(self):
        spectrum = _analytic(16)
        report = classify(spectrum, 2 / 16 ** 4, include_regime_three=False)
        row = next(r for r in report.rows if r.n == 22)
        self.assertEqual(row.regime, RegimeLabel.II)
        self.assertEqual(row.verdict, Verdict.COMPOSITE)
        self.assertGreater(spectrum.alpha(22), 0)

    def test_regime_three_caveat_d8(self):
        report = classify(_analytic(8), 2 / 8 ** 4)
        rows = {row.n: row for row in report.rows}
        self.assertEqual(rows[22].verdict, Verdict.INCONCLUSIVE)
        self.assertEqual(rows[29].verdict, Verdict.INCONCLUSIVE)
        self.assertEqual(rows[21].verdict, Verdict.COMPOSITE)
        self.assertTrue(rows[22].agree)
        self.assertIsNone(rows[21].bound)

    def test_soundness_all_dimensions(self):
        for d in (4, 8, 16, 32):
            report = classify(_analytic(d), 2 / d ** 4)
            self.assertEqual(report.disagreements, [], f"d={d}")
            decidable = [row for row in report.rows if row.regime != RegimeLabel.III]
            self.assertTrue(all(row.verdict != Verdict.INCONCLUSIVE for row in decidable))

    def test_tampered_mode_flagged(self):
        spectrum = _analytic(16)
        modes = spectrum.modes.copy()
        modes[7] += 0.01
        report = classify(spectrum.with_modes(modes), 2 / 16 ** 4, include_regime_three=False)
        self.assertEqual([row.n for row in report.disagreements], [7])
        self.assertEqual(report.summary()["disagree"], 1)

    def test_robust_to_small_noise(self):
        d = 16
        tau = 2 / d ** 4
        spectrum = _analytic(d)
        baseline = classify(spectrum, tau, include_regime_three=False)
        rng = np.random.default_rng(23)
        for _ in range(20):
            noise = rng.uniform(-0.49 * tau, 0.49 * tau, size=spectrum.modes.size)
            noisy = classify(spectrum.with_modes(spectrum.modes + noise), tau, include_regime_three=False)
            self.assertEqual([r.verdict for r in noisy.rows], [r.verdict for r in baseline.rows])

    def test_preconditions(self):
        with self.assertRaises(ValueError):
            classify(analytic_fourier_modes(InitialCoefficients.uniform(2)), 0.1)
        with self.assertRaises(ValueError):
            classify(FourierSpectrum(8, np.zeros(15), "simpson"), 1e-3)
        short = _analytic(8)
        with self.assertRaises(ValueError):
            classify(FourierSpectrum(8, short.modes[:10], "analytic", {}), 1e-3)

    def test_report_dict(self):
        data = classify(_analytic(4), 2 / 256).to_dict()
        self.assertEqual(data["d"], 4)
        self.assertFalse(data["clamped"])
        self.assertEqual(data["rows"][0]["verdict"], "prime")
        self.assertEqual(data["summary"]["disagree"], 0)


class TestTolerance(unittest.TestCase):
    """Тесты допуска tau"""

    def test_noiseless(self):
        self.assertAlmostEqual(default_tolerance(16), 2 / 16 ** 4, places=18)
        self.assertAlmostEqual(default_tolerance(4), 2 / 256, places=15)

    def test_minimal_excess(self):
        self.assertAlmostEqual(minimal_composite_excess(_analytic(4)), 1 / 16, places=15)
        self.assertGreaterEqual(minimal_composite_excess(_analytic(16)), 4 / 16 ** 4)

    def test_sampled_inflates_and_converges(self):
        noiseless = default_tolerance(16)
        sampled = default_tolerance(16, shots=100_000, p=376)
        huge = default_tolerance(16, shots=10 ** 14, p=376)
        self.assertGreater(sampled, noiseless)
        self.assertLess(huge - noiseless, 1e-6)

    def test_sampled_never_exceeds_half_excess(self):
        for d in (4, 8, 16, 32):
            p = default_partitions(d)
            excess = minimal_composite_excess(_analytic(d))
            for shots in (100, 10_000, 100_000):
                budget = tolerance_budget(d, shots, p, OMEGA)
                self.assertLessEqual(budget.value, excess / 2)
                wanted = budget.noiseless + 3 * budget.sigma_max
                self.assertEqual(budget.clamped, wanted > excess / 2)

    def test_d32_default_shots_clamped(self):
        messages = []
        budget = tolerance_budget(32, 100_000, 1500, OMEGA, messages.append)
        excess = minimal_composite_excess(_analytic(32))
        self.assertTrue(budget.clamped)
        self.assertEqual(budget.value, excess / 2)
        self.assertGreater(budget.sigma_max, 0.0)
        self.assertEqual(len(messages), 1)
        self.assertIn("⚠️", messages[0])

    def test_many_shots_not_clamped(self):
        messages = []
        budget = tolerance_budget(16, 10 ** 14, 376, OMEGA, messages.append)
        self.assertFalse(budget.clamped)
        self.assertEqual(messages, [])
        self.assertEqual(default_tolerance(16, 10 ** 14, 376), budget.value)

    def test_noiseless_budget(self):
        budget = tolerance_budget(8)
        self.assertEqual(budget.value, budget.noiseless)
        self.assertEqual(budget.sigma_max, 0.0)
        self.assertFalse(budget.clamped)

    def test_sampled_needs_partitions(self):
        with self.assertRaises(ValueError):
            default_tolerance(16, shots=1000)

    def test_small_dimension(self):
        with self.assertRaises(ValueError):
            default_tolerance(2)


class TestSimpsonClassification(unittest.TestCase):
    """Классификация по модам Симпсона на сетках по умолчанию"""

    def test_noiseless_default_partitions(self):
        for d in (4, 8, 16, 32):
            p = default_partitions(d)
            series = analytic_series(InitialCoefficients.uniform(d), OMEGA, p)
            spectrum = simpson_fourier(series, 2 * (d - 1))
            report = classify(spectrum, tolerance_budget(d), include_regime_three=False)
            self.assertEqual(report.disagreements, [], f"d={d}, p={p}")
            self.assertEqual(len(report.rows), 2 * d - 3)
            self.assertFalse(report.clamped)

    def test_d32_sampled_with_enough_shots(self):
        shots = 10 ** 9
        spectrum = simpson_fourier(_sampled_series(32, 1500, shots, seed=7), 62)
        budget = tolerance_budget(32, shots, 1500, OMEGA)
        self.assertFalse(budget.clamped)
        report = classify(spectrum, budget, include_regime_three=False)
        self.assertEqual(report.disagreements, [])

    def test_d32_sampled_default_shots_is_flagged(self):
        # при 10^5 shots шум моды сравним с минимальным превышением: ошибки возможны
        shots = 100_000
        spectrum = simpson_fourier(_sampled_series(32, 1500, shots, seed=1), 62)
        report = classify(spectrum, tolerance_budget(32, shots, 1500, OMEGA), include_regime_three=False)
        self.assertTrue(report.clamped)
        self.assertTrue(report.to_dict()["clamped"])
        self.assertLessEqual(len(report.disagreements), 15)

    def test_clamp_flag_passes_through(self):
        report = classify(_analytic(8), Tolerance(1e-4, 1e-4, 1e-3, clamped=True))
        self.assertTrue(report.clamped)
        self.assertEqual(report.tau, 1e-4)
        self.assertFalse(classify(_analytic(8), 1e-4).clamped)


if __name__ == "__main__":
    unittest.main()
