import math

from django.test import SimpleTestCase, override_settings

from core.exceptions import DomainError
from recovery.bounds import (
    CorollaryCase,
    corollary_bounds,
    dense_threshold,
    evaluate_bounds,
    f1,
    f2,
    fano_error_lower_a,
    fano_error_lower_b,
    fano_error_lower_sparse_a,
    fano_error_lower_sparse_b,
    g1,
    g1_general,
    g2,
    gauss_channel_lower,
)
from recovery.mixtures import binary_entropy
from recovery.params import ProblemParams, Regime, log_choose

# (ln 6 - 1) / (1/2 ln 2), about 2.284535
F1_4_2_1 = (math.log(6) - 1) / (0.5 * math.log(2))


def point(p=4, k=2, beta_min=1.0, gamma=1.0, n=1):
    return ProblemParams(n=n, p=p, k=k, beta_min=beta_min, gamma=gamma)


class DenseBoundTests(SimpleTestCase):

    def test_known_values(self):
        self.assertAlmostEqual(f1(4, 2, 1.0), F1_4_2_1, places=9)
        self.assertAlmostEqual(f2(4, 2, 1.0), 0.38609, delta=1e-5)
        self.assertAlmostEqual(f1(12, 2, math.sqrt(0.1)), 41.38, delta=0.01)

    def test_dense_threshold_takes_the_maximum(self):
        report = dense_threshold(point())
        self.assertAlmostEqual(report.dense_threshold, report.f1, places=12)
        self.assertEqual(report.k_minus_1, 1.0)

    def test_strong_signal_falls_back_to_k_minus_1(self):
        report = dense_threshold(point(beta_min=1e6))
        self.assertEqual(report.dense_threshold, 1.0)

    def test_degenerate_inputs(self):
        with self.assertRaises(DomainError):
            f1(4, 4, 1.0)
        with self.assertRaises(DomainError):
            f2(4, 4, 1.0)
        with self.assertRaises(DomainError):
            f1(4, 2, 0.0)

    def test_gauss_channel_bound(self):
        self.assertAlmostEqual(gauss_channel_lower(4, 2, 2.0), math.log(6) / (0.5 * math.log(3)), places=12)
        with self.assertRaises(DomainError):
            gauss_channel_lower(4, 2, 0.0)

    def test_dense_denominator_below_channel_capacity(self):
        for p in (4, 12, 40):
            for k in range(1, p):
                for beta_min in (0.1, 1.0, 3.0):
                    with self.subTest(p=p, k=k, beta_min=beta_min):
                        reduced = math.log1p(k * beta_min ** 2 * (1 - k / p))
                        self.assertLess(reduced, math.log1p(k * beta_min ** 2))

    def test_monotone_in_beta_min(self):
        values = [dense_threshold(point(p=40, k=5, beta_min=b)).dense_threshold for b in (0.1, 0.3, 1.0, 3.0)]
        for before, after in zip(values, values[1:]):
            self.assertGreaterEqual(before, after)


class SparseBoundTests(SimpleTestCase):

    def test_full_density_collapses_to_one_gaussian(self):
        self.assertAlmostEqual(g1(point()), 1.441383, delta=1e-5)
        self.assertAlmostEqual(g2(point()), 0.284536, delta=1e-5)
        self.assertAlmostEqual(g1(point()), g1_general(point()), delta=1e-6)

    def test_precomputed_entropy(self):
        entropy = 0.5 * math.log(2 * math.pi * math.e * 3)
        self.assertAlmostEqual(g1(point(), entropy=entropy), (math.log(6) - 1) / (0.5 * math.log(3)), places=12)

    def test_weak_signal_grows_without_bound(self):
        self.assertGreater(g1(point(beta_min=1e-2)), 1e3)

    def test_monotone_in_gamma(self):
        values = [evaluate_bounds(point(p=12, k=3, gamma=g)).sparse_threshold for g in (0.02, 0.1, 0.3, 1.0)]
        for before, after in zip(values, values[1:]):
            self.assertGreaterEqual(before, after - 1e-9)


class CorollaryTests(SimpleTestCase):

    def test_sparse_case(self):
        bounds = corollary_bounds(point(gamma=0.25))
        self.assertEqual(bounds.case, CorollaryCase.SPARSE)
        self.assertAlmostEqual(bounds.g1_lower, 0.518496, delta=1e-6)
        expected = (math.log(6) - 1) / (0.25 * math.log(5) + 2 * binary_entropy(0.25))
        self.assertAlmostEqual(bounds.g1_lower, expected, places=12)

    def test_constant_tau_case(self):
        bounds = corollary_bounds(point())
        self.assertEqual(bounds.case, CorollaryCase.CONSTANT_TAU)
        self.assertLessEqual(bounds.g1_lower, g1(point()) + 1e-6)

    def test_general_case_drops_sparsity_factor(self):
        params = point(p=12, k=3, beta_min=0.7, gamma=0.4)
        expected = (log_choose(12, 3) - 1) / (0.5 * math.log1p(3 * 0.49))
        self.assertAlmostEqual(corollary_bounds(params).g1_general, expected, places=12)

    def test_full_support_has_no_location_bound(self):
        bounds = corollary_bounds(point(p=3, k=3, gamma=0.2))
        self.assertIsNone(bounds.g2_lower)
        self.assertIsNone(bounds.g2_general)

    def test_lower_bounds_hold_over_grid(self):
        for k in (1, 2, 4, 8):
            for gamma in (0.02, 0.1, 0.25, 0.5, 1.0):
                for beta_min in (0.25, 1.0, 4.0):
                    params = point(p=24, k=k, beta_min=beta_min, gamma=gamma)
                    with self.subTest(k=k, gamma=gamma, beta_min=beta_min):
                        bounds = corollary_bounds(params)
                        self.assertLessEqual(bounds.g1_lower, g1(params) * (1 + 1e-6) + 1e-6)
                        self.assertLessEqual(bounds.g2_lower, g2(params) * (1 + 1e-6) + 1e-6)


class FanoTests(SimpleTestCase):

    def test_ensemble_a_value(self):
        params = point(p=12, k=2, beta_min=math.sqrt(0.1), n=20)
        self.assertAlmostEqual(fano_error_lower_a(params), 0.393385, delta=1e-6)

    def test_clamped(self):
        params = point(p=12, k=2, beta_min=math.sqrt(0.1), n=10 ** 6)
        self.assertEqual(fano_error_lower_a(params), 0.0)
        self.assertEqual(fano_error_lower_b(params), 0.0)

    def test_zero_measurements(self):
        params = point(p=12, k=2, n=0)
        self.assertAlmostEqual(fano_error_lower_b(params), 1 - 1 / math.log(11), places=12)

    def test_vanishes_at_the_dense_threshold(self):
        params = point(p=12, k=2, beta_min=0.5)
        self.assertLessEqual(fano_error_lower_a(params, n=f1(12, 2, 0.5)), 1e-12)

    def test_single_candidate(self):
        self.assertEqual(fano_error_lower_b(point(p=3, k=3)), 0.0)
        self.assertEqual(fano_error_lower_sparse_b(point(p=3, k=3, gamma=0.5)), 0.0)

    def test_full_density_floor_is_below_dense_floor(self):
        params = point(p=12, k=2, beta_min=math.sqrt(0.1), n=20)
        self.assertLessEqual(fano_error_lower_sparse_a(params), fano_error_lower_a(params) + 1e-6)
        self.assertGreater(fano_error_lower_sparse_a(params), 0.3)

    def test_sparse_floor_rises_with_sparsity(self):
        params = point(p=12, k=2, beta_min=1.0, n=2)
        dense = fano_error_lower_sparse_b(params)
        sparse = fano_error_lower_sparse_b(params.with_(gamma=0.05))
        self.assertGreater(dense, 0.0)
        self.assertGreater(sparse, dense)


class EvaluateBoundsTests(SimpleTestCase):

    def test_report_fields(self):
        report = evaluate_bounds(point())
        self.assertEqual(report.regime, Regime.TRANSITIONAL)
        self.assertAlmostEqual(report.f1, F1_4_2_1, places=9)
        self.assertAlmostEqual(report.g1, 1.441383, delta=1e-5)
        self.assertAlmostEqual(report.sparse_threshold, max(report.g1, report.g2, 1.0), places=12)
        low, high = report.g1_bracket
        self.assertLessEqual(low, report.g1 + 1e-6)
        self.assertGreaterEqual(high, report.g1 - 1e-6)

    def test_record_columns(self):
        record = evaluate_bounds(point(gamma=0.25)).as_record()
        self.assertEqual(record['regime'], 'Degraded')
        self.assertEqual(record['corollary_case'], 'c')
        self.assertAlmostEqual(record['g1_lower'], 0.518496, delta=1e-6)
        for column in ('H_psi1', 'H_psi2', 'g1_bracket_low', 'g2_bracket_high', 'p', 'n'):
            self.assertIn(column, record)
        self.assertNotIn('params', record)

    @override_settings(MAX_MIXTURE_COMPONENTS=2)
    def test_large_mixture_uses_bracket(self):
        report = evaluate_bounds(point(p=12, k=4, gamma=0.5))
        self.assertIsNone(report.g1)
        self.assertIsNone(report.entropy_psi1)
        self.assertIsNotNone(report.g2)
        self.assertGreaterEqual(report.sparse_threshold, report.g1_bracket[0])
