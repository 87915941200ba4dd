import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import CapacityError, DomainError
from recovery.ensembles import (
    Ensemble,
    MeasurementMatrix,
    Purpose,
    derive_seed,
    draw_entries,
    ml_decode_a,
    ml_decode_b,
    observe_a,
    observe_b,
    sample_matrix,
    substream,
)
from recovery.params import ProblemParams, SupportSet, enumerate_supports


class SubstreamTests(SimpleTestCase):

    def test_same_keys_same_draws(self):
        first = substream(7, 3, Purpose.NOISE).standard_normal(5)
        second = substream(7, 3, Purpose.NOISE).standard_normal(5)
        np.testing.assert_array_equal(first, second)

    def test_keys_separate_streams(self):
        noise = substream(7, 3, Purpose.NOISE).standard_normal(5)
        matrix = substream(7, 3, Purpose.MATRIX).standard_normal(5)
        other_trial = substream(7, 4, Purpose.NOISE).standard_normal(5)
        self.assertFalse(np.array_equal(noise, matrix))
        self.assertFalse(np.array_equal(noise, other_trial))

    def test_derived_seeds(self):
        self.assertEqual(derive_seed(1, 2), derive_seed(1, 2))
        self.assertNotEqual(derive_seed(1, 2), derive_seed(1, 3))
        self.assertLess(derive_seed(2 ** 64 - 1, 0), 2 ** 64)


class EnsembleMomentTests(SimpleTestCase):

    def test_zero_mean_unit_variance(self):
        for ensemble in Ensemble.values:
            with self.subTest(ensemble=ensemble):
                entries = draw_entries(substream(11, 0), ensemble, 0.2, (200_000,))
                self.assertAlmostEqual(entries.mean(), 0.0, delta=0.02)
                self.assertAlmostEqual(entries.var(), 1.0, delta=0.05)

    def test_sparsified_fraction(self):
        entries = draw_entries(substream(5), Ensemble.SPARSIFIED, 0.1, (100_000,))
        self.assertAlmostEqual(np.mean(entries != 0), 0.1, delta=0.005)

    def test_discrete_ensembles(self):
        rademacher = draw_entries(substream(5), Ensemble.RADEMACHER, 1.0, (1000,))
        self.assertEqual(set(np.unique(rademacher)), {-1.0, 1.0})
        uniform = draw_entries(substream(5), Ensemble.UNIFORM, 1.0, (1000,))
        self.assertLessEqual(np.abs(uniform).max(), math.sqrt(3))

    def test_unknown_ensemble(self):
        with self.assertRaises(DomainError):
            draw_entries(substream(5), 'cauchy', 1.0, (3,))


class MatrixTests(SimpleTestCase):

    def test_sample_is_reproducible_and_read_only(self):
        params = ProblemParams(n=5, p=8, k=2, beta_min=1.0)
        first = sample_matrix(params, Ensemble.STD_GAUSSIAN, 42, keys=(3,))
        second = sample_matrix(params, Ensemble.STD_GAUSSIAN, 42, keys=(3,))
        np.testing.assert_array_equal(first.data, second.data)
        self.assertEqual((first.rows, first.cols), (5, 8))
        with self.assertRaises(ValueError):
            first.data[0, 0] = 1.0

    def test_reduced_keeps_candidate_columns(self):
        X = MeasurementMatrix(np.arange(12.0).reshape(2, 6), Ensemble.STD_GAUSSIAN, 0)
        reduced = X.reduced(3)
        self.assertEqual(reduced.cols, 4)
        np.testing.assert_array_equal(reduced.data, X.data[:, :4])
        with self.assertRaises(DomainError):
            X.reduced(7)


class DecoderTests(SimpleTestCase):

    def test_noiseless_recovery_a(self):
        params = ProblemParams(n=12, p=8, k=3, beta_min=0.7)
        supports = enumerate_supports(8, 3)
        for trial in range(100):
            X = sample_matrix(params, Ensemble.STD_GAUSSIAN, 9, keys=(trial,))
            truth = supports[trial % len(supports)]
            Y = observe_a(X, truth, params.beta_min, noise=False)
            self.assertEqual(ml_decode_a(X, Y, params.k, params.beta_min), truth)

    def test_noiseless_recovery_b(self):
        params = ProblemParams(n=6, p=10, k=3, beta_min=1.3)
        for trial in range(100):
            X = sample_matrix(params, Ensemble.STD_GAUSSIAN, 9, keys=(trial,)).reduced(params.k)
            j_star = trial % X.cols
            Y = observe_b(X, j_star, params.beta_min, noise=False)
            self.assertEqual(ml_decode_b(X, Y, params.beta_min), j_star)

    def test_identical_columns_break_ties_lexicographically(self):
        column = np.array([1.0, -2.0, 0.5])
        other = np.array([0.3, 0.1, -1.0])
        data = np.column_stack([other, column, column, other * 2])
        X = MeasurementMatrix(data, Ensemble.STD_GAUSSIAN, 0)
        Y = observe_b(X, 2, 1.0, noise=False)
        self.assertEqual(ml_decode_b(X, Y, 1.0), 1)

        Y = observe_a(X, SupportSet((0, 2)), 1.0, noise=False)
        self.assertEqual(ml_decode_a(X, Y, 2, 1.0), SupportSet((0, 1)))

    def test_single_candidate(self):
        X = MeasurementMatrix(np.ones((3, 1)), Ensemble.STD_GAUSSIAN, 0)
        self.assertEqual(ml_decode_b(X, np.array([5.0, -1.0, 0.0]), 1.0), 0)

    def test_no_measurements_returns_first_support(self):
        X = MeasurementMatrix(np.zeros((0, 5)), Ensemble.STD_GAUSSIAN, 0)
        self.assertEqual(ml_decode_a(X, np.zeros(0), 2, 1.0), SupportSet((0, 1)))

    def test_noisy_observation_is_seeded(self):
        params = ProblemParams(n=4, p=6, k=2, beta_min=1.0)
        X = sample_matrix(params, Ensemble.RADEMACHER, 1)
        first = observe_a(X, SupportSet((1, 4)), 1.0, noise=True, seed=1, keys=(0,))
        second = observe_a(X, SupportSet((1, 4)), 1.0, noise=True, seed=1, keys=(0,))
        np.testing.assert_array_equal(first.values, second.values)
        self.assertTrue(first.noise_realized)

    def test_enumeration_cap(self):
        X = MeasurementMatrix(np.zeros((2, 30)), Ensemble.STD_GAUSSIAN, 0)
        with self.assertRaises(CapacityError):
            ml_decode_a(X, np.zeros(2), 15, 1.0, cap=1000)

    def test_bad_location(self):
        X = MeasurementMatrix(np.zeros((2, 3)), Ensemble.STD_GAUSSIAN, 0)
        with self.assertRaises(DomainError):
            observe_b(X, 3, 1.0, noise=False)
