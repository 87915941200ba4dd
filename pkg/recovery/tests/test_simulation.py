import math

from django.test import SimpleTestCase, override_settings

from core.exceptions import CapacityError, DomainError
from recovery.bounds import fano_error_lower_a, fano_error_lower_b, fano_error_lower_sparse_b
from recovery.ensembles import Ensemble, Restricted
from recovery.params import ProblemParams
from recovery.simulation import monte_carlo_error, run_trials, trial_chunks
from recovery.tasks import run_trial_chunk


class TrialChunkTests(SimpleTestCase):

    def test_chunks_cover_every_trial(self):
        self.assertEqual(trial_chunks(10, 4), [(0, 4), (4, 8), (8, 10)])
        self.assertEqual(trial_chunks(3, 250), [(0, 3)])

    def test_task_reports_range(self):
        params = ProblemParams(n=8, p=6, k=2, beta_min=1.0)
        result = run_trial_chunk.apply(
            args=(params.as_dict(), Ensemble.STD_GAUSSIAN, Restricted.A, 3, 10, 20)
        ).get()
        self.assertEqual(result['start'], 10)
        self.assertEqual(result['stop'], 20)
        self.assertEqual(result['errors'], run_trials(params, Ensemble.STD_GAUSSIAN, Restricted.A, 3, 10, 20))


class MonteCarloTests(SimpleTestCase):

    def test_fano_floor_cross_check(self):
        params = ProblemParams(n=20, p=12, k=2, beta_min=math.sqrt(0.1))
        result = monte_carlo_error(params, Ensemble.STD_GAUSSIAN, Restricted.A, 2000, seed=7)
        floor = fano_error_lower_a(params)
        self.assertAlmostEqual(floor, 0.393385, delta=1e-6)
        self.assertGreaterEqual(result.p_hat, floor - 3 * result.standard_error)
        self.assertGreaterEqual(result.ci_low, 0.30)
        self.assertLessEqual(result.ci_low, result.p_hat)
        self.assertGreaterEqual(result.ci_high, result.p_hat)

    def test_location_floor_cross_check(self):
        params = ProblemParams(n=10, p=40, k=2, beta_min=math.sqrt(0.1))
        cases = (
            (Ensemble.STD_GAUSSIAN, params, fano_error_lower_b(params)),
            (Ensemble.SPARSIFIED, params.with_(gamma=0.25), fano_error_lower_sparse_b(params.with_(gamma=0.25))),
        )
        for ensemble, point, floor in cases:
            with self.subTest(ensemble=ensemble):
                self.assertGreater(floor, 0.5)
                result = monte_carlo_error(point, ensemble, Restricted.B, 1000, seed=13)
                self.assertGreaterEqual(result.p_hat + 3 * result.standard_error, floor)

    def test_high_snr_recovers(self):
        params = ProblemParams(n=30, p=6, k=2, beta_min=5.0)
        result = monte_carlo_error(params, Ensemble.STD_GAUSSIAN, Restricted.A, 500, seed=1)
        self.assertLessEqual(result.p_hat, 0.05)

    def test_noiseless_trials_never_fail(self):
        params = ProblemParams(n=10, p=8, k=2, beta_min=0.5)
        for which in Restricted.values:
            with self.subTest(which=which):
                result = monte_carlo_error(params, Ensemble.STD_GAUSSIAN, which, 100, seed=3, noise=False)
                self.assertEqual(result.errors, 0)
                self.assertFalse(result.noise)

    def test_null_signal_guesses_uniformly(self):
        params = ProblemParams(n=5, p=10, k=3, beta_min=0.0)
        result = monte_carlo_error(params, Ensemble.STD_GAUSSIAN, Restricted.B, 1000, seed=11)
        expected = 1 - 1 / params.reduced_candidates
        self.assertLessEqual(abs(result.p_hat - expected), 4 * math.sqrt(expected * (1 - expected) / 1000))

    def test_independent_of_chunking(self):
        params = ProblemParams(n=6, p=8, k=2, beta_min=0.6)
        coarse = monte_carlo_error(params, Ensemble.RADEMACHER, Restricted.A, 60, seed=5)
        fine = monte_carlo_error(params, Ensemble.RADEMACHER, Restricted.A, 60, seed=5, chunk_size=7)
        self.assertEqual(coarse.errors, fine.errors)
        with override_settings(MONTE_CARLO_CHUNK_SIZE=1):
            single = monte_carlo_error(params, Ensemble.RADEMACHER, Restricted.A, 60, seed=5)
        self.assertEqual(coarse.errors, single.errors)

    def test_sparsification_degrades_recovery(self):
        params = ProblemParams(n=10, p=12, k=2, beta_min=math.sqrt(0.5))
        dense = monte_carlo_error(params, Ensemble.SPARSIFIED, Restricted.A, 300, seed=2)
        sparse = monte_carlo_error(params.with_(gamma=0.05), Ensemble.SPARSIFIED, Restricted.A, 300, seed=2)
        self.assertGreaterEqual(sparse.p_hat, dense.p_hat - 2 * dense.standard_error)

    def test_invalid_requests(self):
        params = ProblemParams(n=5, p=6, k=2, beta_min=1.0)
        with self.assertRaises(DomainError):
            monte_carlo_error(params, Ensemble.STD_GAUSSIAN, Restricted.A, 0, seed=1)
        with self.assertRaises(DomainError):
            monte_carlo_error(params, 'cauchy', Restricted.A, 10, seed=1)
        with self.assertRaises(DomainError):
            monte_carlo_error(params, Ensemble.STD_GAUSSIAN, 'C', 10, seed=1)

    @override_settings(ENUMERATION_CAP=100)
    def test_capacity_checked_before_dispatch(self):
        params = ProblemParams(n=5, p=20, k=3, beta_min=1.0)
        with self.assertRaises(CapacityError):
            monte_carlo_error(params, Ensemble.STD_GAUSSIAN, Restricted.A, 10, seed=1)
