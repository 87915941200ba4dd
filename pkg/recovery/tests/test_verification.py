from django.test import SimpleTestCase

from core.exceptions import UsageError
from recovery.verification import Scope, parse_scopes, run_verification


class ParseScopeTests(SimpleTestCase):

    def test_canonical_order_and_deduplication(self):
        self.assertEqual(parse_scopes(['lemma6', 'lemma1', 'lemma6']), ['lemma1', 'lemma6'])

    def test_rejects_empty_and_unknown(self):
        with self.assertRaises(UsageError):
            parse_scopes([])
        with self.assertRaises(UsageError):
            parse_scopes([' '])
        with self.assertRaisesRegex(UsageError, 'lemma9'):
            parse_scopes(['lemma1', 'lemma9'])


class AnalyticScopeTests(SimpleTestCase):

    def test_entropy_and_expectation_checks_pass(self):
        rows = run_verification([Scope.LEMMA5, Scope.LEMMA6, Scope.APPENDIX_E], seed=1)
        failed = [row for row in rows if not row.passed]
        self.assertEqual(failed, [])

        scopes = {str(row.scope) for row in rows}
        self.assertEqual(scopes, {'lemma5', 'lemma6', 'appendixE'})
        checks = {row.check for row in rows}
        self.assertIn('entropy_sandwich', checks)
        self.assertIn('expectation_case_Degraded', checks)
        self.assertIn('expectation_case_DenseLike', checks)
        self.assertIn('vanishing_label_entropy', checks)

    def test_row_counts(self):
        rows = run_verification([Scope.LEMMA6], seed=0)
        self.assertEqual(len(rows), 30 * 9 * 3)
        record = rows[0].as_record()
        self.assertEqual(set(record), {'scope', 'check', 'parameters', 'observed', 'lower', 'upper', 'passed'})


class OracleScopeTests(SimpleTestCase):

    def test_covariance_scopes(self):
        rows = run_verification([Scope.LEMMA1, Scope.LEMMA2], seed=42, covariance_samples=100_000)
        self.assertEqual([row for row in rows if not row.passed], [])
        checks = {row.check for row in rows}
        self.assertLessEqual({'diagonal', 'max_offdiagonal', 'ensemble_agreement', 'zero_signal_identity'}, checks)

    def test_density_scopes(self):
        rows = run_verification([Scope.LEMMA3, Scope.LEMMA4], seed=42, density_samples=200_000)
        self.assertEqual([row for row in rows if not row.passed], [])
        self.assertIn('density_at_zero', {row.check for row in rows})

    def test_reproducible(self):
        first = run_verification([Scope.LEMMA2], seed=9, covariance_samples=2_000)
        second = run_verification([Scope.LEMMA2], seed=9, covariance_samples=2_000)
        self.assertEqual([row.observed for row in first], [row.observed for row in second])
