import math

import numpy as np
from django.test import SimpleTestCase, override_settings
from hypothesis import given, strategies as st

from core.exceptions import CapacityError, DomainError
from recovery.params import (
    ObservationVector,
    ProblemParams,
    Regime,
    SparseSignal,
    SupportSet,
    classify_regime,
    enumerate_supports,
    log_choose,
    make_constant_signal,
    rate,
    support_index_array,
)


class LogChooseTests(SimpleTestCase):

    def test_small_cases(self):
        self.assertAlmostEqual(log_choose(4, 2), math.log(6), places=12)
        self.assertEqual(log_choose(9, 0), 0.0)
        self.assertEqual(log_choose(9, 9), 0.0)
        self.assertAlmostEqual(log_choose(12, 2), 4.189655, delta=1e-6)

    def test_large_arguments_match_exact_count(self):
        exact = math.log(math.comb(5000, 2400))
        self.assertAlmostEqual(log_choose(5000, 2400), exact, delta=abs(exact) * 1e-12)

    def test_invalid_arguments(self):
        for p, k in ((3, 4), (-1, 0), (5, -1)):
            with self.subTest(p=p, k=k):
                with self.assertRaises(DomainError):
                    log_choose(p, k)

    @given(st.integers(min_value=0, max_value=3000), st.data())
    def test_symmetric_in_k(self, p, data):
        k = data.draw(st.integers(min_value=0, max_value=p))
        self.assertAlmostEqual(log_choose(p, k), log_choose(p, p - k),
                               delta=1e-12 * max(1.0, log_choose(p, k)))


class RateTests(SimpleTestCase):

    def test_values(self):
        self.assertAlmostEqual(rate(10, 4, 2), 0.1791759, delta=1e-7)
        self.assertEqual(rate(5, 7, 7), 0.0)
        self.assertAlmostEqual(rate(1, 12, 2), 4.189655, delta=1e-6)

    @given(st.integers(min_value=2, max_value=500), st.data())
    def test_strictly_decreasing_in_n(self, p, data):
        k = data.draw(st.integers(min_value=1, max_value=p - 1))
        n = data.draw(st.integers(min_value=1, max_value=10_000))
        self.assertGreater(rate(n, p, k), rate(n + 1, p, k))

    def test_no_measurements(self):
        with self.assertRaises(DomainError):
            rate(0, 4, 2)


class SupportEnumerationTests(SimpleTestCase):

    def test_lexicographic_order(self):
        supports = enumerate_supports(3, 2)
        self.assertEqual([s.indices for s in supports], [(0, 1), (0, 2), (1, 2)])

    def test_count_and_uniqueness(self):
        supports = enumerate_supports(12, 2)
        self.assertEqual(len(supports), 66)
        self.assertEqual(len({s.indices for s in supports}), 66)

    def test_count_matches_log_choose_up_to_twenty(self):
        for p in range(21):
            for k in range(0, p + 1):
                with self.subTest(p=p, k=k):
                    self.assertEqual(len(enumerate_supports(p, k)), round(math.exp(log_choose(p, k))))

    def test_index_array_matches_enumeration(self):
        rows = support_index_array(7, 3)
        self.assertEqual(rows.shape, (35, 3))
        self.assertFalse(rows.flags.writeable)
        self.assertEqual([tuple(r) for r in rows.tolist()], [s.indices for s in enumerate_supports(7, 3)])

    def test_capacity_error_names_count(self):
        with self.assertRaisesRegex(CapacityError, str(math.comb(40, 20))):
            enumerate_supports(40, 20)

    @override_settings(ENUMERATION_CAP=10)
    def test_cap_follows_settings(self):
        with self.assertRaises(CapacityError):
            support_index_array(6, 3)


class ProblemParamsTests(SimpleTestCase):

    def test_valid_point(self):
        params = ProblemParams(n=10, p=12, k=2, beta_min=0.5, gamma=0.25)
        self.assertEqual(params.beta_min_sq, 0.25)
        self.assertEqual(params.gamma_k, 0.5)
        self.assertEqual(params.reduced_candidates, 11)
        self.assertEqual(params.as_dict(), {'n': 10, 'p': 12, 'k': 2, 'beta_min': 0.5, 'gamma': 0.25})

    def test_invalid_points(self):
        cases = [
            dict(n=-1, p=4, k=2, beta_min=1.0),
            dict(n=1, p=4, k=0, beta_min=1.0),
            dict(n=1, p=4, k=5, beta_min=1.0),
            dict(n=1, p=4, k=2, beta_min=-1.0),
            dict(n=1, p=4, k=2, beta_min=1.0, gamma=0.0),
            dict(n=1, p=4, k=2, beta_min=1.0, gamma=1.5),
            dict(n=1, p=4, k=2, beta_min=1.0, noise_var=2.0),
            dict(n=1.5, p=4, k=2, beta_min=1.0),
        ]
        for kwargs in cases:
            with self.subTest(**{key: str(value) for key, value in kwargs.items()}):
                with self.assertRaises(DomainError):
                    ProblemParams(**kwargs)

    def test_with_revalidates(self):
        params = ProblemParams(n=1, p=4, k=2, beta_min=1.0)
        self.assertEqual(params.with_(gamma=0.5).gamma, 0.5)
        with self.assertRaises(DomainError):
            params.with_(k=7)


class SignalTests(SimpleTestCase):

    def test_support_set_validation(self):
        self.assertEqual(str(SupportSet((0, 3))), '{0,3}')
        with self.assertRaises(DomainError):
            SupportSet((2, 1))
        with self.assertRaises(DomainError):
            SupportSet.of([0, 4], p=4)

    def test_constant_signal_is_in_class(self):
        signal = make_constant_signal(SupportSet((1, 3)), 0.5, p=4)
        self.assertEqual(signal.support.indices, (1, 3))
        self.assertTrue(signal.in_class(0.5, k=2))
        self.assertFalse(signal.in_class(0.6))
        np.testing.assert_array_equal(signal.to_dense(), [0.0, 0.5, 0.0, 0.5])

    def test_signal_membership(self):
        signal = SparseSignal(dimension=5, entries={0: -1.0, 4: 0.2, 2: 0.0})
        self.assertEqual(signal.sparsity, 2)
        self.assertTrue(signal.in_class(0.2, k=2))
        self.assertFalse(signal.in_class(0.5))
        self.assertFalse(signal.in_class(0.1, k=3))

    def test_observation_vector_is_read_only(self):
        observation = ObservationVector(values=[1.0, 2.0], noise_realized=True)
        self.assertEqual(observation.length, 2)
        with self.assertRaises(ValueError):
            observation.values[0] = 3.0


class RegimeTests(SimpleTestCase):

    def test_boundaries(self):
        self.assertEqual(classify_regime(8, 1.0), Regime.DENSE_LIKE)
        self.assertEqual(classify_regime(4, 0.75), Regime.TRANSITIONAL)
        self.assertEqual(classify_regime(2, 1.0), Regime.TRANSITIONAL)
        self.assertEqual(classify_regime(2, 0.5), Regime.DEGRADED)
        self.assertEqual(classify_regime(1, 1.0), Regime.DEGRADED)

    def test_invalid_gamma(self):
        with self.assertRaises(DomainError):
            classify_regime(2, 0.0)
