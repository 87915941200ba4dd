import io
import math
import os
import tempfile

import numpy as np
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings
from hypothesis import given, strategies as st
from rest_framework import serializers

from core.exceptions import (
    EXIT_CAPACITY,
    EXIT_NUMERIC,
    EXIT_USAGE,
    CapacityError,
    DomainError,
    NumericError,
    UsageError,
    command_exception_handler,
)
from core.fields import SeedField
from core.utils import (
    format_number,
    parse_config_file,
    parse_seed,
    render_csv,
    render_json,
    wilson_interval,
    write_output,
)


class FormatNumberTests(SimpleTestCase):

    def test_reals_use_nine_significant_digits(self):
        self.assertEqual(format_number(math.pi), '3.14159265')
        self.assertEqual(format_number(2.0), '2')
        self.assertEqual(format_number(1.5e-12), '1.5e-12')

    def test_special_values(self):
        self.assertEqual(format_number(None), '')
        self.assertEqual(format_number(True), 'true')
        self.assertEqual(format_number(False), 'false')
        self.assertEqual(format_number(float('nan')), 'nan')
        self.assertEqual(format_number(float('-inf')), '-inf')
        self.assertEqual(format_number(7), '7')

    def test_numpy_scalars(self):
        self.assertEqual(format_number(np.float64(0.5)), '0.5')
        self.assertEqual(format_number(np.int64(12)), '12')

    @override_settings(CSV_SIGNIFICANT_DIGITS=3)
    def test_digits_follow_settings(self):
        self.assertEqual(format_number(math.pi), '3.14')


class RenderTests(SimpleTestCase):

    def test_csv_header_and_lf_endings(self):
        content = render_csv([{'p': 4, 'f1': 2.5, 'extra': 'x'}, {'p': 5}], ['p', 'f1'])
        self.assertEqual(content, 'p,f1\n4,2.5\n5,\n')

    def test_json_replaces_non_finite_values(self):
        content = render_json({'records': [{'g1': float('inf'), 'n': np.int64(3)}]})
        self.assertTrue(content.endswith('\n'))
        self.assertIn('"g1": null', content)
        self.assertIn('"n": 3', content)

    def test_write_output_to_stream_and_file(self):
        stream = io.StringIO()
        write_output('a,b\n', None, stream)
        self.assertEqual(stream.getvalue(), 'a,b\n')

        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'out.csv')
            write_output('a,b\n', path)
            with open(path, encoding='utf-8') as handle:
                self.assertEqual(handle.read(), 'a,b\n')

    def test_unwritable_path_is_a_usage_error(self):
        with tempfile.TemporaryDirectory() as directory:
            with self.assertRaises(UsageError):
                write_output('x', os.path.join(directory, 'missing', 'out.csv'))


class WilsonIntervalTests(SimpleTestCase):

    def test_known_interval(self):
        low, high = wilson_interval(50, 100)
        self.assertAlmostEqual(low, 0.403832, delta=1e-5)
        self.assertAlmostEqual(high, 0.596168, delta=1e-5)

    def test_extremes_stay_in_unit_interval(self):
        low, high = wilson_interval(0, 20)
        self.assertAlmostEqual(low, 0.0, places=12)
        self.assertGreater(high, 0.0)
        low, high = wilson_interval(20, 20)
        self.assertLess(low, 1.0)
        self.assertAlmostEqual(high, 1.0, places=12)

    def test_zero_trials_rejected(self):
        with self.assertRaises(UsageError):
            wilson_interval(0, 0)

    @given(st.integers(min_value=1, max_value=5000), st.data())
    def test_interval_contains_estimate(self, trials, data):
        successes = data.draw(st.integers(min_value=0, max_value=trials))
        low, high = wilson_interval(successes, trials)
        p_hat = successes / trials
        self.assertLessEqual(low, p_hat + 1e-12)
        self.assertGreaterEqual(high, p_hat - 1e-12)


class SeedTests(SimpleTestCase):

    def test_valid_seeds(self):
        self.assertEqual(parse_seed('0'), 0)
        self.assertEqual(parse_seed(' 42 '), 42)
        self.assertEqual(parse_seed(str(2 ** 64 - 1)), 2 ** 64 - 1)

    def test_invalid_seeds(self):
        for value in ('-1', str(2 ** 64), 'abc', '1.5', None):
            with self.subTest(value=value):
                with self.assertRaises(UsageError):
                    parse_seed(value)

    def test_seed_field_uses_the_same_rules(self):
        field = SeedField()
        self.assertEqual(field.run_validation(' 42 '), 42)
        self.assertEqual(field.run_validation(2 ** 64 - 1), 2 ** 64 - 1)
        for value in ('-1', str(2 ** 64), '1.5', True):
            with self.subTest(value=value):
                with self.assertRaises(serializers.ValidationError):
                    field.run_validation(value)


class ConfigFileTests(SimpleTestCase):

    schema = {'p': int, 'beta-min': float, 'scope': list, 'noiseless': bool, 'seed': str}

    def write(self, text):
        handle = tempfile.NamedTemporaryFile('w', suffix='.cfg', delete=False, encoding='utf-8')
        handle.write(text)
        handle.close()
        self.addCleanup(os.unlink, handle.name)
        return handle.name

    def test_values_are_cast(self):
        path = self.write(
            "# bounds point\n"
            "p = 12\n"
            "beta_min = 0.5   # underscores are accepted\n"
            "\n"
            "scope = lemma1,lemma6\n"
            "noiseless = true\n"
            "seed = 7\n"
        )
        values = parse_config_file(path, self.schema)
        self.assertEqual(values['p'], 12)
        self.assertEqual(values['beta-min'], 0.5)
        self.assertEqual(values['scope'], ['lemma1', 'lemma6'])
        self.assertIs(values['noiseless'], True)
        self.assertEqual(values['seed'], '7')

    def test_unknown_key(self):
        path = self.write("q = 3\n")
        with self.assertRaisesRegex(UsageError, "unknown key"):
            parse_config_file(path, self.schema)

    def test_malformed_line(self):
        path = self.write("p 12\n")
        with self.assertRaisesRegex(UsageError, "expected"):
            parse_config_file(path, self.schema)

    def test_bad_value(self):
        path = self.write("p = twelve\n")
        with self.assertRaises(UsageError):
            parse_config_file(path, self.schema)

    def test_missing_file(self):
        with self.assertRaises(UsageError):
            parse_config_file('/nonexistent/settings.cfg', self.schema)


class ExceptionHandlerTests(SimpleTestCase):

    def test_exit_codes(self):
        cases = [
            (DomainError('bad k'), EXIT_USAGE),
            (UsageError('bad flag'), EXIT_USAGE),
            (NumericError('no convergence', achieved_error=1e-6), EXIT_NUMERIC),
            (CapacityError(2 * 10 ** 6, 10 ** 6), EXIT_CAPACITY),
            (serializers.ValidationError({'k': ['required']}), EXIT_USAGE),
        ]
        for exc, code in cases:
            with self.subTest(exc=exc.__class__.__name__):
                error = command_exception_handler(exc)
                self.assertIsInstance(error, CommandError)
                self.assertEqual(error.returncode, code)

    def test_validation_detail_is_flattened(self):
        error = command_exception_handler(serializers.ValidationError({'k': ['This field is required.']}))
        self.assertIn('k: This field is required.', str(error))

    def test_capacity_message_names_count(self):
        self.assertIn('2000000', str(CapacityError(2 * 10 ** 6, 10 ** 6)))

    def test_foreign_exceptions_pass_through(self):
        self.assertIsNone(command_exception_handler(KeyError('x')))

    def test_domain_error_is_a_value_error(self):
        self.assertIsInstance(DomainError('x'), ValueError)
