"""
Test cases for bornstat_utils.
:author bornstat developers
"""

import io
import math
import os
import unittest

import numpy as np

from context import bornstat
from bornstat import bornstat_utils as butils
from bornstat.bornstat_errors import ConfigError

from bornstat_testing import BornstatTestCase


class TestParsePiExpr(unittest.TestCase):
    """ Test cases for parse_pi_expr """

    def test_plain_numbers(self):
        """ Testing plain decimal and rational input """
        self.assertEqual(butils.parse_pi_expr("0.25"), 0.25)
        self.assertEqual(butils.parse_pi_expr("1/4"), 0.25)
        self.assertEqual(butils.parse_pi_expr(3), 3.0)

    def test_pi_fraction_is_exact(self):
        """ Testing pi/160 is a single division of math.pi """
        self.assertEqual(butils.parse_pi_expr("pi/160"), math.pi / 160)
        self.assertEqual(butils.parse_pi_expr("π/160"), math.pi / 160)

    def test_pi_coefficients(self):
        """ Testing multiples and signs of pi """
        self.assertEqual(butils.parse_pi_expr("3pi"), 3 * math.pi)
        self.assertEqual(butils.parse_pi_expr("-pi/4"), -math.pi / 4)
        self.assertEqual(butils.parse_pi_expr("0.25*pi"), math.pi / 4)
        self.assertEqual(butils.parse_pi_expr("3*pi/4"), 3 * math.pi / 4)
        self.assertEqual(butils.parse_pi_expr("−pi"), -math.pi)

    def test_invalid(self):
        """ Testing malformed expressions raise ConfigError """
        for text in ("", "pi*2", "abc", "pi/0", "2pi/x"):
            with self.assertRaises(ConfigError):
                butils.parse_pi_expr(text)
        # ConfigError is also a ValueError
        self.assertRaises(ValueError, butils.parse_pi_expr, "x")


class TestParseList(unittest.TestCase):
    """ Test cases for parse_list """

    def test_comma_separated(self):
        self.assertEqual(butils.parse_list("8,10, 12", int), [8, 10, 12])

    def test_passes_lists_through(self):
        self.assertEqual(butils.parse_list([1, "2"], float), [1.0, 2.0])

    def test_trailing_comma(self):
        self.assertEqual(butils.parse_list("1,", int), [1])


class TestFormatFloat(unittest.TestCase):
    """ Test cases for format_float """

    def test_seventeen_digits(self):
        text = butils.format_float(0.1)
        self.assertEqual(text, "0.10000000000000001")
        self.assertEqual(float(text), 0.1)

    def test_non_finite(self):
        self.assertEqual(butils.format_float(math.inf), "inf")
        self.assertEqual(butils.format_float(-math.inf), "-inf")
        self.assertEqual(butils.format_float(math.nan), "nan")


class TestWrapFileFunction(BornstatTestCase):
    """ Test cases for wrap_file_function """

    def test_path_and_handle(self):
        """ Testing the wrapped function accepts paths and open handles """
        @butils.wrap_file_function('w')
        def write_line(filep, text):
            filep.write(text)

        path = os.path.join(self.make_tempdir(), "out.txt")
        write_line(path, "abc")
        with open(path) as filep:
            self.assertEqual(filep.read(), "abc")
        buffer = io.StringIO()
        write_line(buffer, "xyz")
        self.assertEqual(buffer.getvalue(), "xyz")
        self.assertFalse(buffer.closed)


class TestPhiloxGenerator(unittest.TestCase):
    """ Test cases for philox_generator """

    def test_reproducible(self):
        first = butils.philox_generator(7, 1, 2).random(5)
        second = butils.philox_generator(7, 1, 2).random(5)
        np.testing.assert_array_equal(first, second)

    def test_counter_addresses_streams(self):
        first = butils.philox_generator(7, 1, 2).random(5)
        other_counter = butils.philox_generator(7, 1, 3).random(5)
        other_seed = butils.philox_generator(8, 1, 2).random(5)
        self.assertFalse(np.array_equal(first, other_counter))
        self.assertFalse(np.array_equal(first, other_seed))

    def test_adjacent_streams_do_not_overlap(self):
        first = butils.philox_generator(7, 0, 0).random(64)
        second = butils.philox_generator(7, 1, 0).random(64)
        self.assertEqual(set(first) & set(second), set())


def main():
    unittest.main()


if __name__ == '__main__':
    main()
