"""
Test cases for bornstat_model: parameters, bit encodings and grids.
"""

import math
import unittest

import numpy as np
from hypothesis import given, strategies as st

from context import bornstat
from bornstat import bornstat_model as bmodel
from bornstat.bornstat_errors import CapacityError, ConfigError

from bornstat_testing import set_external_loggers, BornstatTestCase


class TestModelParams(unittest.TestCase):
    """ Test cases for ModelParams validation """

    def test_defaults(self):
        params = bmodel.ModelParams()
        self.assertEqual(params.L, 12)
        self.assertEqual(params.h, 0.2)
        self.assertIs(params.boundary, bmodel.Boundary.PBC)
        self.assertEqual(params.dt, math.pi / 160)

    def test_invalid_values(self):
        """ Testing out-of-domain parameters raise ConfigError """
        for kwargs in ({"L": 1}, {"L": 2.5}, {"J": 0.0}, {"h": -0.1},
                       {"dt": 0.0}, {"h": math.nan}, {"t_total": -1.0}):
            with self.assertRaises(ConfigError):
                bmodel.ModelParams(**kwargs)

    def test_boundary_parsing(self):
        params = bmodel.ModelParams(boundary="OBC")
        self.assertIs(params.boundary, bmodel.Boundary.OBC)
        self.assertRaises(ConfigError, bmodel.ModelParams, boundary="twisted")

    def test_bonds(self):
        """ Testing PBC adds the wrap-around bond """
        pbc = bmodel.ModelParams(L=4)
        obc = pbc.replace(boundary="obc")
        self.assertEqual(pbc.bonds, [(0, 1), (1, 2), (2, 3), (3, 0)])
        self.assertEqual(obc.bonds, [(0, 1), (1, 2), (2, 3)])

    def test_replace_keeps_other_fields(self):
        params = bmodel.ModelParams(L=8, h=0.5).replace(L=10)
        self.assertEqual((params.L, params.h), (10, 0.5))


class TestBitstring(unittest.TestCase):
    """ Test cases for Bitstring """

    def test_site_zero_is_leftmost(self):
        sigma = bmodel.Bitstring(0b0011, 4)
        self.assertEqual(str(sigma), "--++")
        self.assertEqual(sigma.bits, (1, 1, 0, 0))

    def test_from_string_accepts_unicode_minus(self):
        self.assertEqual(bmodel.Bitstring.from_string("+−+-"),
                         bmodel.Bitstring(0b1010, 4))

    def test_invalid(self):
        self.assertRaises(ConfigError, bmodel.Bitstring, 16, 4)
        self.assertRaises(ConfigError, bmodel.Bitstring.from_string, "+x")
        self.assertRaises(ConfigError, bmodel.Bitstring.from_string, "")

    def test_all_plus(self):
        sigma = bmodel.Bitstring.all_plus(5)
        self.assertEqual(str(sigma), "+++++")
        self.assertIs(bmodel.parity(sigma), bmodel.Parity.EVEN)

    @given(st.integers(min_value=1, max_value=30).flatmap(
        lambda L: st.tuples(st.just(L),
                            st.integers(min_value=0, max_value=(1 << L) - 1))))
    def test_string_encoding_is_consistent(self, value):
        """ Testing code -> string -> code over arbitrary lengths """
        L, code = value
        sigma = bmodel.Bitstring(code, L)
        self.assertEqual(bmodel.Bitstring.from_string(str(sigma)), sigma)
        self.assertEqual(len(str(sigma)), L)

    @given(st.integers(min_value=0, max_value=(1 << 20) - 1))
    def test_parity_counts_minus_signs(self, code):
        sigma = bmodel.Bitstring(code, 20)
        expected = str(sigma).count("-") % 2
        self.assertEqual(bmodel.parity(sigma).value, expected)
        self.assertEqual(int(bmodel.popcount_parity([code], 20)[0]), expected)


@set_external_loggers("TestEnumerateEven", bmodel.LOG)
class TestEnumerateEven(BornstatTestCase):
    """ Test cases for enumerate_even """

    def test_small_chain(self):
        np.testing.assert_array_equal(bmodel.enumerate_even(3),
                                      [0b000, 0b011, 0b101, 0b110])

    def test_size_and_parity(self):
        for L in (2, 5, 10):
            codes = bmodel.enumerate_even(L)
            self.assertEqual(codes.size, 1 << (L - 1))
            self.assertTrue(np.all(np.diff(codes) > 0))
            self.assertFalse(np.any(bmodel.popcount_parity(codes, L)))

    def test_cap(self):
        with self.assertRaises(CapacityError) as context:
            bmodel.enumerate_even(12, cap=10)
        self.assertEqual(context.exception.cap, 10)
        # CapacityError is also a MemoryError
        self.assertRaises(MemoryError, bmodel.enumerate_even, 12, 10)


@set_external_loggers("TestTimeGrid", bmodel.LOG)
class TestTimeGrid(BornstatTestCase):
    """ Test cases for TimeGrid """

    def test_points(self):
        grid = bmodel.TimeGrid(0.0, 1.0, 4)
        self.assertAllClose(grid.points(), [0, 0.25, 0.5, 0.75, 1.0])
        self.assertEqual(grid.dt, 0.25)

    def test_invalid(self):
        self.assertRaises(ConfigError, bmodel.TimeGrid, 1.0, 0.0, 4)
        self.assertRaises(ConfigError, bmodel.TimeGrid, 0.0, 1.0, 0)
        self.assertRaises(ConfigError, bmodel.TimeGrid, 0.0, math.inf, 4)

    def test_from_trotter(self):
        params = bmodel.ModelParams()
        grid = bmodel.TimeGrid.from_trotter(params)
        self.assertEqual(grid.steps, 480)
        self.assertAllClose(grid.t_end, 3 * math.pi, atol=1e-12)

    def test_misaligned_warns(self):
        params = bmodel.ModelParams(dt=0.3)
        with self.assertLogs(bmodel.LOG, level="WARNING"):
            grid = bmodel.TimeGrid.from_trotter(params, 1.0)
        self.assertEqual(grid.steps, 3)


class TestRunManifest(unittest.TestCase):
    """ Test cases for RunManifest """

    def test_flat_view(self):
        manifest = bmodel.RunManifest(
            params=bmodel.ModelParams(L=4), grid=bmodel.TimeGrid(0, 1, 2),
            command="evolve", extra={"shots": 10})
        flat = manifest.to_dict()
        self.assertEqual(flat["L"], 4)
        self.assertEqual(flat["boundary"], "pbc")
        self.assertEqual(flat["grid_steps"], 2)
        self.assertEqual(flat["config_shots"], 10)
        self.assertFalse(flat["truncated"])
        for value in flat.values():
            self.assertNotIsInstance(value, dict)


def main():
    unittest.main()


if __name__ == '__main__':
    main()
