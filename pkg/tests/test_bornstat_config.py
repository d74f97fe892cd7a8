"""
Test cases for bornstat_config.
"""

import math
import os
import unittest
from unittest import mock

from context import bornstat
from bornstat.bornstat_config import RunConfig
from bornstat.bornstat_errors import ConfigError
from bornstat.bornstat_io import write_json
from bornstat.bornstat_model import Boundary

from bornstat_testing import BornstatTestCase

CLEAN_ENV = {"BORNSTAT_NUM_THREADS": "", "BORNSTAT_SEED": "",
             "BORNSTAT_ENUM_CAP": ""}


@mock.patch.dict(os.environ, CLEAN_ENV)
class TestRunConfig(BornstatTestCase):
    """ Test cases for RunConfig.from_sources """

    def test_defaults(self):
        config = RunConfig.from_sources()
        self.assertEqual(config.L, 12)
        self.assertEqual(config.dt, math.pi / 160)
        self.assertEqual(config.tmax, 3 * math.pi)
        self.assertEqual(config.workers, 1)
        self.assertEqual(config.q_list, [0.0, 1.0, 2.0, 5.0])

    def test_precedence(self):
        path = os.path.join(self.make_tempdir(), "run.json")
        write_json(path, {"L": 8, "h": 0.5, "seed": 9})
        with mock.patch.dict(os.environ, {"BORNSTAT_SEED": "4",
                                          "BORNSTAT_NUM_THREADS": "3"}):
            config = RunConfig.from_sources(path, {"h": 0.7, "L": None})
        self.assertEqual(config.L, 8)
        self.assertEqual(config.h, 0.7)
        self.assertEqual(config.seed, 9)
        self.assertEqual(config.workers, 3)

    def test_symbolic_values(self):
        config = RunConfig.from_sources(overrides={
            "dt": "pi/80", "tmax": "2pi", "times": "pi/4,1.5",
            "sizes": "8,10", "n_list": "0,inf"})
        self.assertEqual(config.dt, math.pi / 80)
        self.assertEqual(config.tmax, 2 * math.pi)
        self.assertEqual(config.times, [math.pi / 4, 1.5])
        self.assertEqual(config.sizes, [8, 10])
        self.assertEqual(config.n_list, ["0", "inf"])

    def test_model_params(self):
        config = RunConfig.from_sources(overrides={"L": 6, "boundary": "obc",
                                                   "tmax": "pi"})
        params = config.model_params()
        self.assertEqual(params.L, 6)
        self.assertIs(params.boundary, Boundary.OBC)
        self.assertEqual(params.t_total, math.pi)
        self.assertEqual(config.model_params(L=4).L, 4)

    def test_errors(self):
        self.assertRaises(ConfigError, RunConfig.from_sources,
                          overrides={"colour": "red"})
        self.assertRaises(ConfigError, RunConfig.from_sources,
                          overrides={"workers": 0})
        self.assertRaises(ConfigError, RunConfig.from_sources,
                          overrides={"L": 4.5})
        self.assertRaises(ConfigError, RunConfig.from_sources,
                          overrides={"tmin": 2, "tmax": 1})
        self.assertRaises(ConfigError, RunConfig.from_sources,
                          overrides={"sizes": "8,ten"})
        with mock.patch.dict(os.environ, {"BORNSTAT_NUM_THREADS": "many"}):
            self.assertRaises(ConfigError, RunConfig.from_sources)

    def test_file_must_be_object(self):
        path = os.path.join(self.make_tempdir(), "run.json")
        write_json(path, [1, 2])
        self.assertRaises(ConfigError, RunConfig.from_sources, path)

    def test_round_trip_dict(self):
        config = RunConfig.from_sources(overrides={"L": 6})
        again = RunConfig.from_sources(overrides=config.to_dict())
        self.assertEqual(again, config)


def main():
    unittest.main()


if __name__ == '__main__':
    main()
