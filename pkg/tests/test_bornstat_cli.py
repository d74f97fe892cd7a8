"""
End-to-end tests of the command-line front end.
"""

import contextlib
import io
import os
import unittest

from context import bornstat
from bornstat import bornstat_cli as bcli
from bornstat.bornstat_io import read_csv, read_json

from bornstat_testing import set_external_loggers, BornstatTestCase

SMALL = ["--L", "4", "--tmax", "pi/4", "--dt", "pi/16"]


@set_external_loggers("TestCli", bcli.LOG)
class TestCli(BornstatTestCase):
    """ Test cases for bornstat_cli.main """

    def _run(self, *argv):
        out_dir = os.path.join(self.make_tempdir(), "run")
        code = bcli.main(list(argv) + ["--out", out_dir])
        return code, out_dir

    def test_registered_commands(self):
        self.assertEqual(set(bcli.COMMANDS),
                         {"evolve", "spectrum", "moments", "pe", "sample",
                          "scan", "fss", "mbqc", "verify"})

    def test_duplicate_command_rejected(self):
        with self.assertRaises(TypeError):
            class Again(bcli.Command, command="evolve"):
                pass

    def test_evolve(self):
        code, out_dir = self._run("evolve", *SMALL)
        self.assertEqual(code, bcli.EXIT_OK)
        rows = read_csv(os.path.join(out_dir, "evolve.csv"))
        self.assertEqual(len(rows), 5)
        self.assertAllClose(float(rows[0]["f_post"]), 0.0)
        self.assertTrue(os.path.exists(os.path.join(out_dir, "analytic.csv")))
        manifest = read_json(os.path.join(out_dir, "manifest.json"))
        self.assertEqual(manifest["command"], "evolve")
        self.assertEqual(manifest["grid_steps"], 4)
        self.assertFalse(manifest["truncated"])

    def test_evolve_is_deterministic(self):
        outputs = []
        for _ in range(2):
            code, out_dir = self._run("evolve", *SMALL)
            self.assertEqual(code, bcli.EXIT_OK)
            with open(os.path.join(out_dir, "evolve.csv"), "rb") as filep:
                outputs.append(filep.read())
        self.assertEqual(outputs[0], outputs[1])

    def test_moments_with_entropies(self):
        code, out_dir = self._run("moments", *SMALL, "--n", "0,1,inf",
                                  "--q", "1,2")
        self.assertEqual(code, bcli.EXIT_OK)
        self.assertEqual(len(read_csv(os.path.join(out_dir, "moments.csv"))),
                         15)
        self.assertEqual(len(read_csv(os.path.join(out_dir, "entropy.csv"))),
                         10)

    def test_moments_without_entropies(self):
        code, out_dir = self._run("moments", *SMALL, "--n", "0,1")
        self.assertEqual(code, bcli.EXIT_OK)
        self.assertFalse(os.path.exists(os.path.join(out_dir, "entropy.csv")))

    def test_verify_mbqc(self):
        code, out_dir = self._run("verify", "--mbqc", "--L", "3",
                                  "--trials", "2")
        self.assertEqual(code, bcli.EXIT_OK)
        report = read_json(os.path.join(out_dir, "verify.json"))
        self.assertTrue(report["passed"])
        self.assertLess(report["mbqc_deficit"], 1e-10)
        self.assertNotIn("oracle_error", report)

    def test_mbqc(self):
        code, out_dir = self._run("mbqc", "--L", "3", "--steps", "2",
                                  "--shots", "4", "--protocol", "corrected")
        self.assertEqual(code, bcli.EXIT_OK)
        shots = read_csv(os.path.join(out_dir, "mbqc_shots.csv"))
        self.assertEqual(len(shots), 4 * 2 * 9)
        boundary = read_csv(os.path.join(out_dir, "mbqc_boundary.csv"))
        self.assertEqual([row["shot"] for row in boundary],
                         ["0", "1", "2", "3"])
        self.assertTrue(all(len(row["boundary_bitstring"]) == 3
                            for row in boundary))

    def test_config_error(self):
        code, _ = self._run("evolve", *SMALL, "--h", "-1")
        self.assertEqual(code, bcli.EXIT_CONFIG)

    def test_capacity_error(self):
        code, out_dir = self._run("evolve", "--L", "16", "--mode", "exact",
                                  "--tmax", "pi/4", "--dt", "pi/16")
        self.assertEqual(code, bcli.EXIT_CAPACITY)
        manifest = read_json(os.path.join(out_dir, "manifest.json"))
        self.assertTrue(manifest["truncated"])

    def test_unknown_flag(self):
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as ctx:
                bcli.main(["evolve", "--colour", "red"])
        self.assertEqual(ctx.exception.code, 2)


def main():
    unittest.main()


if __name__ == '__main__':
    main()
