"""
.. module:: bornstat_cli
    :platform: Linux
    :synopsis: Command-line front end

Usage::

    python -m bornstat <command> [options]

Commands are classes registered by ``_CommandMeta`` through the
``command=`` class keyword. Exit codes: 0 success, 2 configuration error,
3 capacity error, 4 verification failure, 130 interrupted.

.. moduleauthor:: bornstat developers
"""
import argparse
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .bornstat_analytic import critical_times, rate_fn_finite, zero_lines
from .bornstat_config import RunConfig
from .bornstat_ensemble import free_energy, sample
from .bornstat_errors import (BornstatError, CapacityError,
                              VerificationError)
from .bornstat_experiments import (ScanGrid, TimeSeriesRequest,
                                   analytic_table, candidates_table,
                                   complex_scan, detect_zeros,
                                   distribution_at, finite_size_study,
                                   fss_document, fss_table, kink_extrapolation,
                                   multifractal_study, sampling_study,
                                   scan_table, time_series)
from .bornstat_io import RunWriter, Table
from .bornstat_mbqc import ProtocolMode, sample_protocol, verify_report
from .bornstat_model import Bitstring, Boundary, RunManifest, TimeGrid
from .bornstat_utils import philox_generator

#######
# Log #
#######

LOG = logging.getLogger(__name__)
LOG.addHandler(logging.NullHandler())

#############
# Constants #
#############

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_VERIFICATION = 4
EXIT_INTERRUPTED = 130

#: Sizes used for the analytic kink-location extrapolation
KINK_SIZES = (16, 32, 64, 128, 256)

#: Random times checked by the rate-function oracle
ORACLE_TIMES = 50

###########
# Classes #
###########

#: Registered commands by name
COMMANDS = {}


class _CommandParent(object):
    """ Empty object used for type-checking. """
    pass


class _CommandMeta(type):
    """
    Metaclass registering every command class under its ``command`` name.
    """

    def __new__(mcs, name, bases, namespace, **kwds):
        if len(bases) > 1:
            raise NotImplementedError("Multiple inheritance is not supported.")
        cls = super().__new__(mcs, name, bases, namespace)
        cls.command = kwds.get("command")
        # Intermediate bases leave command unset
        if cls.command is not None:
            if cls.command in COMMANDS:
                raise TypeError("Command {0} is already registered".format(
                    cls.command))
            COMMANDS[cls.command] = cls
            LOG.debug("Registered command %s", cls.command)
        return cls

    def __init__(cls, name, bases, namespace, **kwds):
        super().__init__(name, bases, namespace)


class Command(_CommandParent, metaclass=_CommandMeta):
    """ A pipeline run by one CLI command """

    #: One-line description shown in --help
    summary = ""

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser):
        """ Adds command-specific flags """

    def __init__(self, config: RunConfig, writer: RunWriter, executor=None,
                 explicit=()):
        self.config = config
        self.writer = writer
        self.executor = executor
        # config keys given on the command line
        self.explicit = frozenset(explicit)
        self.params = config.model_params()

    def single_time(self) -> float:
        """ --t, or the first critical time of the quench """
        if self.config.t is not None:
            return self.config.t
        return critical_times(self.params.h, 0, self.params.J)

    def grid(self) -> TimeGrid:
        steps = max(1, int(round((self.config.tmax - self.config.tmin)
                                 / self.config.dt)))
        return TimeGrid(self.config.tmin, self.config.tmax, steps,
                        self.config.tau)

    def run(self):
        raise NotImplementedError


class _SeriesCommand(Command):
    """ Shared real-time series plumbing """

    def request(self) -> TimeSeriesRequest:
        return TimeSeriesRequest(ground=self.config.ground)

    def run(self):
        tables = time_series(self.params, self.grid(), self.request(),
                             self.config.mode, self.config.enum_cap)
        for table in tables.values():
            self.writer.write_table(table)
        return tables


class EvolveCommand(_SeriesCommand, command="evolve"):
    summary = "f(+...+) over time, next to the analytic rate functions"

    def run(self):
        tables = super().run()
        if self.params.boundary is Boundary.PBC:
            self.writer.write_table(analytic_table(self.params, self.grid()))
        post = [row[1] for row in tables["evolve"].rows]
        finite = [value for value in post if math.isfinite(value)]
        if finite:
            self.writer.note("max f(+...+)", max(finite))


class SpectrumCommand(_SeriesCommand, command="spectrum"):
    summary = "lowest/highest f-levels and the ground trajectory"

    def request(self):
        return TimeSeriesRequest(spectrum_k=self.config.k, ground=True)


class MomentsCommand(_SeriesCommand, command="moments"):
    summary = "moment-averaged free energies f_n (S_q too when --q is given)"

    def request(self):
        q_list = self.config.q_list if "q_list" in self.explicit else []
        return TimeSeriesRequest(moments=self.config.n_list, q_list=q_list,
                                 ground=self.config.ground)


class PECommand(Command, command="pe"):
    summary = "participation entropies over sizes and multifractal fits"

    def run(self):
        t = self.single_time()
        table, fits = multifractal_study(
            self.params, self.config.sizes, self.config.q_list, t,
            self.config.mode, self.config.enum_cap, self.executor)
        self.writer.write_table(table)
        self.writer.write_json("pe_fit", {"t": t,
                                          "fits": [f.to_dict() for f in fits]})
        for fit in fits:
            self.writer.note("D_%g" % fit.q, fit.D_q)


class SampleCommand(Command, command="sample"):
    summary = "Born samples at one time (and a sampling study over --times)"

    def run(self):
        t = self.single_time()
        dist = distribution_at(self.params, t, self.config.mode,
                               cap=self.config.enum_cap)
        record = sample(dist, self.config.shots, self.config.seed)
        table = Table("samples", ("bitstring", "count"))
        for code, count in zip(record.codes, record.counts):
            table.rows.append((str(Bitstring(code, record.L)), int(count)))
        self.writer.write_table(table)
        if self.config.times:
            self.writer.write_table(sampling_study(
                self.params, self.config.times, self.config.N_list,
                self.config.seeds, self.config.mode, self.config.enum_cap,
                self.executor))


class ScanCommand(Command, command="scan"):
    summary = "complex-time maps of e^{-f}, zero candidates and zero lines"

    def run(self):
        grid = ScanGrid(self.config.tmin, self.config.tmax,
                        self.config.t_points, self.config.tau_min,
                        self.config.tau_max, self.config.tau_points)
        frames = complex_scan(self.params, grid, self.config.quantities,
                              self.executor)
        self.writer.write_table(scan_table(frames))
        candidates = None
        for frame in frames:
            found = detect_zeros(frame, self.config.threshold)
            table = candidates_table(frame, found)
            if candidates is None:
                candidates = table
            else:
                candidates.rows.extend(table.rows)
            self.writer.note("zeros in " + frame.quantity, len(found))
        self.writer.write_table(candidates)
        zeros = Table("zeros", ("m", "k", "re_z", "im_z"))
        ks = np.linspace(0, math.pi, 202)[1:-1]
        for line in zero_lines(range(4), ks, self.params.J, self.params.h):
            zeros.rows.append((line.m, line.k, line.z.t, line.z.tau))
        self.writer.write_table(zeros)


class FssCommand(Command, command="fss"):
    summary = "finite-size level-inversion fits at the critical time"

    def run(self):
        studies = finite_size_study(self.params, self.config.sizes,
                                    self.config.n_list,
                                    self.config.tc, self.config.mode,
                                    self.config.enum_cap, self.executor)
        self.writer.write_table(fss_table(studies))
        document = fss_document(studies)
        if self.params.boundary is Boundary.PBC and self.params.h < 1:
            kink = kink_extrapolation(self.params, KINK_SIZES)
            document["kink"] = {"sizes": list(kink.sizes),
                                "peaks": list(kink.peaks),
                                "t_extrapolated": kink.t_extrapolated,
                                "slope": kink.slope,
                                "r_squared": kink.r_squared}
        self.writer.write_json("fit", document)
        for label, study in studies.items():
            self.writer.note("L* (n=%s)" % label, study.fit.L_star)


class MbqcCommand(Command, command="mbqc"):
    summary = "measurement-based protocol shots"

    def run(self):
        mode = ProtocolMode.parse(self.config.protocol)
        results = sample_protocol(self.params, self.config.steps, mode,
                                  self.config.seed, self.config.shots,
                                  self.executor)
        shots = Table("mbqc_shots", ("shot", "step", "qubit_role", "site",
                                     "outcome"))
        boundary = Table("mbqc_boundary", ("shot", "boundary_bitstring"))
        for shot, (sigma, record) in enumerate(results):
            shots.rows.extend(record.rows())
            boundary.rows.append((shot, str(sigma)))
        self.writer.write_table(shots)
        self.writer.write_table(boundary)
        plus = sum(1 for sigma, _ in results if sigma.code == 0)
        self.writer.note("P(+...+) estimate", plus / max(1, len(results)))


class VerifyCommand(Command, command="verify"):
    summary = "contract checks (MBQC gadget, rate-function oracle)"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--mbqc", dest="check_mbqc", action="store_true",
                            default=None, help="verify the MBQC gadget")
        parser.add_argument("--oracle", dest="check_oracle",
                            action="store_true", default=None,
                            help="verify the finite-L rate function")

    def _oracle(self) -> float:
        params = self.params
        rng = philox_generator(self.config.seed, 3)
        times = rng.uniform(0, 3 * math.pi, ORACLE_TIMES)
        worst = 0.0
        for t in times:
            dist = distribution_at(params, t, "exact_spectral")
            simulated = free_energy(dist, 0)
            if not math.isfinite(simulated):
                continue
            oracle = rate_fn_finite(t, params.J, params.h, params.L)
            worst = max(worst, abs(simulated - oracle))
        return worst

    def run(self):
        check_mbqc = self.config.check_mbqc
        check_oracle = self.config.check_oracle
        if not check_mbqc and not check_oracle:
            check_mbqc = self.params.L <= 6
            check_oracle = (self.params.boundary is Boundary.PBC
                            and self.params.L % 2 == 0)
        report = {"tolerance": self.config.tolerance}
        failed = []
        if check_mbqc:
            checks = verify_report(self.params, self.config.trials,
                                   self.config.seed)
            report["mbqc"] = checks
            report["mbqc_deficit"] = max(checks.values())
            if report["mbqc_deficit"] > self.config.tolerance:
                failed.append("mbqc")
        if check_oracle:
            report["oracle_error"] = self._oracle()
            if report["oracle_error"] > max(self.config.tolerance, 1e-8):
                failed.append("oracle")
        report["passed"] = not failed
        self.writer.write_json("verify", report)
        if failed:
            raise VerificationError("Verification failed: {0}".format(
                ", ".join(failed)))


def build_parser() -> argparse.ArgumentParser:
    """ Top-level parser with one subparser per registered command """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("--config", help="flat JSON configuration file")
    common.add_argument("--out", dest="output_dir",
                        help="output directory for this run")
    common.add_argument("--workers", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--enum-cap", dest="enum_cap", type=int)
    model = common.add_argument_group("model")
    model.add_argument("--L", type=int)
    model.add_argument("--J", type=float)
    model.add_argument("--h", type=float)
    model.add_argument("--boundary", choices=["pbc", "obc"])
    model.add_argument("--dt", help="Trotter step (e.g. pi/160)")
    model.add_argument("--mode", choices=["trotter", "exact_spectral",
                                          "exact"])
    grid = common.add_argument_group("grids")
    grid.add_argument("--tmin")
    grid.add_argument("--tmax")
    grid.add_argument("--tau")
    grid.add_argument("--t", help="single time")
    grid.add_argument("--tc", help="critical time for fss")
    grid.add_argument("--times", help="comma-separated times")
    grid.add_argument("--t-points", dest="t_points", type=int)
    grid.add_argument("--tau-points", dest="tau_points", type=int)
    grid.add_argument("--tau-min", dest="tau_min")
    grid.add_argument("--tau-max", dest="tau_max")
    stats = common.add_argument_group("statistics")
    stats.add_argument("--n", dest="n_list", help="moment orders, e.g. 0,1,inf")
    stats.add_argument("--q", dest="q_list", help="entropy orders")
    stats.add_argument("--k", type=int, help="levels per spectrum edge")
    stats.add_argument("--ground", action="store_true", default=None)
    stats.add_argument("--sizes")
    stats.add_argument("--shots", type=int)
    stats.add_argument("--N", dest="N_list", help="sample counts")
    stats.add_argument("--seeds")
    stats.add_argument("--quantity", dest="quantities",
                       help="scan quantities: post,post_raw,f1,finf")
    stats.add_argument("--threshold", type=float)
    proto = common.add_argument_group("mbqc")
    proto.add_argument("--steps", type=int)
    proto.add_argument("--protocol", choices=[m.value for m in ProtocolMode])
    proto.add_argument("--trials", type=int)
    proto.add_argument("--tolerance", type=float)

    parser = argparse.ArgumentParser(
        prog="bornstat",
        description="Born-rule statistics of dynamical quantum phase "
                    "transitions in the transverse-field Ising chain")
    parser.add_argument("--version", action="version",
                        version="%(prog)s " + __version__)
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True
    for name, cls in COMMANDS.items():
        sub = subparsers.add_parser(name, parents=[common], help=cls.summary)
        cls.add_arguments(sub)
    return parser


def _configure_logging(verbosity: int):
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(verbosity, 2)]
    root = logging.getLogger("bornstat")
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(
        "%(asctime)s %(name)s - %(levelname)s - %(message)s"))
    root.addHandler(handler)
    root.setLevel(level)
    return handler


def run_command(args: argparse.Namespace) -> int:
    """ Builds the config, runs the command, maps errors to exit codes """
    overrides = dict(vars(args))
    command = overrides.pop("command")
    overrides.pop("verbose", None)
    config_file = overrides.pop("config", None)
    explicit = [key for key, value in overrides.items() if value is not None]
    try:
        config = RunConfig.from_sources(config_file, overrides)
        out_dir = config.output_dir
        if args.output_dir is None:
            out_dir = os.path.join(config.output_dir, command)
        manifest = RunManifest(params=config.model_params(),
                               mode=str(config.mode or "auto"),
                               seed=config.seed, command=command,
                               extra=config.to_dict())
        with RunWriter(out_dir, manifest) as writer, \
                ThreadPoolExecutor(max_workers=config.workers) as executor:
            instance = COMMANDS[command](config, writer, executor, explicit)
            if isinstance(instance, _SeriesCommand):
                manifest.grid = instance.grid()
            instance.run()
    except KeyboardInterrupt:
        LOG.error("Interrupted; partial outputs are marked truncated")
        return EXIT_INTERRUPTED
    except VerificationError as err:
        LOG.error(str(err))
        return EXIT_VERIFICATION
    except CapacityError as err:
        LOG.error(str(err))
        return EXIT_CAPACITY
    except BornstatError as err:
        LOG.error(str(err))
        return EXIT_CONFIG
    return EXIT_OK


def main(argv=None) -> int:
    """ Entry point for ``python -m bornstat`` """
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = _configure_logging(args.verbose)
    try:
        return run_command(args)
    finally:
        logging.getLogger("bornstat").removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
