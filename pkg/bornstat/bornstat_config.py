"""
.. module:: bornstat_config
    :platform: Linux
    :synopsis: Run configuration assembled from defaults, environment, file
        and command-line flags (in increasing precedence)

.. moduleauthor:: bornstat developers
"""
import logging
import math
import os
from dataclasses import dataclass, field, fields, asdict

from .bornstat_errors import ConfigError
from .bornstat_io import read_json
from .bornstat_model import DEFAULT_ENUM_CAP, ModelParams
from .bornstat_utils import parse_list, parse_pi_expr

#######
# Log #
#######

LOG = logging.getLogger(__name__)
LOG.addHandler(logging.NullHandler())

#############
# Constants #
#############

#: Fields holding (possibly symbolic) angles or times
ANGLE_FIELDS = ("dt", "tmin", "tmax", "tau", "t", "tc", "tau_min", "tau_max")

#: Fields holding comma-separated lists, with their item parsers
LIST_FIELDS = {"n_list": str, "q_list": float, "sizes": int,
               "N_list": int, "seeds": int, "times": parse_pi_expr,
               "quantities": str}


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value == "":
        return default
    try:
        return int(value)
    except ValueError:
        raise ConfigError("Environment variable {0}={1!r} is not an "
                          "integer".format(name, value))


@dataclass
class RunConfig(object):
    """ Flat, JSON-serializable configuration of one run """
    # Model
    L: int = 12
    J: float = 1.0
    h: float = 0.2
    boundary: str = "pbc"
    dt: float = math.pi / 160
    # Real-time grid
    tmin: float = 0.0
    tmax: float = 3 * math.pi
    tau: float = 0.0
    mode: str = None
    # Ensemble statistics
    n_list: list = field(default_factory=lambda: ["0", "1", "2", "3", "4",
                                                  "5", "inf"])
    q_list: list = field(default_factory=lambda: [0.0, 1.0, 2.0, 5.0])
    k: int = 20
    ground: bool = False
    t: float = None
    # Sizes, sampling
    sizes: list = field(default_factory=lambda: [8, 10, 12, 14, 16])
    tc: float = None
    shots: int = 10000
    N_list: list = field(default_factory=lambda: [2000, 8000, 32000])
    seeds: list = field(default_factory=lambda: [0, 1, 2, 3, 4])
    times: list = field(default_factory=list)
    # Complex scan
    t_points: int = 161
    tau_points: int = 81
    tau_min: float = -math.pi / 4
    tau_max: float = math.pi / 4
    quantities: list = field(default_factory=lambda: ["post", "f1", "finf"])
    threshold: float = 0.2
    # MBQC
    steps: int = 40
    protocol: str = "random_circuit"
    trials: int = 50
    tolerance: float = 1e-10
    check_mbqc: bool = False
    check_oracle: bool = False
    # Run
    seed: int = 0
    workers: int = 1
    enum_cap: int = DEFAULT_ENUM_CAP
    output_dir: str = None

    @classmethod
    def environment_defaults(cls) -> dict:
        """ Values taken from BORNSTAT_* environment variables """
        return {
            "output_dir": os.getenv("BORNSTAT_OUTPUT_ROOT", "bornstat_runs"),
            "workers": _env_int("BORNSTAT_NUM_THREADS", 1),
            "enum_cap": _env_int("BORNSTAT_ENUM_CAP", DEFAULT_ENUM_CAP),
            "seed": _env_int("BORNSTAT_SEED", 0),
        }

    @classmethod
    def from_sources(cls, config_file: str = None,
                     overrides: dict = None) -> "RunConfig":
        """
        Defaults, then environment, then a flat JSON file, then overrides
        (None values in overrides are ignored).
        """
        values = cls.environment_defaults()
        if config_file:
            document = read_json(config_file)
            if not isinstance(document, dict):
                raise ConfigError("Config file must hold a flat JSON object")
            values.update(document)
        for key, value in (overrides or {}).items():
            if value is not None:
                values[key] = value
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError("Unknown configuration keys: {0}".format(
                ", ".join(unknown)))
        config = cls(**values)
        config.coerce()
        return config

    def coerce(self):
        """ Parses symbolic angles and comma-separated lists in place """
        for name in ANGLE_FIELDS:
            value = getattr(self, name)
            if value is not None:
                setattr(self, name, parse_pi_expr(value))
        for name, parser in LIST_FIELDS.items():
            try:
                setattr(self, name, parse_list(getattr(self, name), parser))
            except ValueError as err:
                raise ConfigError("Invalid list for {0}: {1}".format(
                    name, err))
        for name in ("L", "k", "shots", "t_points", "tau_points", "steps",
                     "trials", "seed", "workers", "enum_cap"):
            value = getattr(self, name)
            if int(value) != value:
                raise ConfigError("{0} must be an integer".format(name))
            setattr(self, name, int(value))
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.tmax < self.tmin:
            raise ConfigError("tmax must be >= tmin")

    def model_params(self, **changes) -> ModelParams:
        values = {"L": self.L, "J": float(self.J), "h": float(self.h),
                  "boundary": self.boundary, "dt": self.dt,
                  "t_total": self.tmax}
        values.update(changes)
        return ModelParams(**values)

    def to_dict(self) -> dict:
        return asdict(self)
