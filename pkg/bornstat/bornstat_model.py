"""
.. module:: bornstat_model
    :platform: Linux
    :synopsis: Model parameters, bitstring conventions and run manifests

Conventions shared by every other module:

* Site ``j`` of a chain of length ``L`` is bit ``j`` of an integer code
  (site 0 is the least significant bit).
* In the X basis bit ``j = 1`` means site ``j`` is in ``|->``; in the Z basis
  it means spin down.
* Bitstrings are rendered over ``{+, -}`` with site 0 leftmost.

.. moduleauthor:: bornstat developers
"""
import enum
import logging
import math
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from . import __version__
from .bornstat_errors import CapacityError, ConfigError

#######
# Log #
#######

LOG = logging.getLogger(__name__)
LOG.addHandler(logging.NullHandler())

#############
# Constants #
#############

#: Largest chain length whose full even-parity distribution is enumerated
DEFAULT_ENUM_CAP = 26

#: Largest chain length allowed for a dense state vector
MAX_STATE_L = 26


class Boundary(enum.Enum):
    """ Boundary condition of the chain """
    PBC = "pbc"
    OBC = "obc"

    @classmethod
    def parse(cls, value) -> "Boundary":
        """ Accepts a Boundary or its (case-insensitive) name """
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigError("Invalid boundary condition: {0}".format(value))


class Parity(enum.Enum):
    """ Eigenvalue sector of the global spin flip """
    EVEN = 0
    ODD = 1


@dataclass(frozen=True)
class ModelParams(object):
    """
    Parameters of the transverse-field Ising chain and its Trotter grid.

    :param L: site count (>= 2)
    :param J: Ising coupling (nonzero)
    :param h: transverse field (>= 0)
    :param boundary: periodic or open chain
    :param dt: Trotter step
    :param t_total: total evolution time
    """
    L: int = 12
    J: float = 1.0
    h: float = 0.2
    boundary: Boundary = Boundary.PBC
    dt: float = math.pi / 160
    t_total: float = 3 * math.pi

    def __post_init__(self):
        object.__setattr__(self, "boundary", Boundary.parse(self.boundary))
        if int(self.L) != self.L or self.L < 2:
            raise ConfigError("L must be an integer >= 2, got {0}".format(
                self.L))
        object.__setattr__(self, "L", int(self.L))
        if not math.isfinite(self.J) or self.J == 0:
            raise ConfigError("J must be finite and nonzero")
        if not math.isfinite(self.h) or self.h < 0:
            raise ConfigError("h must be finite and >= 0, got {0}".format(
                self.h))
        if not math.isfinite(self.dt) or self.dt <= 0:
            raise ConfigError("dt must be > 0, got {0}".format(self.dt))
        if not math.isfinite(self.t_total) or self.t_total < 0:
            raise ConfigError("t_total must be >= 0")

    @property
    def bonds(self) -> list:
        """ Nearest-neighbour bonds (j, k); PBC includes (L-1, 0) """
        bonds = [(j, j + 1) for j in range(self.L - 1)]
        if self.boundary is Boundary.PBC:
            bonds.append((self.L - 1, 0))
        return bonds

    def replace(self, **kwargs) -> "ModelParams":
        """ Returns a copy with the given fields changed """
        values = asdict(self)
        values.update(kwargs)
        return ModelParams(**values)

    def to_dict(self) -> dict:
        """ Flat JSON-compatible view """
        return {"L": self.L, "J": self.J, "h": self.h,
                "boundary": self.boundary.value, "dt": self.dt,
                "t_total": self.t_total}


def popcount_parity(codes, L: int):
    """ Parity bit (0 even, 1 odd) of every integer code of length L """
    codes = np.asarray(codes, dtype=np.int64)
    acc = np.zeros_like(codes)
    for j in range(L):
        acc ^= (codes >> j) & 1
    return acc


class Bitstring(object):
    """ An X-basis measurement outcome over L sites """

    __slots__ = ("_code", "_L")

    def __init__(self, code: int, L: int):
        code, L = int(code), int(L)
        if L < 1:
            raise ConfigError("Bitstring length must be >= 1")
        if code < 0 or code >= (1 << L):
            raise ConfigError("Code {0} does not fit in {1} bits".format(
                code, L))
        self._code = code
        self._L = L

    @classmethod
    def from_code(cls, code: int, L: int) -> "Bitstring":
        return cls(code, L)

    @classmethod
    def from_string(cls, text: str) -> "Bitstring":
        """ Parses '+'/'-' (or Unicode minus), site 0 leftmost """
        text = text.strip()
        if not text:
            raise ConfigError("Empty bitstring")
        code = 0
        for j, char in enumerate(text):
            if char in ("-", "−"):
                code |= 1 << j
            elif char != "+":
                raise ConfigError("Invalid bitstring symbol '{0}'".format(
                    char))
        return cls(code, len(text))

    @classmethod
    def all_plus(cls, L: int) -> "Bitstring":
        return cls(0, L)

    @property
    def code(self) -> int:
        return self._code

    @property
    def L(self) -> int:
        return self._L

    @property
    def bits(self) -> tuple:
        return tuple((self._code >> j) & 1 for j in range(self._L))

    def __len__(self):
        return self._L

    def __int__(self):
        return self._code

    def __str__(self):
        return "".join("-" if bit else "+" for bit in self.bits)

    def __repr__(self):
        return "Bitstring('{0}')".format(str(self))

    def __eq__(self, other):
        if not isinstance(other, Bitstring):
            return NotImplemented
        return self._code == other._code and self._L == other._L

    def __hash__(self):
        return hash((self._code, self._L))

    def __lt__(self, other):
        return (self._L, self._code) < (other._L, other._code)


def parity(sigma: Bitstring) -> Parity:
    """ Even iff sigma has an even number of '-' sites """
    return Parity(bin(sigma.code).count("1") & 1)


def enumerate_even(L: int, cap: int = DEFAULT_ENUM_CAP):
    """
    Returns the 2^(L-1) even-parity integer codes of length L, ascending.

    :param L: chain length
    :param cap: largest L allowed
    :raises CapacityError: when L exceeds the cap
    """
    if L < 2:
        raise ConfigError("L must be >= 2, got {0}".format(L))
    if L > cap:
        raise CapacityError(
            "Enumeration of L={0} exceeds the enumeration cap {1}".format(
                L, cap), cap=cap)
    low = np.arange(1 << (L - 1), dtype=np.int64)
    codes = low | (popcount_parity(low, L - 1) << (L - 1))
    codes.sort()
    LOG.debug("Enumerated %d even codes for L=%d", codes.size, L)
    return codes


@dataclass(frozen=True)
class TimeGrid(object):
    """
    Uniform grid of steps + 1 real times from t_start to t_end, with an
    optional constant imaginary part tau.
    """
    t_start: float
    t_end: float
    steps: int
    tau: float = 0.0

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise ConfigError("TimeGrid needs steps >= 1")
        if self.t_end < self.t_start:
            raise ConfigError("TimeGrid must be monotone (t_end >= t_start)")
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_end)
                and math.isfinite(self.tau)):
            raise ConfigError("TimeGrid bounds must be finite")

    @classmethod
    def from_trotter(cls, params: ModelParams, t_end: float = None):
        """ Grid aligned with the Trotter step from 0 to t_end """
        t_end = params.t_total if t_end is None else t_end
        steps = max(1, int(round(t_end / params.dt)))
        if abs(steps * params.dt - t_end) > 1e-9 * max(1.0, t_end):
            LOG.warning("t_end=%g is not a multiple of dt=%g; using %d steps",
                        t_end, params.dt, steps)
        return cls(0.0, steps * params.dt, steps)

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / self.steps

    def points(self):
        """ Real parts of the grid points """
        return np.linspace(self.t_start, self.t_end, self.steps + 1)

    def to_dict(self) -> dict:
        return {"grid_t_start": self.t_start, "grid_t_end": self.t_end,
                "grid_steps": self.steps, "grid_tau": self.tau}


@dataclass
class RunManifest(object):
    """ Provenance record written next to every run's outputs """
    params: ModelParams
    grid: TimeGrid = None
    mode: str = "exact_spectral"
    seed: int = 0
    command: str = ""
    version: str = __version__
    timestamp: str = field(
        default_factory=lambda: time.strftime("%Y-%m-%dT%H:%M:%S%z"))
    truncated: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        """ Flat key-value view (nested config values are prefixed) """
        flat = {"command": self.command, "version": self.version,
                "timestamp": self.timestamp, "mode": self.mode,
                "seed": int(self.seed), "truncated": bool(self.truncated)}
        flat.update(self.params.to_dict())
        if self.grid is not None:
            flat.update(self.grid.to_dict())
        for key, value in self.extra.items():
            flat["config_" + key] = value
        return flat
