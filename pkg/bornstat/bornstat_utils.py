"""
Collection of internal utility decorators, parsers and generators.
:author bornstat developers
"""
import logging
import math
import re
from fractions import Fraction
from functools import wraps

import numpy as np

from .bornstat_errors import ConfigError

#######
# Log #
#######

LOG = logging.getLogger(__name__)
LOG.addHandler(logging.NullHandler())

#############
# Constants #
#############

#: printf-style format used for every float written to CSV
FLOAT_FORMAT = "%.17g"

#: Accepted spellings of pi inside symbolic angle expressions
_PI_TOKEN = re.compile(r"(π|pi)", re.IGNORECASE)


class wrap_file_function(object):
    """
    Wrap a function which takes a file or a str as it's first argument.
    If a str is provided, replace the first argument of the wrapped function
    with a file handle, and close the file afterwards.

    .. code-block:: python

        @wrap_file_function('w')
        def write_header(f, header):
            f.write(','.join(header))
        # Writes to an already open file handle:
        with open('f1.csv', 'w') as f:
            write_header(f, ['t', 'f'])
        # Opens f2.csv for writing, writes, then closes it:
        write_header('f2.csv', ['t', 'f'])
    """

    def __init__(self, *args, newline=None):
        self.modes = args if args else ('r',)
        self.newline = newline

    def __call__(self, func):
        @wraps(func)
        def wrapped(*args, **kwargs):
            close = []  # Files that should be closed
            files = []  # File handles that should be passed to func
            num_files = len(self.modes)
            filep = None
            try:
                for i, mode in enumerate(self.modes):
                    filep = args[i]
                    if isinstance(filep, str) or hasattr(filep, "__fspath__"):
                        filep = open(filep, mode, newline=self.newline)
                        close.append(filep)
                    files.append(filep)

                # Replace the files in args when calling func
                args = files + list(args[num_files:])

                # Make function call and return value
                return func(*args, **kwargs)
            finally:
                for filep in close:
                    filep.close()
        return wrapped


def parse_pi_expr(expr) -> float:
    """
    Parses a real number that may be a symbolic multiple of pi.

    Accepted forms include ``"pi/160"``, ``"3pi"``, ``"-pi/4"``,
    ``"0.25*pi"``, ``"3*pi/4"`` and plain numbers. The rational coefficient
    is parsed exactly and multiplied by pi once, so ``"pi/160"`` yields
    exactly ``math.pi / 160``.
    """
    if isinstance(expr, (int, float)):
        return float(expr)
    text = str(expr).strip().replace(" ", "").replace("−", "-")
    if not text:
        raise ConfigError("Empty angle expression")
    if not _PI_TOKEN.search(text):
        try:
            return float(Fraction(text))
        except (ValueError, ZeroDivisionError):
            raise ConfigError("Invalid number: '{0}'".format(expr))
    # Split "<num>*pi/<den>" into numerator coefficient and denominator
    parts = _PI_TOKEN.split(text, maxsplit=1)
    head, tail = parts[0], parts[2]
    head = head.rstrip("*")
    if head in ("", "+"):
        coeff = Fraction(1)
    elif head == "-":
        coeff = Fraction(-1)
    else:
        try:
            coeff = Fraction(head)
        except (ValueError, ZeroDivisionError):
            raise ConfigError("Invalid pi coefficient in '{0}'".format(expr))
    if tail:
        if not tail.startswith("/"):
            raise ConfigError("Invalid pi expression: '{0}'".format(expr))
        try:
            coeff /= Fraction(tail[1:])
        except (ValueError, ZeroDivisionError):
            raise ConfigError("Invalid pi divisor in '{0}'".format(expr))
    if coeff.denominator == 1:
        return coeff.numerator * math.pi
    return coeff.numerator * math.pi / coeff.denominator


def parse_list(text, item_parser=float) -> list:
    """ Parses a comma-separated list (or passes a list through) """
    if isinstance(text, (list, tuple)):
        return [item_parser(item) for item in text]
    return [item_parser(item) for item in str(text).split(",") if item.strip()]


def format_float(value) -> str:
    """ Formats a float with 17 significant digits (inf/nan spelled out) """
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    return FLOAT_FORMAT % value


def philox_generator(seed: int, *stream) -> np.random.Generator:
    """
    Returns a Philox generator for one work unit of a seeded run.

    The stream words (shot, step, ...) are hashed with the seed into the
    Philox key, so distinct words give non-overlapping streams and draws do
    not depend on the order work units are executed in.
    """
    words = tuple(int(word) & 0xFFFFFFFFFFFFFFFF for word in stream)
    sequence = np.random.SeedSequence(int(seed) & ((1 << 128) - 1),
                                      spawn_key=words)
    return np.random.Generator(np.random.Philox(sequence))
