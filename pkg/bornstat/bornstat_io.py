"""
.. module:: bornstat_io
    :platform: Linux
    :synopsis: CSV/JSON writers and per-run output directories

Every run owns one directory holding its tables, JSON documents, exactly
one ``manifest.json`` and a rendered ``summary.txt``.

.. moduleauthor:: bornstat developers
"""
import csv
import enum
import json
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .bornstat_mako_wrapper import MakoFileTemplate, load_template_text
from .bornstat_model import Bitstring, RunManifest
from .bornstat_utils import format_float, wrap_file_function

#############
# Templates #
#############

#: Template for the human-readable run summary
SUMMARY_TEMPLATE = load_template_text("run_summary.mako")

#######
# Log #
#######

LOG = logging.getLogger(__name__)
LOG.addHandler(logging.NullHandler())

#############
# Constants #
#############

MANIFEST_NAME = "manifest.json"
SUMMARY_NAME = "summary.txt"


@dataclass
class Table(object):
    """ A named CSV table: header plus rows of plain values """
    name: str
    header: tuple
    rows: list = field(default_factory=list)

    @property
    def filename(self) -> str:
        return self.name + ".csv"

    def __len__(self):
        return len(self.rows)


def format_cell(value) -> str:
    """ Renders one CSV cell (floats with 17 significant digits) """
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, enum.Enum):
        return str(value.value)
    return str(value)


@wrap_file_function('w', newline='')
def write_csv(filep, header, rows):
    """ Writes header and rows to a file handle or path """
    writer = csv.writer(filep, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(cell) for cell in row])


@wrap_file_function('r', newline='')
def read_csv(filep) -> list:
    """ Reads a CSV written by write_csv back as dict rows of strings """
    return list(csv.DictReader(filep))


def _json_default(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, Bitstring):
        return str(value)
    raise TypeError("Not JSON serializable: {0!r}".format(value))


def _json_safe(value):
    """ Replaces non-finite floats (invalid JSON) by strings """
    if isinstance(value, dict):
        return {key: _json_safe(val) for key, val in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(val) for val in value]
    if isinstance(value, (float, np.floating)) and not math.isfinite(value):
        return format_float(value)
    return value


@wrap_file_function('w')
def write_json(filep, document):
    """ Writes a JSON document with sorted keys """
    json.dump(_json_safe(document), filep, indent=2, sort_keys=True,
              default=_json_default)
    filep.write("\n")


@wrap_file_function('r')
def read_json(filep):
    return json.load(filep)


class RunWriter(object):
    """
    Owns the output directory of one run.

    Used as a context manager: on exit the manifest and summary are written
    exactly once, with ``truncated`` set when the run was interrupted.
    """

    def __init__(self, out_dir: str, manifest: RunManifest):
        self.out_dir = out_dir
        self.manifest = manifest
        self.files = []
        self.notes = []
        self._closed = False
        os.makedirs(out_dir, exist_ok=True)

    def path(self, filename: str) -> str:
        return os.path.join(self.out_dir, filename)

    def write_table(self, table: Table) -> str:
        filename = self.path(table.filename)
        write_csv(filename, table.header, table.rows)
        self.files.append((table.filename, len(table.rows)))
        LOG.info("Wrote %s (%d rows)", filename, len(table.rows))
        return filename

    def write_json(self, name: str, document) -> str:
        filename = self.path(name + ".json")
        write_json(filename, document)
        self.files.append((name + ".json", None))
        LOG.info("Wrote %s", filename)
        return filename

    def note(self, key: str, value):
        """ Adds a key result line to the summary """
        self.notes.append((key, value))

    def close(self, truncated: bool = False):
        if self._closed:
            return
        self._closed = True
        self.manifest.truncated = self.manifest.truncated or truncated
        flat = self.manifest.to_dict()
        write_json(self.path(MANIFEST_NAME), flat)
        summary = MakoFileTemplate(
            self.path(SUMMARY_NAME), SUMMARY_TEMPLATE,
            {"manifest": flat, "files": list(self.files),
             "notes": list(self.notes)})
        summary.render_to_file()
        LOG.info("Run outputs in %s%s", self.out_dir,
                 " (truncated)" if self.manifest.truncated else "")

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, trace):
        self.close(truncated=exc_type is not None)
        return False
