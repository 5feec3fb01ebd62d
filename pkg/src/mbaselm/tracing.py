"""Trace sinks for optimizer runs."""

import csv
import dataclasses

import numpy as np


def _cell(value):
    if isinstance(value, np.ndarray):
        return " ".join(repr(float(v)) for v in value.ravel())
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return " ".join(str(v) for v in value)
    return str(value)


class ListSink:
    """Collects records in memory."""

    def __init__(self):
        self.records = []

    def __call__(self, record):
        self.records.append(record)


class CsvSink:
    """Writes dataclass records as CSV rows, one row per call.

    ``columns`` restricts and orders the fields written; by default every
    field of the first record is used. Array fields are flattened into a
    single space-separated cell.
    """

    def __init__(self, fh, columns=None):
        self._fh = fh
        self._writer = csv.writer(fh)
        self._columns = list(columns) if columns is not None else None
        self._header_written = False

    def __call__(self, record):
        if self._columns is None:
            self._columns = [f.name for f in dataclasses.fields(record)]
        if not self._header_written:
            self._writer.writerow(self._columns)
            self._header_written = True
        self._writer.writerow([_cell(getattr(record, c)) for c in self._columns])


def write_csv(records, path, columns=None):
    with open(path, "w", newline="") as fh:
        sink = CsvSink(fh, columns)
        for rec in records:
            sink(rec)
