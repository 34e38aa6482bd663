"""CSV writing with round-trip float precision, and the matching reader."""

from __future__ import annotations

import csv

import numpy as np


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def parse_value(s):
    if s == "":
        return ""
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_value(v) for v in row])


def read_csv(path):
    """Rows of a CSV written by this package, as dicts with parsed values."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [{k: parse_value(v) for k, v in row.items()} for row in reader]
