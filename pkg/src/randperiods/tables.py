"""CSV and JSON persistence.

Reals are written as '%.16e' (17 significant digits), which round-trips every
double exactly, so parsing a file and writing it again reproduces its bytes.
"""
import csv
import json
import math
import re

import numpy as np

__all__ = ["format_value", "parse_value", "write_csv", "read_csv", "write_json"]

_INT = re.compile(r"[+-]?\d+\Z")


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.16e" % v
    return str(v)


def parse_value(s):
    if _INT.match(s):
        return int(s)
    try:
        return float(s)
    except ValueError:
        return s


def write_csv(header, rows, path):
    """UTF-8 CSV with a header row; an empty ``rows`` gives a header-only file."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                if len(row) != len(header):
                    raise ValueError(f"row has {len(row)} fields, header has {len(header)}")
                w.writerow([format_value(v) for v in row])
    except OSError as e:
        raise OSError(f"{path}: {e}") from e


def read_csv(path):
    """(header, rows) with ints, floats and strings restored."""
    with open(path, encoding="utf-8", newline="") as f:
        r = csv.reader(f)
        header = next(r)
        rows = [tuple(parse_value(s) for s in row) for row in r]
    return header, rows


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def write_json(obj, path):
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(obj, f, indent=2, sort_keys=True, default=_default)
            f.write("\n")
    except OSError as e:
        raise OSError(f"{path}: {e}") from e
