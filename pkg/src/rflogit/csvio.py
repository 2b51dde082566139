"""Strict CSV reading and writing for curves, responses and predictions.

Curves file: a header row holding the grid values ``t_0, ..., t_{J-1}``,
then one row of ``J`` observed values per curve. Response file: one 0/1
value per line, optionally preceded by a single non-numeric header cell.
All files are UTF-8, comma separated, ``.`` decimal point, LF line endings.
"""

import csv
import math

import numpy as np

from .errors import ParseError
from .funcsample import RawCurves


def _float(cell, row, col):
    try:
        v = float(cell)
    except ValueError:
        raise ParseError(f"non-numeric cell {cell!r}", row=row, column=col) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite cell {cell!r}", row=row, column=col)
    return v


def _rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        for i, row in enumerate(csv.reader(fh), start=1):
            yield i, row


def parse_curves_csv(path):
    """Read a curves file into :class:`RawCurves`."""
    grid = None
    values = []
    for i, row in _rows(path):
        if not row:
            raise ParseError("empty line", row=i)
        if grid is None:
            grid = [_float(c, i, j) for j, c in enumerate(row, start=1)]
            g = np.asarray(grid)
            bad = np.nonzero(np.diff(g) <= 0)[0]
            if bad.size:
                raise ParseError("grid must be strictly increasing", row=i, column=int(bad[0]) + 2)
            continue
        if len(row) != len(grid):
            raise ParseError(f"expected {len(grid)} cells, found {len(row)}", row=i)
        values.append([_float(c, i, j) for j, c in enumerate(row, start=1)])
    if grid is None:
        raise ParseError("file is empty", row=1)
    if not values:
        raise ParseError("no curves after the grid header", row=2)
    try:
        return RawCurves(np.asarray(grid), np.asarray(values))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def parse_response_csv(path):
    """Read a single-column 0/1 response file."""
    out = []
    for i, row in _rows(path):
        if len(row) != 1:
            raise ParseError(f"expected a single cell, found {len(row)}", row=i)
        cell = row[0].strip()
        if i == 1 and cell and not _numeric(cell):
            continue  # header
        if cell not in ("0", "1"):
            raise ParseError(f"response must be 0 or 1, found {cell!r}", row=i, column=1)
        out.append(int(cell))
    if not out:
        raise ParseError("no responses found", row=1)
    return np.asarray(out, dtype=int)


def _numeric(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _num(v):
    return repr(float(v))


def write_curves_csv(raw, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([_num(t) for t in raw.grid])
        for row in raw.values:
            w.writerow([_num(v) for v in row])


def write_response_csv(y, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for v in np.asarray(y, dtype=int):
            fh.write(f"{v}\n")


def write_predictions_csv(prob, labels, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "probability", "class"])
        for i, (p, c) in enumerate(zip(prob, labels)):
            w.writerow([i, _num(p), int(c)])
