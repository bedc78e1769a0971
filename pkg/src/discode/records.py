"""Audit rows and their line-oriented serializations."""

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np


@dataclass(frozen=True)
class AuditRow:
    key: str
    quantity: str
    value: float
    tolerance: float
    passed: bool
    anchor: str

    @classmethod
    def upper(cls, key, quantity, value, tolerance, anchor):
        """Row that passes when ``value <= tolerance`` (NaN never passes)."""
        value = float(value)
        return cls(key, quantity, value, float(tolerance), bool(value <= tolerance), anchor)

    @classmethod
    def lower(cls, key, quantity, value, tolerance, anchor):
        value = float(value)
        return cls(key, quantity, value, float(tolerance), bool(value >= tolerance), anchor)

    @classmethod
    def info(cls, key, quantity, value, anchor):
        """Informational row: passes whenever the value is a number."""
        value = float(value)
        return cls(key, quantity, value, math.inf, not math.isnan(value), anchor)

    @classmethod
    def from_dict(cls, d):
        return cls(d["key"], d["quantity"], float(d["value"]), float(d["tolerance"]),
                   bool(d["passed"]), d.get("anchor", d.get("claim", "")))


def _num(x):
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return str(x)  # JSON has no literal for these
    return x


def row_dict(row):
    d = asdict(row)
    d["value"] = _num(d["value"])
    d["tolerance"] = _num(d["tolerance"])
    return d


def sort_rows(rows):
    return sorted(rows, key=lambda r: r.key)


def to_jsonl(rows):
    return "".join(json.dumps(row_dict(r), sort_keys=True) + "\n" for r in sort_rows(rows))


FIELDS = ("key", "quantity", "value", "tolerance", "passed", "anchor")


def to_table(rows, delimiter=","):
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(FIELDS)
    for r in sort_rows(rows):
        d = row_dict(r)
        w.writerow([format(d[k], ".17g") if isinstance(d[k], float) else d[k] for k in FIELDS])
    return buf.getvalue()


def render(rows, fmt="jsonl"):
    if fmt == "jsonl":
        return to_jsonl(rows)
    if fmt == "table":
        return to_table(rows)
    raise ValueError(f"unknown output format {fmt!r}")


def all_passed(rows):
    return all(r.passed for r in rows)


def read_points(path):
    """Complex points from a file of whitespace-separated ``re im`` pairs.

    Blank lines and ``#`` comments are skipped.
    """
    pts = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 're im', got {line.strip()!r}")
            try:
                pts.append(complex(float(parts[0]), float(parts[1])))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number pair: {line.strip()!r}") from None
    return np.asarray(pts, dtype=np.complex128)


def read_typed_points(path):
    """Lines of ``re im type``; returns points and the list of type strings."""
    pts, types = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 're im type', got {line.strip()!r}")
            try:
                pts.append(complex(float(parts[0]), float(parts[1])))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number pair: {line.strip()!r}") from None
            types.append(parts[2])
    return np.asarray(pts, dtype=np.complex128), types
