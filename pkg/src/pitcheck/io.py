"""Reading PIT files and writing reports with round-trip-safe numbers."""

import csv
import json
import math
import os

import numpy as np

from .errors import DomainError, EmptySample, PitError
from .pointwise import PitSample

__all__ = ["fmt_float", "dumps", "read_values", "read_sample", "ParseError",
           "detect_format"]

FORMATS = ("text", "csv", "json")


class ParseError(PitError):
    pass


def fmt_float(x):
    """17 significant digits, which always round-trips a double."""
    x = float(x)
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj, indent=2):
    """JSON text with every float written to 17 significant digits.

    Keys are sorted; NaN and infinities become ``null``.
    """
    return _dump(obj, indent, 0) + "\n"


def _dump(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, indent, level + 1)}"
                 for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, set, frozenset)):
        seq = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        if not seq:
            return "[]"
        items = [f"{pad}{_dump(v, indent, level + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def detect_format(path, fmt=None):
    if fmt:
        if fmt not in FORMATS:
            raise ParseError(f"unknown input format {fmt!r}")
        return fmt
    ext = os.path.splitext(str(path))[1].lower()
    return {".csv": "csv", ".json": "json"}.get(ext, "text")


def _number(tok, line):
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"line {line}: cannot parse {tok!r} as a number") from None
    if not math.isfinite(v):
        raise ParseError(f"line {line}: non-finite value {tok!r}")
    if v < 0.0 or v > 1.0:
        raise DomainError(f"line {line}: PIT value {tok!r} outside [0, 1]")
    return v


def _read_text(text):
    vals = []
    for k, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if s:
            vals.append(_number(s, k))
    return vals, {}


def _read_csv(text, column):
    rows = list(csv.reader(text.splitlines()))
    rows = [(k, r) for k, r in enumerate(rows, start=1) if r and any(c.strip() for c in r)]
    if not rows:
        return [], {}
    first = rows[0][1]
    try:
        [float(c) for c in first]
        header = None
    except ValueError:
        header = [c.strip() for c in first]
        rows = rows[1:]
    if column is None:
        col = 0
    elif header is not None and column in header:
        col = header.index(column)
    else:
        try:
            col = int(column)
        except ValueError:
            raise ParseError(f"column {column!r} not found in CSV header") from None
    vals = []
    for k, r in rows:
        if col >= len(r):
            raise ParseError(f"line {k}: missing column {column!r}")
        vals.append(_number(r[col].strip(), k))
    return vals, {}


def _read_json(text):
    try:
        doc = json.loads(text) if text.strip() else []
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
    meta = {}
    if isinstance(doc, dict):
        meta = {k: doc[k] for k in ("kind", "draws") if k in doc}
        doc = doc.get("values")
    if not isinstance(doc, list):
        raise ParseError("JSON input must be an array of numbers or an object with 'values'")
    vals = []
    for k, v in enumerate(doc):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"element {k}: not a number")
        vals.append(_number(repr(float(v)), f"element {k}"))
    return vals, meta


def read_values(path, fmt=None, column=None):
    """Parse PIT values from a text, CSV or JSON file.

    Returns the values and any metadata (``kind``, ``draws``) stored in a
    JSON object input.
    """
    fmt = detect_format(path, fmt)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if fmt == "text":
        return _read_text(text)
    if fmt == "csv":
        return _read_csv(text, column)
    return _read_json(text)


def read_sample(path, fmt=None, column=None, kind=None, draws=None):
    """Read a file into a :class:`PitSample`."""
    vals, meta = read_values(path, fmt, column)
    if not vals:
        raise EmptySample(f"no PIT values in {path}")
    kind = kind or meta.get("kind", "continuous")
    draws = draws if draws is not None else meta.get("draws")
    if kind == "rank":
        return PitSample.rank_based(vals, draws)
    return PitSample.continuous(vals)
