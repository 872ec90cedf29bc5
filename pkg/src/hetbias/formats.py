"""Machine-readable CSV and JSON output.

CSV files start with ``# key=<json value>`` metadata lines (sorted by key),
then a header row, then data rows. Floats are written with 17 significant
digits, so parsing and re-emitting a file reproduces it byte for byte.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

__all__ = ["format_value", "write_csv", "read_csv", "dumps_json", "read_dataset_csv"]


def format_value(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def _parse_cell(s: str):
    if s == "true":
        return True
    if s == "false":
        return False
    if s == "":
        return None
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def write_csv(meta: Mapping[str, Any], header: Sequence[str],
              rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    for key in sorted(meta):
        buf.write(f"# {key}={json.dumps(meta[key], sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def read_csv(text: str):
    """Inverse of :func:`write_csv`: returns ``(meta, header, rows)``."""
    meta = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines) and lines[i].startswith("# "):
        key, _, value = lines[i][2:].partition("=")
        meta[key] = json.loads(value)
        i += 1
    reader = csv.reader(lines[i:])
    header = next(reader)
    rows = [[_parse_cell(c) for c in r] for r in reader]
    return meta, header, rows


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps_json(obj) -> str:
    """Single JSON object, alphabetical keys, trailing newline."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


class MissingColumn(KeyError):
    pass


class BadCell(ValueError):
    pass


def read_dataset_csv(path, columns: Sequence[str]) -> dict[str, np.ndarray]:
    """Read numeric columns from a comma-separated file with a header row.

    Raises ``FileNotFoundError``, :class:`MissingColumn` or :class:`BadCell`
    (empty or non-numeric entry; missing values are never imputed).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(line for line in fh if not line.startswith("#"))
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise BadCell(f"{path}: empty file") from None
        idx = {}
        for c in columns:
            if c not in header:
                raise MissingColumn(f"{path}: no column {c!r} (have {header})")
            idx[c] = header.index(c)
        data = {c: [] for c in columns}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            for c, j in idx.items():
                cell = row[j].strip() if j < len(row) else ""
                try:
                    val = float(cell)
                except ValueError:
                    raise BadCell(f"{path}:{lineno}: column {c!r} has non-numeric "
                                  f"value {cell!r}") from None
                if not math.isfinite(val):
                    raise BadCell(f"{path}:{lineno}: column {c!r} is not finite")
                data[c].append(val)
    return {c: np.array(v) for c, v in data.items()}
