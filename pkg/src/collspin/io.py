"""CSV and JSON serialization of results.

Spectra go to CSV (``q,re_lambda,im_lambda``, 17 significant digits, LF line
endings).  Everything else goes into a versioned JSON envelope::

    {"schema": 1, "command": "...", "params": {...}, "data": ...}

with complex numbers written as ``{"re": x, "im": y}``.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .ed import SpectrumResult
from .model import ModelParams

__all__ = [
    "SCHEMA_VERSION",
    "SPECTRUM_HEADER",
    "format_float",
    "write_spectrum_csv",
    "read_spectrum_csv",
    "to_jsonable",
    "from_jsonable",
    "write_json_report",
    "read_json_report",
    "write_table_csv",
]

SCHEMA_VERSION = 1
SPECTRUM_HEADER = ("q", "re_lambda", "im_lambda")


def format_float(x: float) -> str:
    """17 significant digits: enough for an exact round trip."""
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    return format(x, ".17g")


@contextmanager
def _open_text(path, mode: str):
    """Open ``path`` as UTF-8 text, or pass an already open stream through."""
    if hasattr(path, "write") or hasattr(path, "read"):
        yield path
        return
    with open(Path(path), mode, encoding="utf-8", newline="") as fh:
        yield fh


def write_spectrum_csv(spec: SpectrumResult, path) -> None:
    order = np.lexsort((-spec.eigenvalues.real, spec.q))
    with _open_text(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SPECTRUM_HEADER)
        for i in order:
            lam = spec.eigenvalues[i]
            w.writerow((int(spec.q[i]), format_float(lam.real), format_float(lam.imag)))


def read_spectrum_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(q, eigenvalues)`` as written by :func:`write_spectrum_csv`."""
    with _open_text(path, "r") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != SPECTRUM_HEADER:
        raise ValueError(f"{path}: missing header {','.join(SPECTRUM_HEADER)}")
    body = rows[1:]
    q = np.array([int(r[0]) for r in body], dtype=int)
    lam = np.array([complex(float(r[1]), float(r[2])) for r in body])
    return q, lam


def write_table_csv(path, header, rows) -> None:
    """Generic numeric table; floats formatted like the spectrum file."""
    with _open_text(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])


def to_jsonable(obj):
    if isinstance(obj, ModelParams):
        return obj.as_dict()
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # JSON has no inf/nan; strings keep the document valid and explicit
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()] if obj.dtype != object else \
            [to_jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_jsonable(obj):
    """Inverse of the complex encoding; other values pass through."""
    if isinstance(obj, dict):
        if set(obj) == {"re", "im"}:
            return complex(obj["re"], obj["im"])
        return {k: from_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [from_jsonable(v) for v in obj]
    if isinstance(obj, str) and obj in ("inf", "-inf", "nan"):
        return float(obj)
    return obj


def write_json_report(command: str, params: ModelParams, data, path) -> None:
    doc = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "params": to_jsonable(params),
        "data": to_jsonable(data),
    }
    with _open_text(path, "w") as fh:
        json.dump(doc, fh, indent=2, allow_nan=False)
        fh.write("\n")


def read_json_report(path) -> dict:
    with _open_text(path, "r") as fh:
        doc = json.load(fh)
    if doc.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"{path}: unsupported schema {doc.get('schema')!r}")
    doc["data"] = from_jsonable(doc["data"])
    return doc
