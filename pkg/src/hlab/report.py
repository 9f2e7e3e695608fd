"""Report serialization: the ``hlab-report/1`` JSON envelope, CSV and matrix dumps.

Reports are plain dicts validated against :data:`REPORT_SCHEMA`. Complex
numbers serialize as ``[re, im]``; non-finite reals as the strings
``"inf"``, ``"-inf"`` and ``"nan"`` so the output stays strict JSON.

Matrix dumps use a 16-byte header (``b"HLAB"``, u32 rows, u32 cols, u32
reserved zero) followed by row-major little-endian complex128 data, i.e.
float64 real/imaginary pairs. Paths ending in ``.json`` get a JSON
document instead.
"""

from __future__ import annotations

import csv
import datetime as _dt
import enum
import json
import math
import platform
import struct
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__

SCHEMA_ID = "hlab-report/1"
MAGIC = b"HLAB"

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "command", "params", "result", "verdict"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_ID},
        "command": {
            "enum": [
                "weights", "series", "gram", "riesz", "growth", "dnlower", "blower",
                "cowen", "index", "intertwine", "expand", "compose-check", "bench",
            ]
        },
        "params": {"type": "object"},
        "result": {"type": ["object", "array"]},
        "verdict": {"type": ["string", "null"]},
        "meta": {
            "type": "object",
            "required": ["version", "created"],
            "properties": {
                "version": {"type": "string"},
                "created": {"type": "string"},
                "python": {"type": "string"},
                "numpy": {"type": "string"},
            },
        },
    },
}


def jsonable(obj):
    """Recursively convert numpy scalars/arrays, complex numbers and enums to JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(float(obj.real)), jsonable(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def make_report(command: str, params: dict, result, verdict: str | None, meta: bool = True) -> dict:
    rep = {
        "schema": SCHEMA_ID,
        "command": command,
        "params": jsonable(params),
        "result": jsonable(result),
        "verdict": verdict,
    }
    if meta:
        rep["meta"] = {
            "version": __version__,
            "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
            "python": platform.python_version(),
            "numpy": np.__version__,
        }
    validate(rep)
    return rep


def validate(report: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if ``report`` breaks the schema."""
    jsonschema.validate(report, REPORT_SCHEMA)


def dumps(report: dict) -> str:
    """Deterministic text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_report(path) -> dict:
    """Read a report back and validate it."""
    rep = json.loads(Path(path).read_text())
    validate(rep)
    return rep


def write_csv(path, rows) -> None:
    """Write an iterable of tuples (header first)."""
    with open(path, "w", newline="") as fh:
        csv.writer(fh).writerows(rows)


def dump_matrix(path, A: np.ndarray) -> None:
    """Write ``A`` in the binary layout, or as JSON when ``path`` ends in ``.json``."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise ValueError("only 2-D matrices can be dumped")
    rows, cols = A.shape
    path = Path(path)
    if path.suffix.lower() == ".json":
        doc = {"rows": rows, "cols": cols, "re": A.real.tolist(), "im": A.imag.tolist()}
        path.write_text(json.dumps(doc))
        return
    with open(path, "wb") as fh:
        fh.write(MAGIC + struct.pack("<III", rows, cols, 0))
        fh.write(np.ascontiguousarray(A, dtype="<c16").tobytes())


def load_matrix(path) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() == ".json":
        doc = json.loads(path.read_text())
        return np.array(doc["re"], dtype=float) + 1j * np.array(doc["im"], dtype=float)
    raw = path.read_bytes()
    if raw[:4] != MAGIC or len(raw) < 16:
        raise ValueError(f"{path}: not an HLAB matrix file")
    rows, cols, _ = struct.unpack("<III", raw[4:16])
    data = np.frombuffer(raw, dtype="<c16", offset=16)
    if data.size != rows * cols:
        raise ValueError(f"{path}: expected {rows * cols} entries, found {data.size}")
    return data.reshape(rows, cols).astype(np.complex128)
