"""JSON documents for matrices and reports.

Matrix documents have the form ``{"n": n, "rows": [[[re, im], ...], ...]}``.
Floats are written with Python's shortest round-trip representation, so a
parsed document reproduces every entry bit for bit.
"""
from __future__ import annotations

import dataclasses
import json
import math
from numbers import Real

import numpy as np

from .errors import MalformedDocument
from .matcore import as_cmatrix


def matrix_to_doc(a) -> dict:
    a = as_cmatrix(a)
    # + 0.0 folds negative zero
    rows = [[[float(z.real) + 0.0, float(z.imag) + 0.0] for z in row] for row in a]
    return {"n": int(a.shape[0]), "rows": rows}


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, Real):
        raise MalformedDocument("expected a number", path)
    value = float(value)
    if not math.isfinite(value):
        raise MalformedDocument("non-finite number", path)
    return value


def complex_from_doc(value, path="$") -> complex:
    if not isinstance(value, list) or len(value) != 2:
        raise MalformedDocument("expected a [re, im] pair", path)
    return complex(_number(value[0], f"{path}[0]"), _number(value[1], f"{path}[1]"))


def complex_to_doc(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def matrix_from_doc(doc, path="$") -> np.ndarray:
    if not isinstance(doc, dict):
        raise MalformedDocument("matrix document must be an object", path)
    n = doc.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise MalformedDocument("'n' must be a positive integer", f"{path}.n")
    rows = doc.get("rows")
    if not isinstance(rows, list) or len(rows) != n:
        raise MalformedDocument(f"'rows' must be a list of {n} rows", f"{path}.rows")
    out = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(rows):
        rpath = f"{path}.rows[{i}]"
        if not isinstance(row, list) or len(row) != n:
            raise MalformedDocument(f"row must hold {n} entries", rpath)
        for j, entry in enumerate(row):
            out[i, j] = complex_from_doc(entry, f"{rpath}[{j}]")
    return out


def to_jsonable(obj):
    """Convert report objects to plain JSON types.

    Square 2-D arrays become matrix documents, 1-D arrays and complex
    scalars become ``[re, im]`` pairs.
    """
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
                if f.repr}
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2 and obj.shape[0] == obj.shape[1]:
            return matrix_to_doc(obj)
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_doc(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False) + "\n"


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from exc


def load_matrix(path) -> np.ndarray:
    try:
        return matrix_from_doc(load_json(path))
    except MalformedDocument as exc:
        raise MalformedDocument(str(exc), str(path)) from exc


def save_matrix(a, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(matrix_to_doc(a)))
