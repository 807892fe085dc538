"""JSON matrix documents.

A document looks like::

    {"n": 2, "entries": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]],
     "name": "jordan2", "class_hint": "general"}

Each entry is an ``[re, im]`` pair.  Floats are written with ``repr`` so
``parse_matrix(serialize_matrix(M))`` reproduces ``M`` bit for bit.
Class hints are checked against the matrix before anyone relies on them.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import HintMismatch, ParseError, ValidationError
from .special_forms import is_hermitian, is_normal, is_weighted_permutation

__all__ = [
    "CLASS_HINTS",
    "MatrixDocument",
    "parse_matrix",
    "load_matrix",
    "serialize_matrix",
    "check_hint",
    "certificate_document",
    "parse_certificate",
]

CLASS_HINTS = ("general", "hermitian", "normal", "weighted-permutation")

_HINT_CHECKS = {
    "general": lambda A: True,
    "hermitian": is_hermitian,
    "normal": is_normal,
    "weighted-permutation": is_weighted_permutation,
}


@dataclass(frozen=True)
class MatrixDocument:
    matrix: np.ndarray
    name: str = None
    class_hint: str = None

    @property
    def n(self):
        return int(self.matrix.shape[0])


def _number(x, field):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"expected a number, got {json.dumps(x)}", field=field)
    return float(x)


def _entries(raw, rows, cols, field):
    if not isinstance(raw, list):
        raise ParseError("entries must be a list of rows", field=field)
    if len(raw) != rows:
        raise ValidationError(f"{field} has {len(raw)} rows, expected {rows}")
    out = np.empty((rows, cols), dtype=np.complex128)
    for i, row in enumerate(raw):
        if not isinstance(row, list):
            raise ParseError("row must be a list", field=f"{field}[{i}]")
        if len(row) != cols:
            raise ValidationError(f"{field}[{i}] has {len(row)} entries, expected {cols}")
        for j, pair in enumerate(row):
            where = f"{field}[{i}][{j}]"
            if not isinstance(pair, list) or len(pair) != 2:
                raise ParseError("entry must be an [re, im] pair", field=where)
            re, im = _number(pair[0], where + "[0]"), _number(pair[1], where + "[1]")
            if not (math.isfinite(re) and math.isfinite(im)):
                raise ValidationError(f"non-finite entry at {where}")
            out[i, j] = complex(re, im)
    return out


def _load_json(text):
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc.reason}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc


def _document(obj, field=""):
    prefix = f"{field}." if field else ""
    if not isinstance(obj, dict):
        raise ParseError("document must be a JSON object", field=field or None)
    for key in ("n", "entries"):
        if key not in obj:
            raise ParseError(f"missing required key {key!r}", field=prefix + key)
    n = obj["n"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise ParseError("n must be an integer", field=prefix + "n")
    if n < 1:
        raise ValidationError("n must be positive")
    matrix = _entries(obj["entries"], n, n, prefix + "entries")
    name = obj.get("name")
    if name is not None and not isinstance(name, str):
        raise ParseError("name must be a string", field=prefix + "name")
    hint = obj.get("class_hint")
    if hint is not None and hint not in CLASS_HINTS:
        raise ParseError(f"unknown class hint {hint!r}; expected one of {CLASS_HINTS}",
                         field=prefix + "class_hint")
    doc = MatrixDocument(matrix=matrix, name=name, class_hint=hint)
    check_hint(doc)
    return doc


def parse_matrix(text):
    """Parse and validate a matrix document from JSON text."""
    return _document(_load_json(text))


def load_matrix(path):
    with open(path, "rb") as fh:
        return parse_matrix(fh.read())


def check_hint(doc):
    """Raise :class:`HintMismatch` if the class hint does not describe the matrix."""
    if doc.class_hint is not None and not _HINT_CHECKS[doc.class_hint](doc.matrix):
        raise HintMismatch(f"matrix does not satisfy class hint {doc.class_hint!r}")
    return doc


def _pairs(M):
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def _as_dict(matrix, name=None, class_hint=None):
    M = np.asarray(matrix, dtype=np.complex128)
    out = {"n": int(M.shape[0]), "entries": _pairs(M)}
    if name is not None:
        out["name"] = name
    if class_hint is not None:
        out["class_hint"] = class_hint
    return out


def serialize_matrix(matrix, name=None, class_hint=None, indent=None):
    """JSON text for a matrix (or a :class:`MatrixDocument`)."""
    if isinstance(matrix, MatrixDocument):
        name = matrix.name if name is None else name
        class_hint = matrix.class_hint if class_hint is None else class_hint
        matrix = matrix.matrix
    return json.dumps(_as_dict(matrix, name, class_hint), indent=indent)


def certificate_document(A, cert, name=None):
    """JSON-ready dict holding ``A`` and the isometry ``V`` for re-verification."""
    V = np.asarray(cert.V, dtype=np.complex128)
    return {
        "matrix": _as_dict(A, name),
        "isometry": {"rows": int(V.shape[0]), "cols": int(V.shape[1]), "entries": _pairs(V)},
        "k": int(cert.k),
    }


def parse_certificate(text):
    """Inverse of :func:`certificate_document`: returns ``(A, V)``."""
    obj = _load_json(text)
    if not isinstance(obj, dict) or "matrix" not in obj or "isometry" not in obj:
        raise ParseError("certificate needs 'matrix' and 'isometry' objects")
    doc = _document(obj["matrix"], "matrix")
    iso = obj["isometry"]
    if not isinstance(iso, dict):
        raise ParseError("isometry must be an object", field="isometry")
    rows, cols = iso.get("rows"), iso.get("cols")
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (rows, cols)):
        raise ParseError("isometry rows/cols must be integers", field="isometry")
    V = _entries(iso.get("entries"), rows, cols, "isometry.entries")
    return doc.matrix, V
