"""JSON encodings of colligations, points, polynomials and matrices.

Complex numbers are ``[re, im]`` pairs, matrices are row-major nested lists of
them. On input a plain real number is accepted wherever a complex one is
expected. :func:`dumps` writes every float with 17 significant digits so a
round trip through text is lossless.
"""

from __future__ import annotations

import json
import math
import numbers

import numpy as np

from .core import BallShape, Colligation, DimensionError, MatrixPoint
from .polynomial import MultiPoly


class FormatError(ValueError):
    """A JSON document does not have the expected layout."""


# encoding -------------------------------------------------------------------

def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_json(M):
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.shape[0] == 0:
        return []
    return [[complex_to_json(z) for z in row] for row in M]


def shape_to_json(shape: BallShape):
    return [list(d) for d in shape.dims]


def colligation_to_json(coll: Colligation):
    return {"shape": shape_to_json(coll.shape), "n": list(coll.n), "alpha": coll.alpha, "beta": coll.beta,
            "A": matrix_to_json(coll.A), "B": matrix_to_json(coll.B),
            "C": matrix_to_json(coll.C), "D": matrix_to_json(coll.D)}


def point_to_json(point: MatrixPoint):
    return {"shape": shape_to_json(point.shape), "s": point.s, "Z": [matrix_to_json(z) for z in point.Z]}


def poly_to_json(p: MultiPoly):
    variables = p.shape.variables()
    terms = []
    for mono, c in sorted(p.terms.items(), key=lambda kv: (sum(kv[0]), [-e for e in kv[0]])):
        terms.append({"monomial": [[*variables[v], e] for v, e in enumerate(mono) if e],
                      "coeff": complex_to_json(c)})
    return {"shape": shape_to_json(p.shape), "terms": terms}


def kfile_to_json(shape, n, K):
    return {"shape": shape_to_json(shape), "n": list(n), "K": matrix_to_json(K)}


def _fmt(obj):
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (numbers.Integral, np.integer)):
        return str(int(obj))
    if isinstance(obj, (numbers.Real, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise FormatError(f"cannot encode non-finite value {x}")
        return format(x, ".17g")
    if isinstance(obj, (numbers.Complex, np.complexfloating)):
        return _fmt(complex_to_json(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return _fmt(matrix_to_json(obj) if obj.ndim == 2 else [complex_to_json(z) for z in obj.ravel()])
        return _fmt(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in obj) + "]"
    raise FormatError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    return _fmt(obj)


# decoding -------------------------------------------------------------------

def _require(doc, key, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(f"missing field {key!r}")
    val = doc[key]
    if kind is not None and not isinstance(val, kind):
        raise FormatError(f"field {key!r} has the wrong type")
    return val


def complex_from_json(obj):
    if isinstance(obj, bool):
        raise FormatError("boolean where a number was expected")
    if isinstance(obj, numbers.Real):
        return complex(obj)
    if isinstance(obj, list) and len(obj) == 2 and all(isinstance(x, numbers.Real) for x in obj):
        return complex(obj[0], obj[1])
    raise FormatError(f"bad complex number {obj!r}")


def matrix_from_json(obj):
    if not isinstance(obj, list):
        raise FormatError("matrix must be a list of rows")
    if len(obj) == 0:
        return np.zeros((0, 0), dtype=complex)
    if not all(isinstance(row, list) for row in obj):
        raise FormatError("matrix must be a list of rows")
    width = len(obj[0])
    if any(len(row) != width for row in obj):
        raise FormatError("ragged matrix")
    return np.array([[complex_from_json(z) for z in row] for row in obj], dtype=complex).reshape(len(obj), width)


def shape_from_json(obj):
    try:
        return BallShape([(int(l), int(m)) for l, m in obj])
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad shape {obj!r}: {exc}") from exc


def colligation_from_json(doc) -> Colligation:
    shape = shape_from_json(_require(doc, "shape", list))
    n = [int(x) for x in _require(doc, "n", list)]
    D = matrix_from_json(_require(doc, "D"))
    for key, want in (("alpha", D.shape[0]), ("beta", D.shape[1])):
        if key in doc and int(doc[key]) != want:
            raise DimensionError(f"{key}={doc[key]} disagrees with D of shape {D.shape}", where=(key,))
    return Colligation(shape, n, matrix_from_json(_require(doc, "A")), matrix_from_json(_require(doc, "B")),
                       matrix_from_json(_require(doc, "C")), D)


def point_from_json(doc, shape: BallShape | None = None) -> MatrixPoint:
    s = int(_require(doc, "s"))
    Z = [matrix_from_json(z) for z in _require(doc, "Z", list)]
    if "shape" in doc:
        shape = shape_from_json(doc["shape"])
    if shape is None:
        if any(z.shape[0] % s or z.shape[1] % s for z in Z):
            raise FormatError("point blocks are not multiples of s")
        shape = BallShape([(z.shape[0] // s, z.shape[1] // s) for z in Z])
    return MatrixPoint(shape, Z, s)


def poly_from_json(doc) -> MultiPoly:
    shape = shape_from_json(_require(doc, "shape", list))
    terms = {}
    for term in _require(doc, "terms", list):
        exps = [0] * shape.nvars
        for entry in _require(term, "monomial", list):
            if not isinstance(entry, list) or len(entry) != 4:
                raise FormatError(f"bad monomial entry {entry!r}; expected [r, i, j, exp]")
            r, i, j, e = (int(x) for x in entry)
            exps[shape.var_index((r, i, j))] += e
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + complex_from_json(_require(term, "coeff"))
    return MultiPoly(shape, terms)


def kfile_from_json(doc):
    """``{"shape", "n", "K"}`` (``n`` optional); a colligation document supplies its ``A``."""
    shape = shape_from_json(_require(doc, "shape", list))
    n = [int(x) for x in doc["n"]] if "n" in doc else None
    K = matrix_from_json(doc["K"] if "K" in doc else _require(doc, "A"))
    return shape, n, K


def load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
