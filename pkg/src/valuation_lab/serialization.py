"""JSON encoding shared by the library and the CLI.

Rationals travel as exact strings ``"p/q"`` (or ``"p"``), never as JSON
numbers. Polytopes are stored by their vertices and rebuilt through the hull,
so anything that parses comes back canonical.
"""

from __future__ import annotations

import json
from enum import Enum
from fractions import Fraction
from typing import Any

from . import linalg as la
from .errors import DegenerateInput, DimensionMismatch, InputError
from .geometry import Polytope, convex_hull
from .linalg import LinearMap, mpq


def rational_to_json(q) -> str:
    return la.fmt(la.rational(q))


def rational_from_json(s) -> mpq:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise InputError(f"expected an exact rational string, got {s!r}")
    try:
        return la.rational(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational: {s!r}") from exc


def polytope_to_json(P: Polytope) -> dict:
    return {"dim": P.dim, "vertices": [[la.fmt(x) for x in v] for v in P.vertices]}


def polytope_from_json(obj) -> Polytope:
    if not isinstance(obj, dict) or "vertices" not in obj:
        raise InputError("polytope JSON needs a 'vertices' list")
    verts = obj["vertices"]
    if not isinstance(verts, list) or not verts or not all(isinstance(v, list) for v in verts):
        raise InputError("'vertices' must be a non-empty list of coordinate lists")
    points = [[rational_from_json(x) for x in v] for v in verts]
    n = obj.get("dim", len(points[0]))
    if any(len(p) != n for p in points):
        raise DimensionMismatch(f"vertex coordinates do not all have length {n}")
    if n < 1:
        raise InputError("dimension must be positive")
    try:
        return convex_hull(points)
    except DegenerateInput:
        raise
    except (ValueError, IndexError) as exc:
        raise InputError(str(exc)) from exc


def linear_map_to_json(phi: LinearMap) -> dict:
    return {"entries": [[la.fmt(x) for x in row] for row in phi.entries]}


def linear_map_from_json(obj) -> LinearMap:
    if not isinstance(obj, dict) or not isinstance(obj.get("entries"), list):
        raise InputError("linear map JSON needs an 'entries' matrix")
    rows = obj["entries"]
    if not all(isinstance(r, list) for r in rows):
        raise InputError("'entries' must be a list of rows")
    return LinearMap([[rational_from_json(x) for x in r] for r in rows])


def value_to_json(value) -> Any:
    """Exact JSON form of any value the library produces.

    Scalars become strings, vectors lists and matrices row-major nested lists;
    polytopes, maps and reports nested inside dicts are encoded recursively.
    """
    if isinstance(value, (mpq, Fraction)):
        return rational_to_json(value)
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Polytope):
        return polytope_to_json(value)
    if isinstance(value, LinearMap):
        return linear_map_to_json(value)
    if isinstance(value, (tuple, list)):
        return [value_to_json(v) for v in value]
    if isinstance(value, dict):
        return {str(k): value_to_json(v) for k, v in value.items()}
    # ExactLog, Dim1Segment and friends have exact reprs.
    return repr(value)


def report_to_json(report) -> dict:
    return {
        "passed": report.passed,
        "trials": report.trials,
        "seed": report.seed,
        "counterexample": value_to_json(report.counterexample),
    }


def fit_result_to_json(result) -> dict:
    return {
        "coefficients": [rational_to_json(c) for c in result.coefficients],
        "residual_ok": result.residual_ok,
        "holdout_failures": [polytope_to_json(P) for P in result.holdout_failures],
    }


def dumps(obj) -> str:
    """Deterministic one-document rendering used by the CLI."""
    return json.dumps(obj, sort_keys=False, separators=(", ", ": "))


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from exc
