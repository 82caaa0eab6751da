"""Strict JSON schemas for problem inputs and solution artifacts.

Input schema::

    {
      "dimension": 1 | 2,
      "atoms": [{"x": [..n floats..], "mass": positive float}, ...],
      "weight": {
        "kind": "gaussian" | "constant" | "radial_profile",
        "beta": positive float,          # optional, defaulted per kind
        "value": positive float,         # constant only
        "profile": [[r, g], ...]         # radial_profile only
      }
    }

Unknown keys are rejected.  Schema violations raise SchemaError with the
offending JSON path; syntax errors carry line and column.  All emitted
JSON is canonical (sorted keys, two-space indent, trailing newline), so
identical configurations produce byte-identical artifacts.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .lifting import DirectionalMeasure
from .measures import Weight

_WEIGHT_KEYS = {"kind", "beta", "value", "profile"}
_ATOM_KEYS = {"x", "mass"}
_TOP_KEYS = {"dimension", "atoms", "weight"}


def _jsonable(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(canonical_dumps(obj))


def _require_keys(record: dict, allowed: set, required: set, where: str) -> None:
    if not isinstance(record, dict):
        raise SchemaError(f"{where}: expected an object")
    unknown = set(record) - allowed
    if unknown:
        raise SchemaError(f"{where}: unknown key(s) {sorted(unknown)}")
    missing = required - set(record)
    if missing:
        raise SchemaError(f"{where}: missing key(s) {sorted(missing)}")


def _positive_number(value, where: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise SchemaError(f"{where}: expected a number")
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise SchemaError(f"{where}: must be finite and > 0")
    return value


def parse_weight(record: dict, dimension: int, where: str = "weight") -> Weight:
    _require_keys(record, _WEIGHT_KEYS, {"kind"}, where)
    kind = record["kind"]
    if kind not in ("gaussian", "constant", "radial_profile"):
        raise SchemaError(f"{where}.kind: unknown weight kind {kind!r}")
    ambient = dimension + 1
    beta = record.get("beta")
    if beta is None:
        beta = Weight.default_beta(kind, ambient)
    else:
        beta = _positive_number(beta, f"{where}.beta")
    if kind == "gaussian" and not (0.0 < beta < 1.0 / ambient):
        raise SchemaError(
            f"{where}.beta: gaussian weight requires beta in (0, 1/{ambient})"
        )
    if kind == "constant":
        value = _positive_number(record.get("value", 1.0), f"{where}.value")
        if "profile" in record:
            raise SchemaError(f"{where}.profile: not allowed for constant weight")
        return Weight.constant(value, beta=beta)
    if kind == "gaussian":
        if "value" in record or "profile" in record:
            raise SchemaError(f"{where}: gaussian weight takes only kind/beta")
        return Weight.gaussian(beta=beta)
    profile = record.get("profile")
    if profile is None:
        raise SchemaError(f"{where}.profile: required for radial_profile weight")
    try:
        return Weight.radial_profile(np.asarray(profile, dtype=float), beta=beta)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}.profile: {exc}") from exc


def parse_instance(data: dict) -> tuple[DirectionalMeasure, Weight]:
    _require_keys(data, _TOP_KEYS, _TOP_KEYS, "$")
    dim = data["dimension"]
    if dim not in (1, 2):
        raise SchemaError("$.dimension: must be 1 or 2")
    atoms = data["atoms"]
    if not isinstance(atoms, list) or not atoms:
        raise SchemaError("$.atoms: expected a nonempty list")
    points, masses = [], []
    for i, rec in enumerate(atoms):
        where = f"$.atoms[{i}]"
        _require_keys(rec, _ATOM_KEYS, _ATOM_KEYS, where)
        x = rec["x"]
        if (
            not isinstance(x, list)
            or len(x) != dim
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x)
        ):
            raise SchemaError(f"{where}.x: expected a list of {dim} numbers")
        if not all(np.isfinite(float(v)) for v in x):
            raise SchemaError(f"{where}.x: values must be finite")
        points.append([float(v) for v in x])
        masses.append(_positive_number(rec["mass"], f"{where}.mass"))
    weight = parse_weight(data["weight"], dim)
    try:
        measure = DirectionalMeasure.from_atoms(points, masses)
    except ValueError as exc:
        raise SchemaError(f"$.atoms: {exc}") from exc
    return measure, weight


def load_instance(path) -> tuple[DirectionalMeasure, Weight]:
    """Read and validate an input file; SchemaError on any violation."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return parse_instance(data)


def solution_to_dict(solution) -> dict:
    """Serialize an InstanceSolution, with enough data to re-verify."""
    return {
        "input": {
            **solution.measure.to_dict(),
            "weight": solution.weight.to_dict(),
        },
        "quadrature": {
            "order": solution.quad.order,
            "mc_samples": solution.quad.mc_samples,
            "seed": solution.quad.seed,
        },
        "polytope": solution.body.to_dict(),
        "potential": solution.potential.to_dict(),
        "c": solution.c,
        "solve": solution.report.to_dict(),
    }
