"""Problem files: JSON schema validation, parsing and serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .errors import InputError, LmhsError
from .filtrations import HodgeFiltration, PolarizedSpace, validate_hodge
from .linalg import Mat, Subspace
from .nilpotent import NilpotentCone
from .scalars import to_scalar
from .strata import BoundaryComplex

_SCHEMA = None


def schema() -> dict:
    global _SCHEMA
    if _SCHEMA is None:
        _SCHEMA = json.loads(resources.files("lmhs").joinpath("problem.schema.json").read_text())
    return _SCHEMA


def _loc(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def parse_matrix(data, where: str, shape: tuple[int, int] | None = None) -> Mat:
    try:
        rows = [[to_scalar(x) for x in row] for row in data]
        M = Mat(rows, len(rows[0]) if rows else 0)
    except (ValueError, TypeError, LmhsError) as e:
        raise InputError(f"{where}: {e}", location=where) from None
    if shape is not None and M.shape != shape:
        raise InputError(f"{where}: expected shape {shape}, got {M.shape}", location=where)
    return M


@dataclass
class Problem:
    space: PolarizedSpace
    name: str = ""
    cone: NilpotentCone | None = None
    F: HodgeFiltration | None = None
    complex: BoundaryComplex | None = None
    gamma: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def require(self, *what: str):
        for w in what:
            if getattr(self, w) in (None, []):
                raise InputError(f"problem has no {w!r} section", location=w)


def problem_from_dict(data: Any) -> Problem:
    try:
        jsonschema.validate(data, schema())
    except jsonschema.ValidationError as e:
        where = _loc(e.absolute_path)
        raise InputError(f"{where}: {e.message}", location=where) from None
    sp = data["space"]
    r = sp["rank"]
    Q = parse_matrix(sp["Q"], "space.Q", (r, r))
    try:
        space = PolarizedSpace(r, sp["weight"], Q)
    except LmhsError as e:
        raise InputError(f"space: {e}", location="space") from None
    params = data.get("params", {})

    cx = None
    if "complex" in data:
        c = data["complex"]
        Ns = {int(i): parse_matrix(M, f"complex.N.{i}", (r, r)) for i, M in c["N"].items()}
        gam = [parse_matrix(M, f"complex.gamma[{k}]", (r, r)) for k, M in enumerate(c.get("gamma", []))]
        cx = BoundaryComplex(c["nu"], c["strata"], space, Ns, gam)

    cone = None
    try:
        if "cone" in data:
            gens = [parse_matrix(M, f"cone[{k}]", (r, r)) for k, M in enumerate(data["cone"])]
            cone = NilpotentCone(gens, space)
        elif cx is not None and cx.strata:
            I = params.get("I") or sorted(max(cx.strata, key=lambda s: (len(s), sorted(s))))
            for i in I:
                if i not in cx.N:
                    raise InputError(f"params.I: component {i} has no nilpotent", location="params.I")
            cone = NilpotentCone([cx.N[i] for i in sorted(I)], space, labels=sorted(I))
    except InputError as e:
        if "location" not in e.context:
            raise InputError(f"cone: {e}", location="cone") from None
        raise

    F = None
    if "hodge" in data:
        steps = {}
        for p, M in data["hodge"].items():
            B = parse_matrix(M, f"hodge.{p}")
            if B.nrows != r:
                raise InputError(f"hodge.{p}: basis vectors must have length {r}", location=f"hodge.{p}")
            steps[int(p)] = Subspace.span(B.columns(), r)
        try:
            F = HodgeFiltration(r, steps)
            validate_hodge(F, space)
        except LmhsError as e:
            raise InputError(f"hodge: {e}", location="hodge") from None

    gamma = [parse_matrix(M, f"gamma[{k}]", (r, r)) for k, M in enumerate(data.get("gamma", []))]
    if not gamma and cx is not None:
        gamma = list(cx.gamma)
    return Problem(space, data.get("name", ""), cone, F, cx, gamma, params, data)


def load_problem(path: str | Path) -> Problem:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}", location=str(path)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}:{e.lineno}:{e.colno}: {e.msg}",
                         location=f"line {e.lineno} column {e.colno}") from None
    return problem_from_dict(data)


def problem_to_dict(prob: Problem) -> dict:
    """Canonical dictionary form: exact scalars as strings, subspaces in echelon form."""
    raw = prob.raw
    out: dict = {"name": prob.name}
    if raw.get("description"):
        out["description"] = raw["description"]
    sp = prob.space
    out["space"] = {"rank": sp.rank, "weight": sp.weight, "Q": sp.Q.to_json()}
    if "cone" in raw and prob.cone is not None:
        out["cone"] = [N.to_json() for N in prob.cone.generators]
    if prob.F is not None:
        out["hodge"] = {str(p): prob.F(p).to_json() for p in prob.F.indices()
                        if 0 < prob.F(p).dim < prob.F.n}
    cx = prob.complex
    if cx is not None:
        out["complex"] = {"nu": cx.nu, "strata": [sorted(I) for I in cx.strata],
                          "N": {str(i): M.to_json() for i, M in sorted(cx.N.items())}}
        if cx.gamma:
            out["complex"]["gamma"] = [g.to_json() for g in cx.gamma]
    if raw.get("gamma"):
        out["gamma"] = [g.to_json() for g in prob.gamma]
    if prob.params:
        out["params"] = json.loads(json.dumps(prob.params))
    return out
