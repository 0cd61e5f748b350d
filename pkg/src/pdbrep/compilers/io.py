"""JSON encoding of views, representations and compiler reports.

Representation: {"base": <pdb>, "condition": "<formula>" | null,
"view": {"Out": {"head": ["x", "y"], "body": "<formula>"}}}. Head entries
are variable names, or {"const": <atom>} for constants.
"""
from __future__ import annotations

import dataclasses
from enum import Enum
from fractions import Fraction

from ..errors import ModelError, SchemaError
from ..probspace.io import (atom_from_json, atom_to_json, fact_to_json,
                            instance_to_json, pdb_from_json, pdb_to_json,
                            value_to_json)
from ..probspace.model import TiPdb
from ..probspace.radicals import PowProb, RadicalSum
from ..relmodel.atoms import Fact, Instance, Schema
from ..relmodel.evaluate import Query, View
from ..relmodel.formula import Const, Var, format_formula
from ..relmodel.parser import parse_formula
from .representation import Representation


def view_to_json(view: View) -> dict:
    out = {}
    for q in view.queries:
        head = [t.name if isinstance(t, Var) else {"const": atom_to_json(t.value)} for t in q.head]
        out[q.name] = {"head": head, "body": format_formula(q.formula)}
    return out


def view_from_json(d, input_schema: Schema | None = None) -> View:
    if not isinstance(d, dict) or not d:
        raise SchemaError("a view is a non-empty object of output relations")
    queries = []
    for name, spec in d.items():
        try:
            head = tuple(Const(atom_from_json(t["const"])) if isinstance(t, dict) else Var(t)
                         for t in spec["head"])
            body = parse_formula(spec["body"], input_schema)
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed query {name!r}") from exc
        queries.append(Query(name, head, body))
    return View(tuple(queries), input_schema)


def representation_to_json(rep: Representation) -> dict:
    return {
        "base": pdb_to_json(rep.base),
        "condition": None if rep.condition is None else format_formula(rep.condition),
        "view": view_to_json(rep.view),
    }


def representation_from_json(d) -> Representation:
    if not isinstance(d, dict):
        raise ModelError("a representation is a JSON object")
    base = pdb_from_json(d.get("base"))
    if not isinstance(base, TiPdb):
        raise ModelError("the base of a representation must be a TI-PDB")
    cond = d.get("condition")
    condition = None if cond is None else parse_formula(cond, base.schema)
    return Representation(base, condition, view_from_json(d.get("view"), base.schema))


def to_json(value):
    """Generic encoder for reports: rationals as "a/b", exact radicals as
    factor lists or term lists, facts and instances in the PDB format."""
    if isinstance(value, Enum):
        return str(value)
    if value is None or isinstance(value, (bool, str, int, float)):
        return value
    if isinstance(value, (Fraction, PowProb, RadicalSum)):
        return value_to_json(value)
    if isinstance(value, Fact):
        return fact_to_json(value)
    if isinstance(value, Instance):
        return instance_to_json(value)
    if isinstance(value, View):
        return view_to_json(value)
    if isinstance(value, Representation):
        return representation_to_json(value)
    if dataclasses.is_dataclass(value):
        return {f.name: to_json(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {str(k): to_json(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted((to_json(v) for v in value), key=repr)
    if isinstance(value, (list, tuple)):
        return [to_json(v) for v in value]
    atom = atom_to_json(value)
    if atom is not value:
        return atom
    raise TypeError(f"cannot encode {value!r}")
