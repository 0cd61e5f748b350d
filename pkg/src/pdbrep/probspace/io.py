"""JSON encoding of atoms, instances, probabilities, PDBs and distributions.

Atoms: JSON ints and strings, {"copy": i} for copy indices, {"bot": true}
for the bottom marker. Probabilities: "a/b" strings (ints accepted) or a
list of {"base", "exp"} factors for a PowProb.
"""
from __future__ import annotations

import json
from fractions import Fraction

from ..errors import ModelError, SchemaError
from ..relmodel.atoms import BOT, CopyIdx, Fact, Instance, Schema
from .model import (BidPdb, ExplicitFamily, ExplicitPdb, Geometric,
                    InversePolynomial, ParametricFamily, SizeLawPdb,
                    SquareDecayPdb, Template, TiPdb, as_prob)
from .radicals import PowProb, RadicalSum, normalize


def atom_from_json(x):
    if isinstance(x, bool) or x is None or isinstance(x, float):
        raise SchemaError(f"not an atom: {x!r}")
    if isinstance(x, (int, str)):
        return x
    if isinstance(x, dict):
        if set(x) == {"copy"} and isinstance(x["copy"], int):
            return CopyIdx(x["copy"])
        if set(x) == {"bot"}:
            return BOT
    raise SchemaError(f"not an atom: {x!r}")


def atom_to_json(a):
    if isinstance(a, CopyIdx):
        return {"copy": a.index}
    if a is BOT:
        return {"bot": True}
    return a


def fact_from_json(d) -> Fact:
    try:
        return Fact(d["rel"], tuple(atom_from_json(a) for a in d.get("args", [])))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed fact {d!r}") from exc


def fact_to_json(f: Fact) -> dict:
    return {"rel": f.relation, "args": [atom_to_json(a) for a in f.args]}


def instance_to_json(inst: Instance) -> list:
    return [fact_to_json(f) for f in inst]


def instance_from_json(items) -> Instance:
    return Instance(fact_from_json(d) for d in items)


def prob_from_json(x):
    if isinstance(x, list):
        try:
            return PowProb([(Fraction(f["base"]), Fraction(f["exp"])) for f in x])
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelError(f"malformed PowProb {x!r}") from exc
    return as_prob(x)


def value_to_json(v):
    """Fractions as "a/b"; PowProbs as factor lists; radical sums as terms."""
    if isinstance(v, PowProb):
        return v.to_json()
    v = normalize(v) if isinstance(v, RadicalSum) else v
    if isinstance(v, RadicalSum):
        return {"radical_sum": [
            {"coeff": str(c), "monomial": [{"prime": p, "exp": str(e)} for p, e in k]}
            for k, c in sorted(v.terms.items())
        ], "approx": float(v)}
    return str(Fraction(v))


def schema_from_json(items) -> Schema:
    try:
        return Schema(tuple((d["name"], d["arity"]) for d in items))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed schema {items!r}") from exc


def schema_to_json(schema: Schema) -> list:
    return [{"name": n, "arity": a} for n, a in schema.relations]


def _template_from_json(d) -> Template:
    if not isinstance(d, dict) or len(d) != 1:
        raise ModelError(f"malformed template {d!r}")
    (kind, rel), = d.items()
    return Template(kind, rel)


def family_from_json(d):
    kind = d.get("kind")
    template = _template_from_json(d.get("template", {"unary": "R"}))
    if kind == "geometric":
        law = Geometric(Fraction(d["a"]), Fraction(d["ratio"]))
    elif kind == "inverse_poly":
        law = InversePolynomial(Fraction(d["c"]), int(d["s"]), Fraction(d.get("d", 0)))
    else:
        raise ModelError(f"unknown family kind {kind!r}")
    return ParametricFamily(law, template)


def pdb_from_json(d):
    if not isinstance(d, dict):
        raise ModelError("a PDB description must be a JSON object")
    kind = d.get("kind")
    if kind == "size_law":
        return SizeLawPdb(Fraction(d["a"]), Fraction(d["ratio"]), int(d["size_base"]), d.get("relation", "R"))
    if kind == "square_decay":
        return SquareDecayPdb(int(d.get("base", 2)), int(d.get("size_mult", 1)), d.get("relation", "R"))
    schema = schema_from_json(d.get("schema", []))
    if kind == "ti":
        if "family" in d:
            fam = family_from_json(d["family"])
            if fam.template.relation not in schema:
                schema = schema.union(Schema(((fam.template.relation, fam.template.arity),)))
            return TiPdb(schema, fam)
        entries = tuple((fact_from_json(f), prob_from_json(f["p"])) for f in d.get("facts", []))
        return TiPdb(schema, ExplicitFamily(entries))
    if kind == "bid":
        blocks = []
        for block in d.get("blocks", []):
            blocks.append(tuple((fact_from_json(f), prob_from_json(f["p"])) for f in block))
        return BidPdb(schema, tuple(blocks))
    if kind == "explicit":
        worlds = []
        for w in d.get("worlds", []):
            worlds.append((instance_from_json(w.get("facts", [])), prob_from_json(w["p"])))
        return ExplicitPdb(schema, tuple(worlds))
    raise ModelError(f"unknown PDB kind {kind!r}")


def pdb_to_json(pdb) -> dict:
    if isinstance(pdb, TiPdb):
        out = {"schema": schema_to_json(pdb.schema), "kind": "ti"}
        fam = pdb.family
        if isinstance(fam, ExplicitFamily):
            out["facts"] = [{**fact_to_json(f), "p": value_to_json(p)} for f, p in fam.entries]
        else:
            out["family"] = {**fam.law.to_json(), "template": fam.template.to_json()}
        return out
    if isinstance(pdb, BidPdb):
        return {"schema": schema_to_json(pdb.schema), "kind": "bid",
                "blocks": [[{**fact_to_json(f), "p": value_to_json(p)} for f, p in b] for b in pdb.blocks]}
    if isinstance(pdb, ExplicitPdb):
        return {"schema": schema_to_json(pdb.schema), "kind": "explicit",
                "worlds": [{"facts": instance_to_json(i), "p": value_to_json(p)} for i, p in pdb.worlds]}
    if isinstance(pdb, SizeLawPdb):
        return {"kind": "size_law", "a": str(pdb.a), "ratio": str(pdb.ratio),
                "size_base": pdb.size_base, "relation": pdb.relation}
    if isinstance(pdb, SquareDecayPdb):
        return {"kind": "square_decay", "base": pdb.base, "size_mult": pdb.size_mult,
                "relation": pdb.relation}
    raise TypeError(f"not a PDB: {pdb!r}")


def distribution_to_json(dist) -> dict:
    out = {"complete": dist.complete,
           "worlds": [{"facts": instance_to_json(i), "p": value_to_json(w)} for i, w in dist.items()]}
    if dist.normalizer != 1:
        out["normalizer"] = value_to_json(dist.normalizer)
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)
