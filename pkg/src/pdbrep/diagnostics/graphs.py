"""Edge-independent undirected graphs as TI, UCQ and CQ representations."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import ModelError
from ..probspace.model import (ExplicitFamily, Geometric, InversePolynomial,
                               ParametricFamily, Template, TiPdb, as_prob)
from ..probspace.radicals import PowProb
from ..relmodel.atoms import Fact, Schema, atom_key
from ..relmodel.evaluate import Query, View
from ..relmodel.formula import And, Or, Rel, Var


@dataclass(frozen=True)
class EdgeGraphSpec:
    """Edge marginals over unordered pairs {a, b}, a != b: either explicit
    ((a, b), p) entries with a < b, or a cataloged law on the disjoint pairs
    (2i-1, 2i)."""

    edges: tuple = ()
    law: object = None
    relation: str = "E"

    @classmethod
    def from_map(cls, marginals: dict, relation: str = "E") -> "EdgeGraphSpec":
        merged = {}
        for (a, b), p in marginals.items():
            if a == b:
                raise ModelError(f"self-loop ({a}, {b}) in an undirected simple graph")
            p = as_prob(p)
            key = tuple(sorted((a, b), key=atom_key))
            if key in merged and merged[key] != p:
                raise ModelError(f"asymmetric marginals for {{{a}, {b}}}")
            merged[key] = p
        edges = tuple(sorted(merged.items(), key=lambda kv: tuple(map(atom_key, kv[0]))))
        return cls(edges, None, relation)

    @classmethod
    def disjoint_pairs(cls, law, relation: str = "E") -> "EdgeGraphSpec":
        if not isinstance(law, (Geometric, InversePolynomial)):
            raise ModelError("the pair law must be a cataloged summable family")
        return cls((), law, relation)


def edge_graph_ti(spec: EdgeGraphSpec) -> TiPdb:
    """TI over E(a, b) with a < b."""
    schema = Schema(((spec.relation, 2),))
    if spec.law is not None:
        return TiPdb(schema, ParametricFamily(spec.law, Template("pair", spec.relation)))
    return TiPdb(schema, ExplicitFamily(tuple((Fact(spec.relation, ab), p) for ab, p in spec.edges)))


def _sym_view(name: str, connective) -> View:
    x, y = Var("x"), Var("y")
    body = connective(Rel(name, (x, y)), Rel(name, (y, x)))
    return View((Query(name, (x, y), body),), Schema(((name, 2),)))


def edge_graph_ucq_rep(spec: EdgeGraphSpec):
    """E(x, y) | E(y, x) over the a < b orientation."""
    from ..compilers.representation import Representation
    return Representation(edge_graph_ti(spec), None, _sym_view(spec.relation, Or))


def _rational_sqrt(p: Fraction):
    from sympy import integer_nthroot
    n, exact_n = integer_nthroot(p.numerator, 2)
    d, exact_d = integer_nthroot(p.denominator, 2)
    return Fraction(int(n), int(d)) if exact_n and exact_d else None


def edge_graph_cq_rep(spec: EdgeGraphSpec, roots: dict | None = None):
    """E(x, y) & E(y, x) over both orientations, each with marginal q where
    the target marginal is q^2. roots may supply q per unordered pair."""
    from ..compilers.representation import Representation
    if spec.law is not None:
        raise ModelError("the CQ construction takes an explicit edge map")
    roots = {tuple(sorted(k, key=atom_key)): as_prob(v) for k, v in (roots or {}).items()}
    entries = []
    for (a, b), p in spec.edges:
        q = roots.get((a, b))
        if q is None:
            q = None if isinstance(p, PowProb) else _rational_sqrt(p)
        if q is None or q * q != p:
            raise ModelError(f"marginal {p} of {{{a}, {b}}} is not a rational square")
        entries.append((Fact(spec.relation, (a, b)), q))
        entries.append((Fact(spec.relation, (b, a)), q))
    base = TiPdb(Schema(((spec.relation, 2),)), ExplicitFamily(tuple(entries)))
    return Representation(base, None, _sym_view(spec.relation, And))
