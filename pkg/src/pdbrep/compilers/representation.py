"""Representations (TI base + optional condition + view), their semantics,
verification against a source law, and view composition."""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import SchemaError
from ..probspace.model import TiPdb
from ..probspace.worlds import (WORLD_GUARD, Distribution,
                                conditioned_worlds, distributions_equal,
                                enumerate_worlds, pushforward)
from ..relmodel.atoms import Schema, atom_key
from ..relmodel.evaluate import Query, View
from ..relmodel.formula import (And, Const, Eq, Exists, Forall, FreshNames,
                                Not, Or, Rel, Var, all_var_names, conj, disj,
                                free_vars, subformulas)
from ..relmodel.transform import substitute_relations


@dataclass(frozen=True)
class Representation:
    base: TiPdb
    condition: object  # sentence Formula or None
    view: View

    def __post_init__(self):
        if self.condition is not None and free_vars(self.condition):
            raise SchemaError("the condition must be a sentence")


def representation_law(rep: Representation, trunc: int | None = None,
                       guard: int = WORLD_GUARD) -> Distribution:
    if rep.condition is not None:
        dist = conditioned_worlds(rep.base, rep.condition, trunc, guard)
    else:
        dist = enumerate_worlds(rep.base, trunc, guard)
    return pushforward(dist, rep.view)


def source_law(source, trunc: int | None = None, guard: int = WORLD_GUARD) -> Distribution:
    if isinstance(source, Distribution):
        return source
    if isinstance(source, Representation):
        return representation_law(source, trunc, guard)
    return enumerate_worlds(source, trunc, guard)


def verify_representation(source, rep: Representation, trunc: int | None = None,
                          guard: int = WORLD_GUARD):
    """Compare the law of rep with the source (a Distribution or a PDB)."""
    return distributions_equal(representation_law(rep, None, guard), source_law(source, trunc, guard))


# view composition

def _projection_atom(q: Query, inner_names):
    """The single inner atom if q is exists-projection of one atom with no
    constants and every variable occurring in the atom."""
    f = q.formula
    bound = []
    while isinstance(f, Exists):
        bound.append(f.var)
        f = f.body
    if not isinstance(f, Rel) or f.name not in inner_names:
        return None
    if any(isinstance(t, Const) for t in f.terms) or any(isinstance(t, Const) for t in q.head):
        return None
    atom_vars = {t.name for t in f.terms}
    if not set(bound) <= atom_vars:
        return None
    if not {t.name for t in q.head} <= atom_vars:
        return None
    return f


def _domain_formula(var: str, schema: Schema, consts, fresh) -> object:
    """x occurs in some fact of the schema, or equals one of consts."""
    options = []
    for name, arity in schema.relations:
        for pos in range(arity):
            others = [fresh() for _ in range(arity - 1)]
            it = iter(others)
            terms = tuple(Var(var) if p == pos else Var(next(it)) for p in range(arity))
            atom = Rel(name, terms)
            for o in reversed(others):
                atom = Exists(o, atom)
            options.append(atom)
    options.extend(Eq(Var(var), Const(c)) for c in sorted(consts, key=atom_key))
    return disj(options)


def _relativize_quantifiers(f, dom_of):
    t = type(f)
    if t is Rel or t is Eq:
        return f
    if t is Not:
        return Not(_relativize_quantifiers(f.sub, dom_of))
    if t is And or t is Or:
        return t(_relativize_quantifiers(f.left, dom_of), _relativize_quantifiers(f.right, dom_of))
    body = _relativize_quantifiers(f.body, dom_of)
    d = dom_of(f.var)
    if d is None:
        # empty range: exists is false, forall is true
        x = Var(f.var)
        if t is Exists:
            return Exists(f.var, And(Not(Eq(x, x)), body))
        return Forall(f.var, Or(Eq(x, x), body))
    if t is Exists:
        return Exists(f.var, And(d, body))
    return Forall(f.var, Or(Not(d), body))


def compose_views(outer: View, inner: View, inner_schema: Schema) -> View:
    """View equivalent to applying inner, then outer.

    Queries of the form "exists y: R(x, y)" over an inner relation are
    composed by plain substitution. Other queries are composed with domain
    guards so that quantifiers of the outer query range over the image of
    the inner view and the inner queries keep their own active domains.
    """
    inner_defs = {q.name: q for q in inner.queries}
    inner_consts = set()
    for q in inner.queries:
        inner_consts |= q.constants()
    queries = []
    for q in outer.queries:
        atom = _projection_atom(q, inner_defs)
        if atom is not None:
            queries.append(Query(q.name, q.head, substitute_relations(q.formula, inner_defs)))
            continue
        queries.append(_guarded_compose(q, inner_defs, inner_consts, inner_schema))
    return View(tuple(queries), inner_schema)


def _guarded_compose(q: Query, inner_defs: dict, inner_consts: set, inner_schema: Schema) -> Query:
    taken = set(all_var_names(q.formula)) | {t.name for t in q.head if isinstance(t, Var)}
    for d in inner_defs.values():
        taken |= all_var_names(d.formula) | {t.name for t in d.head if isinstance(t, Var)}
    fresh = FreshNames(taken, prefix="g")
    total_consts = q.constants() | inner_consts

    def guarded_def(d: Query) -> Query:
        own = d.constants()
        if total_consts <= own:
            return d

        def dom_of(v):
            return _domain_formula(v, inner_schema, own, fresh)
        body = _relativize_quantifiers(d.formula, dom_of)
        head_vars = []
        for t in d.head:
            if isinstance(t, Var) and t.name not in head_vars:
                head_vars.append(t.name)
        guards = [dom_of(v) for v in head_vars]
        guards = [g if g is not None else Not(Eq(Var(v), Var(v))) for g, v in zip(guards, head_vars)]
        return Query(d.name, d.head, conj([body, *guards]))

    defs = {name: guarded_def(d) for name, d in inner_defs.items()}

    def image(v):
        """v lies in the active domain of the inner image, or is a constant of q."""
        options = []
        for d in defs.values():
            for pos in range(d.arity):
                others = [fresh() for _ in range(d.arity - 1)]
                it = iter(others)
                terms = tuple(Var(v) if p == pos else Var(next(it)) for p in range(d.arity))
                atom = substitute_relations(Rel(d.name, terms), defs)
                for o in reversed(others):
                    atom = Exists(o, atom)
                options.append(atom)
        options.extend(Eq(Var(v), Const(c)) for c in sorted(q.constants(), key=atom_key))
        return disj(options)

    # quantifiers are first guarded by a placeholder relation, so that the
    # inner substitution cannot touch the (already input-level) guards
    placeholder = "Img?"
    body = _relativize_quantifiers(q.formula, lambda v: Rel(placeholder, (Var(v),)))
    body = substitute_relations(body, defs)
    z = fresh()
    img = image(z)
    img_def = Query(placeholder, (Var(z),), img if img is not None else Not(Eq(Var(z), Var(z))))
    body = substitute_relations(body, {placeholder: img_def})
    head_vars = []
    for t in q.head:
        if isinstance(t, Var) and t.name not in head_vars:
            head_vars.append(t.name)
    guards = []
    for v in head_vars:
        g = image(v)
        guards.append(g if g is not None else Not(Eq(Var(v), Var(v))))
    return Query(q.name, q.head, conj([body, *guards]))


def rename_view_relations(view: View, mapping: dict) -> View:
    """Rename input relations used by the view's formulas."""
    def rec(f):
        t = type(f)
        if t is Rel:
            return Rel(mapping.get(f.name, f.name), f.terms)
        if t is Eq:
            return f
        if t is Not:
            return Not(rec(f.sub))
        if t is And or t is Or:
            return t(rec(f.left), rec(f.right))
        return t(f.var, rec(f.body))
    return View(tuple(Query(q.name, q.head, rec(q.formula)) for q in view.queries), view.input_schema)


def view_relations(view: View) -> set:
    return {g.name for q in view.queries for g in subformulas(q.formula) if isinstance(g, Rel)}

