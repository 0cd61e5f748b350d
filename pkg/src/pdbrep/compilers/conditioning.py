"""Eliminating a first-order condition from a finite TI representation.

The conditioned law is reproduced by k independent copies of the base plus
one flag fact: the view outputs the first copy that satisfies
psi = condition & !phi0 (phi0 characterises a fixed world I0), and falls
back to I0 when the flag is present or no copy satisfies psi.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import GuardExceeded, ModelError, NullEventError
from ..probspace.model import ExplicitFamily, TiPdb
from ..probspace.worlds import WORLD_GUARD, enumerate_worlds
from ..relmodel.atoms import BOT, CopyIdx, Fact, Instance, Schema, atom_key
from ..relmodel.evaluate import Query, View, apply_view, eval_formula
from ..relmodel.formula import (And, Const, Eq, FreshNames, Not, Rel, Var,
                                all_var_names, conj, constants, disj,
                                exists_many, relations, tuple_eq)
from ..relmodel.transform import (copy_names, relativize_to_copy,
                                  to_existential_form)
from .representation import Representation


@dataclass(frozen=True)
class ConditionEliminationReport:
    branch: str  # "tautology", "single_world" or "general"
    I0: Instance | None
    p_phi: Fraction
    p_0: Fraction | None = None
    p_psi: Fraction | None = None
    k: int | None = None
    p_rep: Fraction | None = None
    p_bot: Fraction | None = None
    base_facts: int = 0


def characterize(inst: Instance, schema: Schema):
    """Sentence true exactly on instances equal to inst (over the schema)."""
    parts = []
    for name, arity in schema.relations:
        tuples = sorted((f.args for f in inst if f.relation == name),
                        key=lambda a: Fact(name, a).sort_key())
        if arity == 0:
            parts.append(Rel(name, ()) if tuples else Not(Rel(name, ())))
            continue
        xs = [Var(f"x{j + 1}") for j in range(arity)]
        parts.extend(Rel(name, tuple(Const(a) for a in args)) for args in tuples)
        others = conj([Rel(name, tuple(xs)), *(Not(tuple_eq(xs, args)) for args in tuples)])
        parts.append(Not(exists_many([x.name for x in xs], others)))
    return conj(parts)


def _reserved_name(base: str, taken: set) -> str:
    name = base
    while name in taken:
        name += "_"
    taken.add(name)
    return name


def eliminate_condition(base: TiPdb, condition, guard: int = WORLD_GUARD,
                        view: View | None = None):
    """Unconditioned TI representation of view(base | condition), the view
    defaulting to the identity."""
    if not base.is_finite:
        raise ModelError("condition elimination needs a finite TI base")
    unknown = set(relations(condition)) - set(base.schema.names)
    if unknown:
        raise ModelError(f"condition mentions unknown relations {sorted(unknown)}")
    if any(not isinstance(p, Fraction) for _, p in base.family.facts()):
        raise ModelError("condition elimination needs rational marginals")
    dist = enumerate_worlds(base, None, guard)
    surviving = []
    p_phi = Fraction(0)
    for inst, w in dist.items():
        _, rows = eval_formula(condition, inst)
        if rows:
            surviving.append((inst, w))
            p_phi += w
    if p_phi == 0:
        raise NullEventError("the condition has probability zero")
    outer = View.identity(base.schema) if view is None else view
    if p_phi == 1:
        return Representation(base, None, outer), ConditionEliminationReport("tautology", None, p_phi)
    if len(surviving) == 1:
        (i0, _), = surviving
        point = TiPdb(base.schema, ExplicitFamily(tuple((f, Fraction(1)) for f in i0)))
        report = ConditionEliminationReport("single_world", i0, p_phi, Fraction(1))
        return Representation(point, None, outer), report

    # highest probability world, ties broken by canonical order
    i0, w0 = min(surviving, key=lambda iw: (-iw[1], iw[0].sort_key()))
    p0 = w0 / p_phi
    p_psi = p_phi - w0
    k = 1
    while (1 - p_psi) ** k >= p0:
        k += 1
    p_rep = 1 - (1 - p_psi) ** k
    p_bot = (p_rep - (1 - p0)) / p_rep

    facts = [(f, p) for f, p in base.family.facts() if p != 0]
    n_facts = k * len(facts) + 1
    uncertain = k * sum(1 for _, p in facts if p != 1) + 1
    if 2 ** uncertain > guard:
        raise GuardExceeded(f"copy budget of {n_facts} facts ({uncertain} uncertain) exceeds the guard")

    taken = set(base.schema.names)
    names = copy_names(base.schema.names, taken)
    taken |= set(names.values())
    flag = _reserved_name("Flag", taken)
    schema = Schema(tuple((names[n], a + 1) for n, a in base.schema.relations) + ((flag, 1),))
    entries = [(Fact(names[f.relation], (CopyIdx(i), *f.args)), p)
               for i in range(1, k + 1) for f, p in facts]
    entries.append((Fact(flag, (BOT,)), p_bot))
    new_base = TiPdb(schema, ExplicitFamily(tuple(entries)))

    # psi = condition & !phi0, relativized part by part so that each part
    # keeps the quantifier domain given by its own constants
    phi0 = characterize(i0, base.schema)
    parts = [to_existential_form(condition), to_existential_form(Not(phi0))]
    has_bot = BOT in constants(condition) or any(BOT in f.args for f, _ in facts)
    psis = [conj(relativize_to_copy(g, i, k, base.schema, names, allow_bot=has_bot) for g in parts)
            for i in range(1, k + 1)]
    flag_atom = Rel(flag, (Const(BOT),))
    none_psi = conj(Not(p) for p in psis)
    fallback = disj([flag_atom, none_psi])
    if view is None:
        queries = []
        for name, arity in base.schema.relations:
            xs = tuple(Var(f"x{j + 1}") for j in range(arity))
            branches = []
            i0_tuples = [f.args for f in i0 if f.relation == name]
            if i0_tuples:
                if arity == 0:
                    branches.append(fallback)
                else:
                    branches.append(And(fallback, disj(tuple_eq(xs, args) for args in i0_tuples)))
            for i in range(1, k + 1):
                branches.append(conj([
                    Not(flag_atom), psis[i - 1], *(Not(p) for p in psis[:i - 1]),
                    Rel(names[name], (Const(CopyIdx(i)), *xs)),
                ]))
            queries.append(Query(name, xs, disj(branches)))
    else:
        queries = [_copied_query(q, i0, base.schema, names, k, psis, flag_atom, fallback, has_bot)
                   for q in view.queries]
    report = ConditionEliminationReport("general", i0, p_phi, p0, p_psi, k, p_rep, p_bot, n_facts)
    return Representation(new_base, None, View(tuple(queries), schema)), report


def _copied_query(q: Query, i0: Instance, base_schema: Schema, names: dict, k: int,
                  psis: list, flag_atom, fallback, has_bot: bool) -> Query:
    """q over the copies: q(I0) in the fallback case, else q on the first
    copy satisfying psi."""
    head_vars = []
    for j, t in enumerate(q.head):
        if isinstance(t, Var) and t.name not in {v for _, v in head_vars}:
            head_vars.append((j, t.name))
    branches = []
    image = apply_view(View((q,), base_schema), i0)
    if image:
        rows = [conj(Eq(Var(v), Const(f.args[j])) for j, v in head_vars) for f in image]
        branches.append(fallback if not head_vars else And(fallback, disj(rows)))

    # head constants belong to the query's domain too
    f = q.formula
    for c in sorted(q.constants() - constants(f), key=atom_key):
        f = And(f, Eq(Const(c), Const(c)))
    f = to_existential_form(f)
    consts = sorted(constants(f), key=atom_key)
    allow_bot = has_bot or BOT in consts
    fresh = FreshNames(all_var_names(f) | {v for _, v in head_vars}, prefix="h")

    def in_copy(v, i):
        options = []
        for name, arity in base_schema.relations:
            for pos in range(arity):
                others = [fresh() for _ in range(arity - 1)]
                it = iter(others)
                terms = [Var(v) if p == pos else Var(next(it)) for p in range(arity)]
                options.append(exists_many(others, Rel(names[name], (Const(CopyIdx(i)), *terms))))
        options.extend(Eq(Var(v), Const(c)) for c in consts)
        return disj(options) or Not(Eq(Var(v), Var(v)))

    for i in range(1, k + 1):
        branches.append(conj([
            Not(flag_atom), psis[i - 1], *(Not(p) for p in psis[:i - 1]),
            relativize_to_copy(f, i, k, base_schema, names, allow_bot=allow_bot),
            *(in_copy(v, i) for _, v in head_vars),
        ]))
    return Query(q.name, q.head, disj(branches))


def eliminate_condition_rep(rep: Representation, guard: int = WORLD_GUARD):
    """Eliminate the condition of a representation, composing its view."""
    from .representation import _projection_atom, compose_views
    if rep.condition is None:
        return rep, None
    if all(_projection_atom(q, set(rep.base.schema.names)) is not None for q in rep.view.queries):
        # projections compose by plain substitution
        inner, report = eliminate_condition(rep.base, rep.condition, guard)
        view = compose_views(rep.view, inner.view, inner.base.schema)
        return Representation(inner.base, None, view), report
    return eliminate_condition(rep.base, rep.condition, guard, view=rep.view)


__all__ = ["ConditionEliminationReport", "characterize", "eliminate_condition",
           "eliminate_condition_rep"]
