"""Syntactic transformations: existential form, copy relativization,
renaming and relation substitution."""
from __future__ import annotations

from ..errors import SchemaError
from .atoms import BOT, CopyIdx, Schema, atom_key, is_reserved
from .formula import (And, Const, Eq, Exists, Forall, Formula, FreshNames,
                      Not, Or, Rel, Var, all_var_names, conj, constants, disj,
                      free_vars, neq)


def to_existential_form(f: Formula) -> Formula:
    """Equivalent formula using only atoms, negation, conjunction and exists."""
    t = type(f)
    if t is Rel or t is Eq:
        return f
    if t is Not:
        sub = to_existential_form(f.sub)
        return sub.sub if type(sub) is Not else Not(sub)
    if t is And:
        return And(to_existential_form(f.left), to_existential_form(f.right))
    if t is Or:
        return _neg(And(_neg(to_existential_form(f.left)), _neg(to_existential_form(f.right))))
    if t is Exists:
        return Exists(f.var, to_existential_form(f.body))
    if t is Forall:
        return _neg(Exists(f.var, _neg(to_existential_form(f.body))))
    raise TypeError(f"not a formula: {f!r}")


def _neg(f):
    return f.sub if type(f) is Not else Not(f)


def is_existential_form(f: Formula) -> bool:
    from .formula import subformulas
    return all(type(g) in (Rel, Eq, Not, And, Exists) for g in subformulas(f))


def copy_names(schema_names, reserved=()) -> dict:
    """R -> R' (extra primes added on collision)."""
    taken = set(schema_names) | set(reserved)
    out = {}
    for name in schema_names:
        cand = name + "'"
        while cand in taken:
            cand += "'"
        taken.add(cand)
        out[name] = cand
    return out


def relativize_to_copy(f: Formula, i: int, k: int, schema: Schema | None = None,
                       names: dict | None = None, allow_bot: bool = False) -> Formula:
    """Rewrite f so that it speaks about copy i of a k-fold copied database.

    Each atom R(u) becomes R'(i, u); equalities between variables and negated
    subformulas are guarded so that variables cannot take the copy indices or
    the bottom marker. Quantifiers are additionally restricted to the active
    domain of copy i together with the constants of f, which makes the result
    exactly equivalent under active-domain semantics.

    With allow_bot the bottom marker may occur in f and in the data, so it is
    not excluded from variable ranges.
    """
    if not 1 <= i <= k:
        raise ValueError(f"copy index {i} outside 1..{k}")
    if not is_existential_form(f):
        raise ValueError("relativization needs a formula in existential form")
    consts = constants(f)
    if any(is_reserved(c) and not (allow_bot and c == BOT) for c in consts):
        raise SchemaError("formula already mentions reserved atoms")
    if schema is None:
        from .formula import relations
        schema = Schema(tuple(sorted(relations(f).items())))
    if names is None:
        names = copy_names(schema.names)
    reserved = [] if allow_bot else [Const(BOT)]
    reserved += [Const(CopyIdx(j)) for j in range(1, k + 1)]
    idx = Const(CopyIdx(i))
    fresh = FreshNames(all_var_names(f), prefix="w")
    const_list = sorted(consts, key=atom_key)

    def guards(var_names):
        parts = []
        for v in sorted(var_names):
            parts.extend(neq(Var(v), c) for c in reserved)
        return parts

    def domain(v):
        options = []
        for name, arity in schema.relations:
            for pos in range(arity):
                others = [fresh() for _ in range(arity - 1)]
                it = iter(others)
                terms = [Var(v) if p == pos else Var(next(it)) for p in range(arity)]
                atom = Rel(names[name], (idx, *terms))
                for o in reversed(others):
                    atom = Exists(o, atom)
                options.append(atom)
        options.extend(Eq(Var(v), Const(c)) for c in const_list)
        return disj(options)

    def rec(g):
        t = type(g)
        if t is Rel:
            if g.name not in names:
                raise SchemaError(f"unknown relation {g.name}")
            return Rel(names[g.name], (idx, *g.terms))
        if t is Eq:
            if isinstance(g.left, Var) and isinstance(g.right, Var):
                return conj([g, *guards([g.left.name])])
            return g
        if t is Not:
            return conj([Not(rec(g.sub)), *guards(free_vars(g.sub))])
        if t is And:
            return And(rec(g.left), rec(g.right))
        if t is Exists:
            dom = domain(g.var)
            body = rec(g.body)
            return Exists(g.var, body if dom is None else And(dom, body))
        raise TypeError(f"unexpected node {g!r}")

    return rec(f)


def rename_free(f: Formula, mapping: dict) -> Formula:
    """Substitute terms for free variables (mapping: var name -> Var|Const).

    Bound variables are renamed when they would capture a substituted variable.
    """
    avoid = set()
    for t in mapping.values():
        if isinstance(t, Var):
            avoid.add(t.name)
    fresh = FreshNames(all_var_names(f) | avoid | set(mapping), prefix="b")

    def sub_term(x, env):
        if isinstance(x, Var) and x.name in env:
            return env[x.name]
        return x

    def rec(g, env):
        t = type(g)
        if t is Rel:
            return Rel(g.name, tuple(sub_term(x, env) for x in g.terms))
        if t is Eq:
            return Eq(sub_term(g.left, env), sub_term(g.right, env))
        if t is Not:
            return Not(rec(g.sub, env))
        if t is And or t is Or:
            return t(rec(g.left, env), rec(g.right, env))
        if t is Exists or t is Forall:
            env2 = dict(env)
            var = g.var
            if var in avoid:
                new = fresh(var)
                env2[var] = Var(new)
                var = new
            else:
                env2.pop(var, None)
            return t(var, rec(g.body, env2))
        raise TypeError(f"not a formula: {g!r}")

    return rec(f, dict(mapping))


def substitute_relations(f: Formula, defs: dict) -> Formula:
    """Replace each atom R(t) with the query defining R, instantiated at t.

    defs maps a relation name to a Query whose head may contain constants or
    repeated variables; these become equalities.
    """
    def inst(q, terms):
        body = q.formula
        mapping = {}
        extra = []
        for h, t in zip(q.head, terms):
            if isinstance(h, Var) and h.name not in mapping:
                mapping[h.name] = t
            elif isinstance(h, Var):
                extra.append(Eq(mapping[h.name], t))
            else:
                extra.append(Eq(h, t))
        body = rename_free(body, mapping)
        return conj([body, *extra])

    def rec(g):
        t = type(g)
        if t is Rel:
            if g.name in defs:
                q = defs[g.name]
                if len(q.head) != len(g.terms):
                    raise SchemaError(f"arity mismatch substituting {g.name}")
                return inst(q, g.terms)
            return g
        if t is Eq:
            return g
        if t is Not:
            return Not(rec(g.sub))
        if t is And or t is Or:
            return t(rec(g.left), rec(g.right))
        if t is Exists or t is Forall:
            return t(g.var, rec(g.body))
        raise TypeError(f"not a formula: {g!r}")

    return rec(f)
