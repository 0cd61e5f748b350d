"""Active-domain evaluation of formulas, queries and views.

Each subformula is evaluated to a table (variables, set of rows) over its
free variables. Conjunctions are evaluated as joins, with negated or equality
conjuncts applied as filters once their variables are bound, so the cost
tracks the data rather than |dom|^k.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..errors import SchemaError
from .atoms import Fact, Instance, Schema, atom_key
from .formula import (And, Const, Eq, Exists, Forall, Formula, Not, Or, Rel,
                      Var, constants, format_formula, format_term,
                      free_vars)


def active_domain(inst: Instance, *formulas) -> set:
    dom = inst.adom()
    for f in formulas:
        dom |= constants(f)
    return dom


class _Ctx:
    __slots__ = ("db", "dom", "dom_list", "free", "memo")

    def __init__(self, db, dom):
        self.db = db
        self.dom = dom
        self.dom_list = sorted(dom, key=atom_key)
        self.free = {}
        self.memo = {}

    def fv(self, f):
        return free_vars(f)


def _product(ctx, k):
    return set(itertools.product(ctx.dom_list, repeat=k))


def _pad(ctx, vars_, rows, target):
    """Extend a table to the variable tuple `target` with all domain values."""
    missing = [v for v in target if v not in vars_]
    if not missing:
        if tuple(vars_) == tuple(target):
            return rows
        pos = [vars_.index(v) for v in target]
        return {tuple(r[p] for p in pos) for r in rows}
    ext_vars = tuple(vars_) + tuple(missing)
    ext = set()
    fill = list(itertools.product(ctx.dom_list, repeat=len(missing)))
    for r in rows:
        for extra in fill:
            ext.add(r + extra)
    pos = [ext_vars.index(v) for v in target]
    return {tuple(r[p] for p in pos) for r in ext}


def _join(av, arows, bv, brows):
    shared = [v for v in bv if v in av]
    extra = [i for i, v in enumerate(bv) if v not in av]
    out_vars = tuple(av) + tuple(bv[i] for i in extra)
    if not arows or not brows:
        return out_vars, set()
    if not shared:
        out = {a + tuple(b[i] for i in extra) for a in arows for b in brows}
        return out_vars, out
    apos = [av.index(v) for v in shared]
    bpos = [bv.index(v) for v in shared]
    index = {}
    for b in brows:
        index.setdefault(tuple(b[p] for p in bpos), []).append(tuple(b[i] for i in extra))
    out = set()
    for a in arows:
        hits = index.get(tuple(a[p] for p in apos))
        if hits:
            for h in hits:
                out.add(a + h)
    return out_vars, out


def _eval(f, ctx):
    """Return (vars tuple, set of rows) for formula f."""
    t = type(f)
    if t is Rel:
        return _eval_rel(f, ctx)
    if t is Eq:
        return _eval_eq(f, ctx)
    # closed subformulas are shared between branches; evaluate each once
    closed = not ctx.fv(f)
    if closed:
        hit = ctx.memo.get(id(f))
        if hit is not None:
            return hit[1]
    res = _eval_compound(f, t, ctx)
    if closed:
        ctx.memo[id(f)] = (f, res)
    return res


def _eval_compound(f, t, ctx):
    if t is Not:
        vars_, rows = _eval(f.sub, ctx)
        if not vars_:
            return (), (set() if rows else {()})
        return vars_, _product(ctx, len(vars_)) - rows
    if t is And:
        return _eval_and(f, ctx)
    if t is Or:
        lv, lrows = _eval(f.left, ctx)
        rv, rrows = _eval(f.right, ctx)
        out_vars = tuple(lv) + tuple(v for v in rv if v not in lv)
        return out_vars, _pad(ctx, lv, lrows, out_vars) | _pad(ctx, rv, rrows, out_vars)
    if t is Exists:
        vars_, rows = _eval(f.body, ctx)
        if f.var in vars_:
            i = vars_.index(f.var)
            return vars_[:i] + vars_[i + 1:], {r[:i] + r[i + 1:] for r in rows}
        if not ctx.dom:
            return vars_, set()
        return vars_, rows
    if t is Forall:
        return _eval(Not(Exists(f.var, Not(f.body))), ctx)
    raise TypeError(f"not a formula: {f!r}")


def _rel_plan(f):
    hit = _REL_PLANS.get(id(f))
    if hit is not None:
        return hit[1]
    out_vars = []
    pos_of = {}
    checks = []  # (position, kind, value)
    for i, term in enumerate(f.terms):
        if isinstance(term, Const):
            checks.append((i, 0, term.value))
        elif term.name in pos_of:
            checks.append((i, 1, pos_of[term.name]))
        else:
            pos_of[term.name] = i
            out_vars.append(term.name)
    plan = (tuple(out_vars), tuple(checks), tuple(pos_of[v] for v in out_vars))
    if len(_REL_PLANS) > 200_000:
        _REL_PLANS.clear()
    _REL_PLANS[id(f)] = (f, plan)
    return plan


def _eval_rel(f, ctx):
    out_vars, checks, proj = _rel_plan(f)
    arity = len(f.terms)
    rows = set()
    for tup in ctx.db.get(f.name, ()):
        if len(tup) != arity:
            continue
        ok = True
        for i, kind, val in checks:
            if kind == 0:
                if tup[i] != val or type(tup[i]) is not type(val):
                    ok = False
                    break
            elif tup[i] != tup[val]:
                ok = False
                break
        if ok:
            rows.add(tuple(tup[p] for p in proj))
    return out_vars, rows


def _same(a, b):
    return a == b and type(a) is type(b)


def _eval_eq(f, ctx):
    l, r = f.left, f.right
    if isinstance(l, Var) and isinstance(r, Var):
        if l.name == r.name:
            return (l.name,), {(a,) for a in ctx.dom_list}
        return (l.name, r.name), {(a, a) for a in ctx.dom_list}
    if isinstance(l, Var):
        return (l.name,), {(r.value,)}
    if isinstance(r, Var):
        return (r.name,), {(l.value,)}
    return (), ({()} if _same(l.value, r.value) else set())


_AND_PLANS: dict = {}
_REL_PLANS: dict = {}


def _and_plan(f):
    """Flattened conjuncts of f with their free variables, cached by node."""
    hit = _AND_PLANS.get(id(f))
    if hit is not None:
        return hit[1]
    parts = []
    stack = [f]
    while stack:
        g = stack.pop()
        if type(g) is And:
            stack.append(g.right)
            stack.append(g.left)
        else:
            parts.append(g)
    fvs = [free_vars(g) for g in parts]
    all_vars = frozenset().union(*fvs)
    plan = (parts, fvs, all_vars, tuple(sorted(all_vars)))
    if len(_AND_PLANS) > 200_000:
        _AND_PLANS.clear()
    _AND_PLANS[id(f)] = (f, plan)
    return plan


def _eval_and(f, ctx):
    parts, fvs, all_vars, sorted_vars = _and_plan(f)
    # closed conjuncts first: a false one short-circuits everything
    pending = []
    for g, gf in zip(parts, fvs):
        if not gf:
            _, rows = _eval(g, ctx)
            if not rows:
                return sorted_vars, set()
        else:
            pending.append((g, gf))
    vars_: tuple = ()
    rows = {()}
    while pending:
        bound = set(vars_)
        pick = None
        # 1. filters whose variables are all bound
        for i, (g, gf) in enumerate(pending):
            if gf <= bound and type(g) in (Not, Eq):
                pick = i
                break
        if pick is not None:
            g = pending.pop(pick)[0]
            rows = _filter(g, vars_, rows, ctx)
            if not rows:
                break
            continue
        # 2. positive conjuncts, preferring those that share variables
        best = None
        for i, (g, gf) in enumerate(pending):
            if type(g) is Not:
                continue
            if type(g) is Eq and isinstance(g.left, Var) and isinstance(g.right, Var) \
                    and not gf & bound:
                continue  # x = y with both unbound: defer
            score = 1 if gf & bound else 0
            if best is None or score > best[0]:
                best = (score, i)
                if score:
                    break
        if best is None:
            # only negations or unbound x = y remain
            g = pending.pop(0)[0]
        else:
            g = pending.pop(best[1])[0]
        gv, grows = _eval(g, ctx)
        vars_, rows = _join(vars_, rows, gv, grows)
        if not rows:
            break
    if len(vars_) != len(all_vars):
        # early exit on empty result
        return sorted_vars, set()
    return vars_, rows


def _filter(g, vars_, rows, ctx):
    if type(g) is Eq:
        l, r = g.left, g.right

        def val(x, row):
            return row[vars_.index(x.name)] if isinstance(x, Var) else x.value
        return {row for row in rows if _same(val(l, row), val(r, row))}
    # negation: antijoin
    sv, srows = _eval(g.sub, ctx)
    if not sv:
        return set() if srows else rows
    pos = [vars_.index(v) for v in sv]
    return {row for row in rows if tuple(row[p] for p in pos) not in srows}


def eval_formula(f: Formula, inst: Instance, dom=None, index=None):
    """Evaluate f on inst; returns (vars, rows) over the free variables of f."""
    if dom is None:
        dom = active_domain(inst, f)
    ctx = _Ctx(index if index is not None else inst.index(), dom)
    return _eval(f, ctx)


def holds(f: Formula, inst: Instance) -> bool:
    """Truth value of a sentence."""
    if free_vars(f):
        raise ValueError(f"formula has free variables: {sorted(free_vars(f))}")
    _, rows = eval_formula(f, inst)
    return bool(rows)


@dataclass(frozen=True)
class Query:
    """Output relation `name` defined by `formula` with head terms `head`."""

    name: str
    head: tuple
    formula: Formula

    def __post_init__(self):
        if not isinstance(self.head, tuple):
            object.__setattr__(self, "head", tuple(self.head))
        head_vars = {t.name for t in self.head if isinstance(t, Var)}
        missing = free_vars(self.formula) - head_vars
        if missing:
            raise SchemaError(f"query {self.name}: free variables {sorted(missing)} not in head")

    @property
    def arity(self) -> int:
        return len(self.head)

    def constants(self) -> set:
        return constants(self.formula) | {t.value for t in self.head if isinstance(t, Const)}

    def __str__(self):
        return f"{self.name}({', '.join(format_term(t) for t in self.head)}) := {format_formula(self.formula)}"


def _head_rows(q: Query, vars_, rows, ctx):
    head_vars = []
    for t in q.head:
        if isinstance(t, Var) and t.name not in head_vars:
            head_vars.append(t.name)
    table = _pad(ctx, vars_, rows, tuple(head_vars))
    out = set()
    for r in table:
        env = dict(zip(head_vars, r))
        out.add(tuple(env[t.name] if isinstance(t, Var) else t.value for t in q.head))
    return out


def evaluate(q: Query, inst: Instance) -> Instance:
    dom = active_domain(inst, q.formula) | {t.value for t in q.head if isinstance(t, Const)}
    ctx = _Ctx(inst.index(), dom)
    vars_, rows = _eval(q.formula, ctx)
    return Instance(Fact(q.name, args) for args in _head_rows(q, vars_, rows, ctx))


@dataclass(frozen=True)
class View:
    """Tuple of queries with distinct output names."""

    queries: tuple
    input_schema: Schema | None = field(default=None, compare=False)

    def __post_init__(self):
        if not isinstance(self.queries, tuple):
            object.__setattr__(self, "queries", tuple(self.queries))
        names = [q.name for q in self.queries]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate output relation in view")

    @property
    def output_schema(self) -> Schema:
        return Schema(tuple((q.name, q.arity) for q in self.queries))

    def query(self, name: str) -> Query:
        for q in self.queries:
            if q.name == name:
                return q
        raise SchemaError(f"view has no output relation {name}")

    def constants(self) -> set:
        out = set()
        for q in self.queries:
            out |= q.constants()
        return out

    @classmethod
    def identity(cls, schema: Schema) -> "View":
        qs = []
        for name, arity in schema.relations:
            head = tuple(Var(f"x{i + 1}") for i in range(arity))
            qs.append(Query(name, head, Rel(name, head)))
        return cls(tuple(qs), schema)


def apply_view(view: View, inst: Instance) -> Instance:
    """Image of an instance: union of all query outputs."""
    index = inst.index()
    base_dom = inst.adom()
    facts = []
    # closed subformulas shared between queries are evaluated once per call
    memos: dict = {}
    free: dict = {}
    for q in view.queries:
        dom = base_dom | q.constants()
        ctx = _Ctx(index, dom)
        ctx.memo = memos.setdefault(frozenset(dom), {})
        ctx.free = free
        vars_, rows = _eval(q.formula, ctx)
        facts.extend(Fact(q.name, args) for args in _head_rows(q, vars_, rows, ctx))
    return Instance(facts)


def query_from_text(name: str, head, body: str) -> Query:
    from .parser import parse_formula, parse_term
    terms = tuple(parse_term(h) if isinstance(h, str) else Const(h) for h in head)
    return Query(name, terms, parse_formula(body))



def view_size_bound(view: View, input_size: int) -> int:
    """m * (r_max * n + |adom(view)|)^r: an upper bound on |apply_view(V, D)|
    for every D with n facts, where r_max is the input arity bound."""
    m = len(view.queries)
    r = max((q.arity for q in view.queries), default=0)
    if view.input_schema is not None:
        r_max = view.input_schema.max_arity
    else:
        r_max = max((len(g.terms) for q in view.queries for g in _atoms(q.formula)), default=0)
    return m * (r_max * input_size + len(view.constants())) ** r


def _atoms(f):
    from .formula import subformulas
    return [g for g in subformulas(f) if type(g) is Rel]
