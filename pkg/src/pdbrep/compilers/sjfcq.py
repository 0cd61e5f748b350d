"""Monotone query over a finite TI, rewritten as a self-join-free CQ view
over a new finite TI."""
from __future__ import annotations

import itertools
from fractions import Fraction

from ..errors import GuardExceeded, ModelError
from ..probspace.model import ExplicitFamily, TiPdb
from ..probspace.worlds import WORLD_GUARD
from ..relmodel.atoms import Fact, Instance, Schema
from ..relmodel.evaluate import Query, View, evaluate
from ..relmodel.formula import Rel, Var, conj, exists_many
from ..relmodel.fragments import Fragment, classify
from .representation import Representation


def monotone_to_sjfcq(base: TiPdb, query: Query, guard: int = WORLD_GUARD) -> Representation:
    """Representation of query(base) by one SjfCQ over a TI.

    With uncertain facts f_1..f_n the new base has S_i(0) (certain), S_i(1)
    (marginal p_i) and certain facts S(a, b) for b in Q(always facts plus the
    f_i with a_i = 1), for every a in {0,1}^n. The view is
    exists x: S_1(x_1) & ... & S_n(x_n) & S(x, y).
    """
    if not base.is_finite:
        raise ModelError("the base must be a finite TI")
    if classify(query.formula) > Fragment.UCQ:
        raise ModelError("the query must be a UCQ")
    entries = [(f, p) for f, p in base.family.facts() if p != 0]
    always = [f for f, p in entries if p == 1]
    uncertain = [(f, p) for f, p in entries if p != 1]
    n = len(uncertain)
    if 2 ** n > guard:
        raise GuardExceeded(f"2^{n} assignments exceed the guard")

    taken = {query.name}
    names = []
    for i in range(1, n + 1):
        name = f"S{i}"
        while name in taken:
            name += "_"
        taken.add(name)
        names.append(name)
    big = "S"
    while big in taken:
        big += "_"
    r = query.arity

    facts = []
    for name, (_, p) in zip(names, uncertain):
        facts.append((Fact(name, (0,)), Fraction(1)))
        facts.append((Fact(name, (1,)), p))
    for bits in itertools.product((0, 1), repeat=n):
        world = Instance(always + [f for (f, _), b in zip(uncertain, bits) if b])
        for out in evaluate(query, world):
            facts.append((Fact(big, (*bits, *out.args)), Fraction(1)))
    schema = Schema(tuple((name, 1) for name in names) + ((big, n + r),))
    new_base = TiPdb(schema, ExplicitFamily(tuple(facts)))

    xs = [f"x{i}" for i in range(1, n + 1)]
    ys = tuple(Var(f"y{j}") for j in range(1, r + 1))
    atoms = [Rel(name, (Var(x),)) for name, x in zip(names, xs)]
    atoms.append(Rel(big, (*map(Var, xs), *ys)))
    view = View((Query(query.name, ys, exists_many(xs, conj(atoms))),), schema)
    return Representation(new_base, None, view)
