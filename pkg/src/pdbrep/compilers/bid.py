"""BID to conditioned TI, and on to plain TI by eliminating the condition."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import ModelError
from ..probspace.model import BidPdb, ExplicitFamily, TiPdb
from ..relmodel.atoms import Fact, Schema
from ..relmodel.evaluate import Query, View
from ..relmodel.formula import (Const, Exists, Not, Rel, Var, conj, disj,
                                exists_many, tuple_eq)
from ..relmodel.transform import copy_names
from .representation import Representation, compose_views


@dataclass(frozen=True)
class BidBlockReport:
    residual: Fraction
    q: tuple  # of (Fact, Fraction)


@dataclass(frozen=True)
class BidCompilationReport:
    blocks: tuple  # of BidBlockReport
    smallest_positive_residual: Fraction | None
    tagged_names: dict


def bid_q(p: Fraction, residual: Fraction) -> Fraction:
    return p / (1 + p) if residual == 0 else p / (residual + p)


def compile_bid(bid: BidPdb):
    """Conditioned TI representation of a finite BID.

    Each fact R(a) of block i becomes R'(a, i) with marginal q; the condition
    keeps worlds with at most one fact per block and exactly one fact in
    every block whose residual is zero; the view drops the block column.
    """
    if not bid.blocks:
        raise ModelError("compile_bid needs at least one block")
    names = copy_names(bid.schema.names)
    tagged_schema = Schema(tuple((names[n], a + 1) for n, a in bid.schema.relations))
    entries = []
    reports = []
    for i, block in enumerate(bid.blocks, start=1):
        r = bid.residual(i - 1)
        qs = []
        for f, p in block:
            q = bid_q(p, r)
            qs.append((f, q))
            if q:
                entries.append((Fact(names[f.relation], (*f.args, i)), q))
        reports.append(BidBlockReport(r, tuple(qs)))
    base = TiPdb(tagged_schema, ExplicitFamily(tuple(entries)))

    used = sorted({f.relation for block in bid.blocks for f, _ in block})
    arity = dict(bid.schema.relations)
    parts = []
    # at most one fact per block
    for ai, r1 in enumerate(used):
        for r2 in used[ai:]:
            a1, a2 = arity[r1], arity[r2]
            if r1 == r2 and a1 == 0:
                continue
            xs = [f"x{j + 1}" for j in range(a1)]
            ys = [f"y{j + 1}" for j in range(a2)]
            body = conj([
                Rel(names[r1], (*map(Var, xs), Var("b"))),
                Rel(names[r2], (*map(Var, ys), Var("b"))),
                *([Not(tuple_eq(map(Var, xs), map(Var, ys)))] if r1 == r2 else []),
            ])
            parts.append(Not(Exists("b", exists_many(xs + ys, body))))
    # exactly one fact in zero-residual blocks
    for i, block in enumerate(bid.blocks, start=1):
        if bid.residual(i - 1) == 0:
            options = []
            for rname in sorted({f.relation for f, _ in block}):
                xs = [f"x{j + 1}" for j in range(arity[rname])]
                options.append(exists_many(xs, Rel(names[rname], (*map(Var, xs), Const(i)))))
            parts.append(disj(options))
    condition = conj(parts)

    queries = []
    for name, a in bid.schema.relations:
        xs = tuple(Var(f"x{j + 1}") for j in range(a))
        queries.append(Query(name, xs, Exists("b", Rel(names[name], (*xs, Var("b"))))))
    view = View(tuple(queries), tagged_schema)

    positive = [r for r in bid.residuals if r > 0]
    report = BidCompilationReport(tuple(reports), min(positive) if positive else None, names)
    return Representation(base, condition, view), report


def compile_bid_to_ti(bid: BidPdb, guard: int | None = None):
    """Plain TI representation: compile_bid, then eliminate_condition, with
    the two views composed by substitution."""
    from .conditioning import eliminate_condition
    crep, bid_report = compile_bid(bid)
    kwargs = {} if guard is None else {"guard": guard}
    if crep.condition is None:
        return crep, bid_report, None
    inner, elim_report = eliminate_condition(crep.base, crep.condition, **kwargs)
    if inner.condition is not None:
        raise AssertionError("condition elimination left a condition")
    view = compose_views(crep.view, inner.view, inner.base.schema)
    return Representation(inner.base, None, view), bid_report, elim_report
