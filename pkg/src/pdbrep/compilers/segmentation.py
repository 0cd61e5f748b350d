"""Segment encoding of an explicit PDB into a conditioned TI, and the
checker for the size/probability series that makes the encoding summable."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import ModelError
from ..probspace.model import (ExplicitFamily, ExplicitPdb, Geometric,
                               InversePolynomial, ParametricFamily,
                               SizeLawPdb, SquareDecayPdb, TiPdb)
from ..probspace.radicals import PowProb
from ..relmodel.atoms import BOT, Fact, Schema
from ..relmodel.evaluate import Query, View
from ..relmodel.formula import (And, Const, Eq, Exists, Not, Rel, Var, conj,
                                disj, exists_many)
from .representation import Representation


@dataclass(frozen=True)
class SegmentEntry:
    instance_id: int
    size: int
    segments: int
    p: Fraction
    q: object  # PowProb, or Fraction when a single segment


@dataclass(frozen=True)
class SegmentationReport:
    c: int
    relation: str
    tagged: bool
    entries: tuple  # of SegmentEntry


def _segment_layout(schema: Schema, c: int):
    """Slot width and whether slots carry a relation tag."""
    rels = schema.relations
    tagged = len(rels) != 1 or rels[0][1] == 0
    width = schema.max_arity + (1 if tagged else 0)
    return tagged, width


def _slot(f: Fact | None, tagged: bool, width: int) -> tuple:
    if f is None:
        return (BOT,) * width
    if tagged:
        return (f.relation, *f.args) + (BOT,) * (width - 1 - len(f.args))
    return f.args


def _complete(rel: str, arity: int, i: Var, fresh) -> object:
    """Instance identifier i has segment 0 and every next pointer resolves."""
    def atom(first, second, third):
        rest = [fresh() for _ in range(arity - 3)]
        return rest, Rel(rel, (first, second, third, *map(Var, rest)))

    rest, start = atom(i, Const(0), Var(fresh()))
    start = exists_many([start.terms[2].name, *rest], start)
    j, nxt = fresh(), fresh()
    rest1, seg = atom(i, Var(j), Var(nxt))
    rest2, target = atom(i, Var(nxt), Var(fresh()))
    target = exists_many([target.terms[2].name, *rest2], target)
    broken = exists_many([j, nxt, *rest1], conj([seg, Not(Eq(Var(nxt), Const(BOT))), Not(target)]))
    return And(start, Not(broken))


class _Fresh:
    def __init__(self, prefix="v"):
        self.prefix = prefix
        self.n = 0

    def __call__(self) -> str:
        self.n += 1
        return f"{self.prefix}{self.n}"


def dagger_compile(pdb: ExplicitPdb, c: int):
    """Conditioned TI representation of an explicit PDB by c-fact segments.

    Instance D_i (canonical order, ids from 0) is cut into max(ceil(s_i/c), 1)
    segment facts Seg(i, j, next, slot_1..slot_c); all of its facts get the
    marginal (p_i/(1+p_i))^(1/segments). The condition asks for exactly one
    instance identifier whose chain is complete, and the view reads the slots
    of that identifier.
    """
    if not isinstance(c, int) or c < 1:
        raise ModelError("c must be a positive integer")
    worlds = sorted(pdb.worlds, key=lambda w: w[0].sort_key())
    if any(p == 0 for _, p in worlds):
        raise ModelError("every listed instance needs positive probability")
    tagged, width = _segment_layout(pdb.schema, c)
    rel = "Seg"
    while rel in pdb.schema:
        rel += "_"
    arity = 3 + c * width
    schema = Schema(((rel, arity),))

    entries, reports = [], []
    for i, (inst, p) in enumerate(worlds):
        facts = list(inst)
        s = len(facts)
        segs = max(math.ceil(s / c), 1)
        q = p / (1 + p)
        qf = q if segs == 1 else PowProb.root(q, segs)
        reports.append(SegmentEntry(i, s, segs, p, qf))
        for j in range(segs):
            nxt = j + 1 if (j + 1) * c < s else BOT
            slots = []
            for t in range(j * c, j * c + c):
                slots.extend(_slot(facts[t] if t < s else None, tagged, width))
            entries.append((Fact(rel, (i, j, nxt, *slots)), qf))
    base = TiPdb(schema, ExplicitFamily(tuple(entries)))

    fresh = _Fresh()
    i1, i2 = Var("i"), Var("i2")
    some = Exists("i", _complete(rel, arity, i1, fresh))
    two = exists_many(["i", "i2"], conj([_complete(rel, arity, i1, fresh),
                                         _complete(rel, arity, i2, fresh),
                                         Not(Eq(i1, i2))]))
    condition = And(some, Not(two))

    queries = []
    for name, a in pdb.schema.relations:
        xs = tuple(Var(f"x{n + 1}") for n in range(a))
        options = []
        for t in range(c):
            terms = [Var("i"), Var("j"), Var("n")]
            others = ["j", "n"]
            for slot in range(c):
                if slot == t:
                    if tagged:
                        terms.append(Const(name))
                        terms.extend(xs)
                        terms.extend(Const(BOT) for _ in range(width - 1 - a))
                    else:
                        terms.extend(xs)
                else:
                    names = [f"o{slot}_{m}" for m in range(width)]
                    others.extend(names)
                    terms.extend(map(Var, names))
            body = [Rel(rel, tuple(terms))]
            if not tagged:
                body.append(Not(Eq(xs[0], Const(BOT))))
            options.append(exists_many(others, conj(body)))
        inner = conj([disj(options), _complete(rel, arity, Var("i"), fresh)])
        queries.append(Query(name, xs, Exists("i", inner)))
    view = View(tuple(queries), schema)
    report = SegmentationReport(c, rel, tagged, tuple(reports))
    return Representation(base, condition, view), report


def segment_product(entry: SegmentEntry):
    """The segments-fold product of the entry's q, reduced when rational."""
    if isinstance(entry.q, PowProb):
        prod = PowProb(entry.q.factors * entry.segments)
        red = prod.reduce()
        return prod if red is None else red
    return entry.q ** entry.segments


# checking the series condition

@dataclass(frozen=True)
class DaggerResult:
    verdict: str  # "holds", "diverges" or "unknown"
    c: int
    n: int
    dagger_partial: float | None
    ddagger_partial: float | None
    certificate: dict = field(default_factory=dict)


def _series_terms(sizes_probs, c: int):
    dag = ddag = 0.0
    for s, p in sizes_probs:
        if s == 0:
            continue
        p = float(p)
        dag += s * p ** (c / s)
        seg = math.ceil(s / c)
        ddag += seg * p ** (1 / seg)
    return dag, ddag


def _z_lower(law, n: int, cap: int = 10_000) -> Fraction:
    """Lower bound on prod_{i>=1} (1 - p_i): the first m >= n factors times
    1 - (sum of the rest), where m grows until that sum drops below 1/2."""
    scale = 1 << 64
    z = Fraction(1)
    m = 0
    while True:
        m += 1
        z *= 1 - law.p(m)
        # round down to keep the numbers small; still a lower bound
        z = Fraction(z.numerator * scale // z.denominator, scale)
        if m < n:
            continue
        tail = law.tail(m)
        if tail < Fraction(1, 2) or (m >= cap and tail < 1):
            return z * (1 - tail)
        if m >= cap or z == 0:
            return Fraction(0)


def _ratio_start(law, c: int, limit: int = 10_000):
    """Least i0 such that the term lower bound t_i = (p_i/(1-p_i))^c 2^(i-1)
    is non-decreasing from i0 on, with the argument used."""
    if isinstance(law, InversePolynomial):
        # p/(1-p) = c'/(i^s + e) with e = d - c'
        e = law.d - law.c
        for i in range(1, limit):
            r = Fraction(i + 1, i) ** law.s
            if e < 0:
                if Fraction(i) ** law.s < -2 * e:
                    continue
                r = 2 * r - 1
            if r ** c <= 2:
                return i, "((i+1)^s + e)/(i^s + e) is bounded by a decreasing sequence"
        return None, None
    if isinstance(law, Geometric):
        if 2 * law.ratio ** c <= 1:
            return None, None
        for i in range(1, limit):
            if 2 * law.ratio ** c * (1 - law.p(i)) ** c >= 1:
                return i, "2 r^c (1 - a r^i)^c >= 1 and increases with i"
        return None, None
    return None, None


def dagger_check(pdb, c: int, n: int = 20) -> DaggerResult:
    """Decide the series condition for a cataloged family, with certificate.

    n is the number of terms (or worlds) summed for the reported partial sums.
    """
    if not isinstance(c, int) or c < 1:
        raise ModelError("c must be a positive integer")
    if isinstance(pdb, ExplicitPdb):
        dag, ddag = _series_terms(((len(i), p) for i, p in pdb.worlds), c)
        return DaggerResult("holds", c, len(pdb.worlds), dag, ddag, {"kind": "finite_sum"})
    if isinstance(pdb, SquareDecayPdb):
        window = pdb.window(n)
        dag, ddag = _series_terms(((len(i), p) for i, p in window.worlds), c)
        m, b = pdb.size_mult, pdb.base
        # |D_i| P_i^(c/|D_i|) <= Z m i b^(-c i / m) for i >= c/m, since Z >= 1
        # and every window normaliser is at most b
        return DaggerResult("holds", c, n, dag, ddag, {
            "kind": "geometric_domination", "bound": "Z m i rho^i with rho = b^(-c/m) < 1",
            "Z_max": str(b), "b": b, "c/m": str(Fraction(c, m)),
            "from_index": math.ceil(Fraction(c, m)),
        })
    if isinstance(pdb, SizeLawPdb):
        sizes = [(pdb.size(i), pdb.p(i)) for i in range(1, n + 1)]
        dag, ddag = _series_terms(sizes, c)
        b = pdb.size_base
        if b == 1:
            return DaggerResult("holds", c, n, dag, ddag, {
                "kind": "geometric_domination", "bound": "(a r^i)^c", "rho": str(pdb.ratio ** c)})
        # every world has probability >= q^i with q = min(a r, r) <= 1, so the
        # term is at least b^i q^(c i / b^i) >= 1 once b^(b^i) q^c >= 1
        q = min(pdb.a * pdb.ratio, pdb.ratio, Fraction(1))
        target = 1 / q ** c
        i0 = 1
        while Fraction(b) ** (b ** i0) < target:
            i0 += 1
        return DaggerResult("diverges", c, n, dag, ddag, {
            "kind": "term_lower_bound", "bound": "terms >= 1", "from_index": i0, "q": str(q)})
    if isinstance(pdb, TiPdb) and isinstance(pdb.family, ParametricFamily):
        law = pdb.family.law
        z = _z_lower(law, n)
        zc = min(Fraction(1), z) ** c
        terms = []
        for i in range(1, n + 1):
            p = law.p(i)
            terms.append(zc * (p / (1 - p)) ** c * 2 ** (i - 1))
        lower = float(sum(terms, Fraction(0)))
        i0, why = _ratio_start(law, c)
        cert = {"kind": "term_lower_bound", "Z_lower": str(z),
                "bound": "min(1,Z)^c (p_i/(1-p_i))^c 2^(i-1)"}
        if i0 is not None and z > 0:
            cert.update(from_index=i0, argument=why)
            return DaggerResult("diverges", c, n, lower, None, cert)
        return DaggerResult("unknown", c, n, lower, None, cert)
    if isinstance(pdb, TiPdb):
        # a finite TI has finitely many worlds
        return DaggerResult("holds", c, len(pdb.family), None, None, {"kind": "finite_sum"})
    return DaggerResult("unknown", c, n, None, None, {})
