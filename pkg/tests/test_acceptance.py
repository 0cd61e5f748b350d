"""Acceptance suite: twelve criteria, each with its own runtime budget.

Every criterion prints one PASS/FAIL line; the lines are also collected in
the pytest terminal summary. Run standalone with
``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import functools
import math
import random
import sys
import time
from fractions import Fraction

import acceptance_log
from oracles import (bid_worlds, clean, condition, oracle_sentence,
                     oracle_view, push, random_bid_blocks,
                     random_explicit_worlds, random_formula, random_ti_facts,
                     ti_worlds)
from pdbrep.compilers import (assign_representable_probs, compile_bid,
                              dagger_check, dagger_compile,
                              eliminate_condition, monotone_to_sjfcq,
                              representable_term_identity,
                              representation_law, segment_product,
                              verify_representation)
from pdbrep.diagnostics import (EdgeGraphSpec, edge_graph_cq_rep,
                                edge_graph_ucq_rep, moment_inequality_check,
                                view_prob_bound)
from pdbrep.probspace import (Distribution, InversePolynomial,
                              ParametricFamily, RadicalSum, SizeLawPdb, SquareDecayPdb,
                              Template, TiPdb, bid_new,
                              distributions_equal, enumerate_worlds,
                              explicit_new, moment, pushforward, ti_from_facts)
from pdbrep.relmodel import (Fact, Fragment, Instance, Query, Schema, Var,
                             View, classify, classify_view, fact, free_vars,
                             parse_formula)


def acceptance(number: int, title: str, budget: float):
    """Time the wrapped check, log one line, fail on error or overrun."""
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            t0 = time.perf_counter()
            error = None
            try:
                fn()
            except Exception as exc:  # noqa: BLE001 - reported, then re-raised
                error = exc
            elapsed = time.perf_counter() - t0
            ok = error is None and elapsed < budget
            why = "" if ok else (f" ({type(error).__name__}: {error})" if error
                                 else f" (over budget {budget:g} s)")
            line = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}: {elapsed:.2f} s{why}"
            acceptance_log.LINES.append(line)
            print(line)
            if error is not None:
                raise error
            assert elapsed < budget, f"criterion {number} took {elapsed:.2f} s (budget {budget} s)"
        run.criterion = number
        return run
    return wrap


def law(d: dict) -> Distribution:
    return Distribution(clean(d))


def rs_pdb() -> TiPdb:
    return ti_from_facts([
        (fact("R", 1, 1), 1), (fact("R", 1, 2), 1), (fact("R", 2, 2), 1),
        (fact("S", 1), Fraction(1, 2)), (fact("S", 2), Fraction(1, 2)),
    ])


def rs_view(schema) -> View:
    return View((Query("Q", (Var("x"),), parse_formula("exists y: R(x, y) & S(y)", schema)),), schema)


def random_query(rng, schema, depth, fo=True, name="Q") -> Query:
    """Random query whose head lists the free variables in sorted order."""
    f = random_formula(rng, schema, depth, fo=fo)
    return Query(name, tuple(Var(v) for v in sorted(free_vars(f))), f)


@acceptance(1, "RS golden push-forward", 1.0)
def test_criterion_01_rs_golden():
    base = rs_pdb()
    view = rs_view(base.schema)
    got = pushforward(enumerate_worlds(base), view)
    q = lambda *xs: Instance(Fact("Q", (x,)) for x in xs)  # noqa: E731
    golden = {q(): Fraction(1, 4), q(1): Fraction(1, 4), q(1, 2): Fraction(1, 2)}
    assert got.weights == golden
    oracle = push(ti_worlds(list(base.family.facts())), lambda i: oracle_view(view, i))
    assert clean(oracle) == golden


@acceptance(2, "BID compiler round-trip (100 random BIDs)", 10.0)
def test_criterion_02_bid_round_trip():
    rng = random.Random(2)
    for _ in range(100):
        blocks = random_bid_blocks(rng)
        bid = bid_new(Schema.of(R=1, S=2), blocks)
        rep, report = compile_bid(bid)
        assert verify_representation(bid, rep)
        assert distributions_equal(representation_law(rep), law(bid_worlds(blocks)))
        for block, brep in zip(blocks, report.blocks):
            residual = 1 - sum(p for _, p in block)
            assert brep.residual == residual
            for (f, p), (g, q) in zip(block, brep.q):
                assert f == g
                assert q == (p / (1 + p) if residual == 0 else p / (residual + p))


CONDITION_FIXTURES = [
    ([(fact("A", 1), Fraction(1, 2)), (fact("A", 2), Fraction(1, 2))], "exists x: A(x)"),
    ([(fact("R", 1, 2), Fraction(1, 3)), (fact("R", 2, 1), Fraction(1, 2)),
      (fact("R", 2, 2), Fraction(1, 4))], "!(exists x: exists y: R(x, y) & !R(y, x))"),
    ([(fact("A", 1), Fraction(2, 3)), (fact("B", 1), Fraction(1, 3)),
      (fact("B", 2), Fraction(1, 2))], "forall x: (!B(x) | A(x))"),
    ([(fact("A", 1), Fraction(1, 3)), (fact("B", 1), Fraction(1, 3)),
      (fact("C"), Fraction(1, 2))], "C() | (exists x: A(x) & B(x))"),
    ([(fact("A", 1), Fraction(1, 5)), (fact("A", 2), Fraction(1, 5)),
      (fact("B", 1), Fraction(1, 5))], "exists x: A(x)"),
]


@acceptance(3, "condition elimination (k*m+1 <= 16 base facts)", 30.0)
def test_criterion_03_condition_elimination():
    for facts, text in CONDITION_FIXTURES:
        base = ti_from_facts(facts)
        phi = parse_formula(text, base.schema)
        rep, r = eliminate_condition(base, phi)
        m = len(facts)
        assert r.branch == "general" and r.k * m + 1 == r.base_facts <= 16
        target = condition(ti_worlds(facts), lambda i: oracle_sentence(phi, i))
        assert verify_representation(law(target), rep)
        # report identities, recomputed from the oracle law
        worlds = ti_worlds(facts)
        p_phi = sum(p for i, p in worlds.items() if oracle_sentence(phi, i))
        assert r.p_phi == p_phi
        assert r.p_0 == target[r.I0] == max(target.values())
        assert r.p_psi == (1 - r.p_0) * r.p_phi
        assert (1 - r.p_psi) ** r.k < r.p_0 <= (1 - r.p_psi) ** (r.k - 1)
        p_rep = 1 - (1 - r.p_psi) ** r.k
        assert r.p_bot == (p_rep - (1 - r.p_0)) / p_rep
    # worked case: two independent halves conditioned on non-emptiness
    base = ti_from_facts(CONDITION_FIXTURES[0][0])
    _, r = eliminate_condition(base, parse_formula("exists x: A(x)", base.schema))
    assert r.k == 2 and r.p_bot == Fraction(1, 9)


@acceptance(4, "segmentation encoding round-trip", 30.0)
def test_criterion_04_segmentation():
    q = lambda *xs: Instance(Fact("R", (x,)) for x in xs)  # noqa: E731
    three = explicit_new(Schema.of(R=1), [(q(), Fraction(1, 4)), (q(1), Fraction(1, 4)),
                                          (q(1, 2), Fraction(1, 2))])
    cases = [(three, 1)]
    rng = random.Random(4)
    schemas = [[("R", 1)], [("R", 2)], [("R", 1), ("S", 2)]]
    for _ in range(50):
        schema = rng.choice(schemas)
        pdb = explicit_new(Schema(tuple(schema)), random_explicit_worlds(rng, schema))
        cases.append((pdb, rng.choice([1, 2])))
    for pdb, c in cases:
        rep, report = dagger_compile(pdb, c)
        assert verify_representation(pdb, rep)
        by_size = {}
        for inst, p in pdb.worlds:
            by_size.setdefault(len(inst), []).append(p)
        for entry in report.entries:
            assert entry.segments == max(math.ceil(entry.size / c), 1)
            assert entry.p in by_size[entry.size]
            assert segment_product(entry) == entry.p / (1 + entry.p)


@acceptance(5, "moment golden values", 1.0)
def test_criterion_05_moments():
    ti = ti_from_facts([(fact("R", 1), Fraction(1, 2)), (fact("R", 2), Fraction(1, 3))])
    assert moment(ti, 1).partial == Fraction(5, 6)
    assert moment(ti, 2).partial == Fraction(7, 6)
    fam = SizeLawPdb(3, Fraction(1, 4), 2)
    m1 = moment(fam, 1, 40)
    assert abs(float(m1.partial) - 3) < 1e-9 and m1.finite
    for n in (1, 7, 40):
        m2 = moment(fam, 2, n)
        assert m2.partial == 3 * n and not m2.finite


@acceptance(6, "moment inequality on 100 random TIs", 10.0)
def test_criterion_06_moment_inequality():
    rng = random.Random(6)
    for _ in range(100):
        facts = random_ti_facts(rng, rng.randint(1, 6), allow_certain=True)
        ti = ti_from_facts(facts)
        checks = moment_inequality_check(ti, 4)
        worlds = ti_worlds(facts)
        e = [sum(p * len(i) ** k for i, p in worlds.items()) for k in range(5)]
        for chk in checks:
            assert chk.lhs == e[chk.k]
            assert chk.rhs == e[chk.k - 1] * (chk.k - 1 + e[1])
            assert chk.holds and chk.lhs <= chk.rhs


@acceptance(7, "view-probability bound on 50 random cases", 30.0)
def test_criterion_07_view_bound():
    rng = random.Random(7)
    schema = [("R", 1), ("S", 2)]
    done = 0
    while done < 50:
        facts = random_ti_facts(rng, rng.randint(1, 6))
        ti = ti_from_facts(facts, Schema(tuple(schema)))
        query = random_query(rng, schema, rng.randint(1, 3))
        if not query.head:
            continue
        view = View((query,), ti.schema)
        worlds = ti_worlds(facts)
        images = push(worlds, lambda i: oracle_view(view, i))
        consts = view.constants()
        reachable = [t for t in clean(images) if t.adom() - consts]
        if not reachable:
            continue
        target = rng.choice(sorted(reachable, key=Instance.sort_key))
        report = view_prob_bound(ti, view, target)
        a_star = target.adom() - consts
        a = len(a_star)
        r = 2
        mass = sum(p for f, p in facts if a_star & set(f.args))
        actual = images[target]
        assert report.actual == actual
        assert actual ** r <= a ** r * (r * r * a ** (r - 1) * mass) ** a
        assert report.holds
        done += 1


@acceptance(8, "monotone query to self-join-free CQ", 10.0)
def test_criterion_08_sjfcq():
    base = rs_pdb()
    view = rs_view(base.schema)
    cases = [(base, view.queries[0])]
    rng = random.Random(8)
    schema = [("R", 1), ("S", 2)]
    while len(cases) < 26:
        facts = random_ti_facts(rng, rng.randint(1, 3))
        if rng.random() < 0.5 and fact("R", 3) not in dict(facts):
            facts.append((fact("R", 3), Fraction(1)))
        query = random_query(rng, schema, rng.randint(1, 3), fo=False)
        cases.append((ti_from_facts(facts, Schema(tuple(schema))), query))
    for ti, query in cases:
        rep = monotone_to_sjfcq(ti, query)
        assert classify_view(rep.view) == Fragment.SJFCQ
        oracle = push(ti_worlds(list(ti.family.facts())),
                      lambda i: oracle_view(View((query,), ti.schema), i))
        assert verify_representation(law(oracle), rep)


@acceptance(9, "fragment classifier goldens", 1.0)
def test_criterion_09_fragments():
    assert classify(parse_formula("E(x, y) & E(y, x)")) == Fragment.CQ
    assert classify(parse_formula("E(x, y) | E(y, x)")) == Fragment.UCQ
    assert classify(parse_formula("!R(x)")) == Fragment.FO
    assert classify(parse_formula("exists y: R(x, y) & S(y)")) == Fragment.SJFCQ


@acceptance(10, "edge-graph UCQ and CQ constructions", 1.0)
def test_criterion_10_edge_graphs():
    spec = EdgeGraphSpec.from_map({(1, 2): Fraction(1, 2), (2, 3): Fraction(1, 3),
                                   (1, 3): Fraction(1, 4)})
    got = representation_law(edge_graph_ucq_rep(spec))
    _check_symmetric_graph(got, dict(spec.edges))

    pairs = {(2 * i - 1, 2 * i): Fraction(1, i ** 4) for i in range(1, 6)}
    rep = edge_graph_cq_rep(EdgeGraphSpec.from_map(pairs))
    for f, q in rep.base.family.facts():
        i = (max(f.args) + 1) // 2
        assert q == Fraction(1, i * i)
    _check_symmetric_graph(representation_law(rep), pairs)


def _check_symmetric_graph(dist, marginals):
    expected = {}
    edges = list(marginals.items())
    for mask in range(1 << len(edges)):
        p = Fraction(1)
        facts = []
        for j, ((a, b), q) in enumerate(edges):
            if mask >> j & 1:
                p *= q
                facts += [Fact("E", (a, b)), Fact("E", (b, a))]
            else:
                p *= 1 - q
        inst = Instance(facts)
        expected[inst] = expected.get(inst, 0) + p
    assert distributions_equal(dist, law(expected))
    for inst in dist.support():
        assert all(Fact("E", (f.args[1], f.args[0])) in inst.fact_set for f in inst)
    for (a, b), q in marginals.items():
        assert sum(w for i, w in dist.weights.items() if Fact("E", (a, b)) in i.fact_set) == q


@acceptance(11, "series-condition checker", 5.0)
def test_criterion_11_dagger_checker():
    assert dagger_check(SquareDecayPdb(base=2), 1).verdict == "holds"
    ti = TiPdb(Schema.of(R=1), ParametricFamily(InversePolynomial(1, 2, 1), Template("unary", "R")))
    for c in (1, 2, 3):
        assert dagger_check(ti, c).verdict == "diverges"
    rng = random.Random(11)
    for _ in range(20):
        worlds, n = [], rng.randint(1, 6)
        while len(worlds) < n:
            size = rng.randint(0, 3)
            inst = Instance(Fact("R", (rng.randint(1, 4),)) for _ in range(size))
            if inst not in worlds:
                worlds.append(inst)
        pdb = assign_representable_probs(worlds)
        assert dagger_check(pdb, 1).verdict == "holds"
        z = [Fraction(1) if not w else (Fraction(1, 2 ** i) / len(w)) ** len(w)
             for i, w in enumerate(worlds, start=1)]
        total = sum(z)
        assert [p for _, p in pdb.worlds] == [x / total for x in z]
        for i, w in enumerate(worlds, start=1):
            if w:
                s = len(w)
                lhs, rhs = representable_term_identity(pdb, i)
                # |D_i| P_i^(1/s) and 2^-i Z^(-1/s), built independently
                mine_l = RadicalSum.power(z[i - 1] / total, Fraction(1, s), s)
                mine_r = RadicalSum.power(1 / total, Fraction(1, s), Fraction(1, 2 ** i))
                assert lhs == mine_l == mine_r == rhs


@acceptance(12, "worlds commute with views (50 random cases)", 5.0)
def test_criterion_12_worlds_commute():
    rng = random.Random(12)
    schema = [("R", 1), ("S", 2)]
    for n in range(50):
        if n % 3 == 0:
            blocks = random_bid_blocks(rng)
            pdb = bid_new(Schema(tuple(schema)), blocks)
            support = [i for i, p in bid_worlds(blocks).items() if p]
        elif n % 3 == 1:
            facts = random_ti_facts(rng, rng.randint(1, 5), allow_certain=True)
            pdb = ti_from_facts(facts, Schema(tuple(schema)))
            support = [i for i, p in ti_worlds(facts).items() if p]
        else:
            worlds = random_explicit_worlds(rng, schema)
            pdb = explicit_new(Schema(tuple(schema)), worlds)
            support = [i for i, _ in worlds]
        view = View((random_query(rng, schema, rng.randint(1, 3)),), pdb.schema)
        pushed = set(pushforward(enumerate_worlds(pdb), view).support())
        assert pushed == {oracle_view(view, i) for i in support}


def main() -> int:
    tests = sorted((fn for name, fn in globals().items() if name.startswith("test_criterion")),
                   key=lambda fn: fn.criterion)
    failed = 0
    for fn in tests:
        try:
            fn()
        except Exception:  # noqa: BLE001 - the line is already printed
            failed += 1
    print(f"{len(tests) - failed}/{len(tests)} criteria passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
