import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import (bid_worlds, clean, condition, oracle_sentence,
                     random_bid_blocks, random_explicit_worlds,
                     random_formula, random_ti_facts, ti_worlds)
from pdbrep.errors import GuardExceeded, ModelError, NullEventError
from pdbrep.probspace import (INDETERMINATE, Distribution,
                              ExplicitFamily, Geometric, InversePolynomial,
                              ParametricFamily, PowProb, RadicalSum,
                              SizeLawPdb, SquareDecayPdb, Template, TiPdb,
                              bid_new, compare, condition_distribution,
                              conditioned_worlds, count_law,
                              distributions_equal, enumerate_worlds,
                              event_weight, explicit_new, marginal, moment,
                              moment_upper, pushforward, sample, sample_many,
                              ti_from_facts)
from pdbrep.probspace.io import (distribution_to_json, pdb_from_json,
                                 pdb_to_json)
from pdbrep.probspace.radicals import set_precision
from pdbrep.relmodel import (Instance, Query, Schema, Var, View, fact,
                             free_vars, parse_formula)

F = Fraction
SCHEMA = [("R", 1), ("S", 2)]


def law(d):
    return Distribution(clean(d))


class TestRadicals:
    def test_square_roots_multiply_out(self):
        r2 = RadicalSum.power(2, F(1, 2))
        assert (r2 * r2).to_fraction() == 2
        assert not r2.is_rational()

    def test_canonical_form_decides_equality(self):
        # sqrt(8) = 2 sqrt(2); sqrt(2) + sqrt(3) is not sqrt(5)
        assert RadicalSum.power(8, F(1, 2)) == RadicalSum.power(2, F(1, 2), 2)
        lhs = RadicalSum.power(2, F(1, 2)) + RadicalSum.power(3, F(1, 2))
        assert lhs != RadicalSum.power(5, F(1, 2))
        assert compare(lhs, RadicalSum.power(5, F(1, 2))) == 1

    def test_powprob_reduces_when_rational(self):
        assert PowProb.root(F(1, 4), 2).reduce() == F(1, 2)
        assert PowProb.root(F(1, 2), 2).reduce() is None
        assert PowProb.root(F(8, 27), 3) == F(2, 3)

    def test_powprob_exact_compare(self):
        q = PowProb.root(F(1, 2), 2)  # 0.7071...
        assert q.compare(F(7071, 10000)) == 1
        assert q.compare(F(7072, 10000)) == -1
        assert compare(F(1, 2), q) == -1

    def test_merging_bases(self):
        assert PowProb([(F(1, 2), F(1, 3)), (F(1, 2), F(2, 3))]) == F(1, 2)
        with pytest.raises(ModelError):
            PowProb([(F(3, 2), 1)])

    def test_low_precision_can_be_indeterminate(self):
        a = RadicalSum.power(2, F(1, 2)) - RadicalSum.const(F(14142135623731, 10 ** 13))
        assert a.sign(8) is INDETERMINATE
        assert a.sign(200) == -1
        with pytest.raises(ValueError):
            set_precision(2)


class TestModels:
    def test_explicit_validation(self):
        s = Schema.of(R=1)
        with pytest.raises(ModelError):
            explicit_new(s, [(Instance(), F(1, 2))])
        with pytest.raises(ModelError):
            explicit_new(s, [(Instance(), F(1, 2)), (Instance(), F(1, 2))])

    def test_bid_validation(self):
        s = Schema.of(R=1)
        with pytest.raises(ModelError):
            bid_new(s, [[(fact("R", 1), F(2, 3)), (fact("R", 2), F(1, 2))]])
        with pytest.raises(ModelError):
            bid_new(s, [[(fact("R", 1), F(1, 3))], [(fact("R", 1), F(1, 3))]])

    def test_law_parameters(self):
        with pytest.raises(ModelError):
            Geometric(1, F(3, 2))
        with pytest.raises(ModelError):
            InversePolynomial(1, 1)
        with pytest.raises(ModelError):
            SizeLawPdb(1, F(1, 3), 2)  # masses sum to 1/2
        geo = Geometric(F(1, 2), F(1, 2))
        assert sum(geo.p(i) for i in range(1, 30)) + geo.tail(29) == geo.a * geo.ratio / (1 - geo.ratio)

    def test_inverse_polynomial_tail_is_an_upper_bound(self):
        law = InversePolynomial(1, 2, 1)
        for n in (0, 1, 5, 20):
            assert sum(law.p(i) for i in range(n + 1, n + 2000)) <= law.tail(n)

    def test_marginals(self):
        ti = ti_from_facts([(fact("R", 1), F(1, 3))])
        assert marginal(ti, fact("R", 1)) == F(1, 3)
        assert marginal(ti, fact("R", 2)) == 0
        fam = TiPdb(Schema.of(R=1), ParametricFamily(Geometric(1, F(1, 2)), Template("unary", "R")))
        assert marginal(fam, fact("R", 3)) == F(1, 8)

    def test_square_decay_window(self):
        pdb = SquareDecayPdb()
        w = pdb.window(4)
        assert sum(p for _, p in w.worlds) == 1
        assert [len(i) for i, _ in w.worlds] == [1, 2, 3, 4]
        assert w.worlds[0][1] / w.worlds[1][1] == 2 ** 3


class TestEnumeration:
    @pytest.mark.parametrize("seed", range(15))
    def test_ti_matches_oracle(self, seed):
        facts = random_ti_facts(random.Random(seed), 5, allow_certain=True)
        got = enumerate_worlds(ti_from_facts(facts))
        assert distributions_equal(got, law(ti_worlds(facts)))
        assert got.total() == 1

    @pytest.mark.parametrize("seed", range(15))
    def test_bid_matches_oracle(self, seed):
        blocks = random_bid_blocks(random.Random(seed))
        got = enumerate_worlds(bid_new(Schema(tuple(SCHEMA)), blocks))
        assert distributions_equal(got, law(bid_worlds(blocks)))

    def test_radical_marginals_sum_to_one(self):
        q = PowProb.root(F(1, 2), 2)
        ti = TiPdb(Schema.of(R=1), ExplicitFamily(((fact("R", 1), q), (fact("R", 2), q))))
        dist = enumerate_worlds(ti)
        assert dist.total() == 1
        assert dist.prob(Instance([fact("R", 1), fact("R", 2)])) == F(1, 2)

    def test_truncated_family_is_incomplete(self):
        fam = TiPdb(Schema.of(R=1), ParametricFamily(Geometric(1, F(1, 2)), Template("unary", "R")))
        dist = enumerate_worlds(fam, 3)
        assert not dist.complete and len(dist) == 8
        with pytest.raises(ModelError):
            enumerate_worlds(fam)

    def test_guard(self):
        facts = [(fact("R", i), F(1, 2)) for i in range(6)]
        with pytest.raises(GuardExceeded):
            enumerate_worlds(ti_from_facts(facts), guard=32)

    def test_size_law_window(self):
        dist = enumerate_worlds(SizeLawPdb(3, F(1, 4), 2), 3)
        assert sorted(len(i) for i in dist.support()) == [2, 4, 8]


class TestConditioning:
    @pytest.mark.parametrize("seed", range(20))
    def test_matches_oracle(self, seed):
        rng = random.Random(seed)
        facts = random_ti_facts(rng, 4)
        f = random_formula(rng, SCHEMA, 2, vars_=())
        if free_vars(f):
            pytest.skip("sentence generator produced an open formula")
        target = clean(ti_worlds(facts))
        kept = {i: p for i, p in target.items() if oracle_sentence(f, i)}
        ti = ti_from_facts(facts)
        if not kept:
            with pytest.raises(NullEventError):
                condition_distribution(enumerate_worlds(ti), f)
            return
        want = law(condition(target, lambda i: oracle_sentence(f, i)))
        assert distributions_equal(condition_distribution(enumerate_worlds(ti), f), want)
        assert distributions_equal(conditioned_worlds(ti, f), want)
        assert event_weight(enumerate_worlds(ti), f) == sum(kept.values())

    def test_irrational_normalizer(self):
        q = PowProb.root(F(1, 2), 2)
        ti = TiPdb(Schema.of(R=1), ExplicitFamily(((fact("R", 1), q), (fact("R", 2), F(1, 2)))))
        cond = parse_formula("R(1) | R(2)")
        dist = condition_distribution(enumerate_worlds(ti), cond)
        assert dist.normalizer != 1
        with pytest.raises(ArithmeticError):
            dist.prob(Instance([fact("R", 2)]))
        # same law, scaled weights and normalizer
        scaled = Distribution({i: w * 3 for i, w in dist.weights.items()}, dist.normalizer * 3)
        assert distributions_equal(dist, scaled)

    def test_open_condition_rejected(self):
        with pytest.raises(ModelError):
            condition_distribution(enumerate_worlds(ti_from_facts([(fact("R", 1), F(1, 2))])),
                                   parse_formula("R(x)"))


class TestPushforward:
    def test_mass_is_preserved(self):
        rng = random.Random(3)
        for _ in range(10):
            facts = random_ti_facts(rng, 4)
            f = random_formula(rng, SCHEMA, 2)
            view = View((Query("Q", tuple(Var(v) for v in sorted(free_vars(f))), f),))
            dist = pushforward(enumerate_worlds(ti_from_facts(facts)), view)
            assert dist.total() == 1

    def test_comparison_reports_witness(self):
        a = Distribution({Instance(): F(1, 2), Instance([fact("R", 1)]): F(1, 2)})
        b = Distribution({Instance(): F(1, 3), Instance([fact("R", 1)]): F(2, 3)})
        res = distributions_equal(a, b)
        assert not res and res.verdict == "not_equal" and res.witness == Instance()


class TestMoments:
    @given(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=7), max_size=6))
    @settings(max_examples=60, deadline=None)
    def test_count_law_matches_enumeration(self, probs):
        facts = [(fact("R", i), p) for i, p in enumerate(probs)]
        worlds = ti_worlds(facts)
        cl = count_law(probs)
        for j, w in enumerate(cl):
            assert w == sum((p for i, p in worlds.items() if len(i) == j), F(0))

    def test_countable_ti_bounds(self):
        fam = TiPdb(Schema.of(R=1), ParametricFamily(Geometric(1, F(1, 2)), Template("unary", "R")))
        m = moment(fam, 2, 10)
        big = moment(fam, 2, 30)
        assert m.partial <= big.partial <= m.partial + m.tail_bound
        assert moment_upper(fam, 1, 10) >= 1 - F(1, 2 ** 10)

    def test_explicit_and_bid(self):
        pdb = explicit_new(Schema.of(R=1), [(Instance(), F(1, 2)), (Instance([fact("R", 1), fact("R", 2)]), F(1, 2))])
        assert moment(pdb, 3).partial == 4
        bid = bid_new(Schema.of(R=1), [[(fact("R", 1), F(1, 2)), (fact("R", 2), F(1, 4))]])
        assert moment(bid, 1).partial == F(3, 4)
        with pytest.raises(ModelError):
            moment(pdb, 0)


class TestSampling:
    def test_seeded_reproducible(self):
        ti = ti_from_facts([(fact("R", i), F(1, 3)) for i in range(5)])
        assert sample_many(ti, 7, 20) == sample_many(ti, 7, 20)
        assert sample_many(ti, 7, 20) != sample_many(ti, 8, 20)

    def test_frequencies(self):
        ti = ti_from_facts([(fact("R", 1), F(1, 2)), (fact("R", 2), F(1, 3))])
        draws = sample_many(ti, 0, 4000)
        mean = sum(len(d) for d in draws) / len(draws)
        assert abs(mean - 5 / 6) < 0.05

    def test_bid_and_explicit_samples_are_worlds(self):
        rng = random.Random(1)
        blocks = random_bid_blocks(rng)
        bid = bid_new(Schema(tuple(SCHEMA)), blocks)
        support = set(clean(bid_worlds(blocks)))
        assert all(sample(bid, rng) in support for _ in range(50))
        worlds = random_explicit_worlds(rng, SCHEMA)
        pdb = explicit_new(Schema(tuple(SCHEMA)), worlds)
        assert all(sample(pdb, rng) in dict(worlds) for _ in range(50))


class TestJson:
    @pytest.mark.parametrize("pdb", [
        ti_from_facts([(fact("R", 1), F(1, 2)), (fact("S", 1, 2), 1)]),
        TiPdb(Schema.of(R=1), ExplicitFamily(((fact("R", 1), PowProb.root(F(1, 2), 3)),))),
        TiPdb(Schema.of(R=2), ParametricFamily(InversePolynomial(1, 2, 1), Template("pair", "R"))),
        bid_new(Schema.of(R=1), [[(fact("R", 1), F(1, 2)), (fact("R", 2), F(1, 2))]]),
        explicit_new(Schema.of(R=1), [(Instance(), F(1, 3)), (Instance([fact("R", "a")]), F(2, 3))]),
        SizeLawPdb(3, F(1, 4), 2),
        SquareDecayPdb(3, 2, "T"),
    ])
    def test_round_trip(self, pdb):
        text = json.dumps(pdb_to_json(pdb))
        back = pdb_from_json(json.loads(text))
        assert back == pdb or pdb_to_json(back) == pdb_to_json(pdb)

    def test_distribution_json(self):
        ti = ti_from_facts([(fact("R", 1), F(1, 3))])
        out = distribution_to_json(enumerate_worlds(ti))
        assert out == {"complete": True, "worlds": [
            {"facts": [], "p": "2/3"}, {"facts": [{"rel": "R", "args": [1]}], "p": "1/3"}]}

    def test_unknown_kind(self):
        with pytest.raises(ModelError):
            pdb_from_json({"kind": "nope"})
