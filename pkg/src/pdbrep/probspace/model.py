"""Probabilistic database models: fact families, TI, BID and explicit PDBs."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import ModelError, SchemaError
from ..relmodel.atoms import Fact, Instance, Schema
from .radicals import PowProb, compare


def as_prob(value):
    """Parse a probability: Fraction, int, "a/b" string or PowProb."""
    if isinstance(value, PowProb):
        return value
    if isinstance(value, bool):
        raise ModelError(f"not a probability: {value!r}")
    if isinstance(value, float):
        raise ModelError("floating-point probabilities are not accepted; use 'a/b'")
    try:
        p = Fraction(value)
    except (TypeError, ValueError) as exc:
        raise ModelError(f"not a probability: {value!r}") from exc
    return p


def check_unit(p, what="probability"):
    if isinstance(p, PowProb):
        if compare(p, 1) == 1:
            raise ModelError(f"{what} {p} exceeds 1")
        return p
    if not 0 <= p <= 1:
        raise ModelError(f"{what} {p} outside [0, 1]")
    return p


# parametric laws for countable TI families; indices start at 1

@dataclass(frozen=True)
class Geometric:
    """p_i = a * ratio^i."""

    a: Fraction
    ratio: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "ratio", Fraction(self.ratio))
        if not (0 < self.ratio < 1 and self.a > 0 and self.a * self.ratio <= 1):
            raise ModelError("geometric law needs 0 < ratio < 1, a > 0, a*ratio <= 1")

    def p(self, i: int) -> Fraction:
        return self.a * self.ratio ** i

    def tail(self, n: int) -> Fraction:
        """Exact sum of p_i over i > n."""
        return self.a * self.ratio ** (n + 1) / (1 - self.ratio)

    def to_json(self):
        return {"kind": "geometric", "a": str(self.a), "ratio": str(self.ratio)}


@dataclass(frozen=True)
class InversePolynomial:
    """p_i = c / (i^s + d) with integer s >= 2."""

    c: Fraction
    s: int
    d: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        object.__setattr__(self, "d", Fraction(self.d))
        if isinstance(self.s, bool) or not isinstance(self.s, int) or self.s < 2:
            raise ModelError("inverse-polynomial law needs an integer exponent s >= 2")
        if not (self.c > 0 and self.d >= 0 and self.c <= 1 + self.d):
            raise ModelError("inverse-polynomial law needs c > 0, d >= 0, c <= 1 + d")

    def p(self, i: int) -> Fraction:
        return self.c / (i ** self.s + self.d)

    def tail(self, n: int) -> Fraction:
        """Upper bound on the sum of p_i over i > n (integral test)."""
        if n == 0:
            return self.p(1) + self.c / (self.s - 1)
        return self.c / ((self.s - 1) * Fraction(n) ** (self.s - 1))

    def to_json(self):
        return {"kind": "inverse_poly", "c": str(self.c), "s": self.s, "d": str(self.d)}


@dataclass(frozen=True)
class Template:
    """Maps an index i to a fact: unary R(i) or pair R(2i-1, 2i)."""

    kind: str
    relation: str

    def __post_init__(self):
        if self.kind not in ("unary", "pair"):
            raise ModelError(f"unknown template {self.kind!r}")

    @property
    def arity(self) -> int:
        return 1 if self.kind == "unary" else 2

    def fact(self, i: int) -> Fact:
        if self.kind == "unary":
            return Fact(self.relation, (i,))
        return Fact(self.relation, (2 * i - 1, 2 * i))

    def index_of(self, f: Fact):
        if f.relation != self.relation or len(f.args) != self.arity:
            return None
        if not all(type(a) is int for a in f.args):
            return None
        if self.kind == "unary":
            return f.args[0] if f.args[0] >= 1 else None
        a, b = f.args
        if a >= 1 and a % 2 == 1 and b == a + 1:
            return (a + 1) // 2
        return None

    def to_json(self):
        return {self.kind: self.relation}


@dataclass(frozen=True)
class ExplicitFamily:
    entries: tuple  # of (Fact, prob)

    def __post_init__(self):
        entries = tuple((f, check_unit(as_prob(p), f"marginal of {f}")) for f, p in self.entries)
        object.__setattr__(self, "entries", entries)
        facts = [f for f, _ in entries]
        if len(set(facts)) != len(facts):
            raise ModelError("duplicate fact in family")

    is_finite = True

    def __len__(self):
        return len(self.entries)

    def facts(self, n: int | None = None) -> list:
        return list(self.entries if n is None else self.entries[:n])

    def marginal(self, f: Fact):
        for g, p in self.entries:
            if g == f:
                return p
        return Fraction(0)


@dataclass(frozen=True)
class ParametricFamily:
    law: object
    template: Template

    is_finite = False

    def facts(self, n: int | None = None) -> list:
        if n is None:
            raise ModelError("a countable family needs a truncation")
        return [(self.template.fact(i), self.law.p(i)) for i in range(1, n + 1)]

    def marginal(self, f: Fact):
        i = self.template.index_of(f)
        return Fraction(0) if i is None else self.law.p(i)


@dataclass(frozen=True)
class TiPdb:
    schema: Schema
    family: object

    def __post_init__(self):
        if isinstance(self.family, ExplicitFamily):
            for f, _ in self.family.entries:
                self.schema.check_fact(f)
        else:
            t = self.family.template
            if self.schema.arity(t.relation) != t.arity:
                raise SchemaError(f"template relation {t.relation} has wrong arity")

    @property
    def is_finite(self) -> bool:
        return self.family.is_finite


@dataclass(frozen=True)
class BidPdb:
    schema: Schema
    blocks: tuple  # of tuples of (Fact, Fraction)

    def __post_init__(self):
        blocks = []
        seen = set()
        for block in self.blocks:
            entries = []
            for f, p in block:
                p = as_prob(p)
                if isinstance(p, PowProb):
                    raise ModelError("block probabilities must be rational")
                check_unit(p, f"probability of {f}")
                self.schema.check_fact(f)
                if f in seen:
                    raise ModelError(f"fact {f} occurs in more than one block")
                seen.add(f)
                entries.append((f, p))
            if sum((p for _, p in entries), Fraction(0)) > 1:
                raise ModelError("block probabilities sum to more than 1")
            blocks.append(tuple(entries))
        object.__setattr__(self, "blocks", tuple(blocks))

    is_finite = True

    def residual(self, i: int) -> Fraction:
        return 1 - sum((p for _, p in self.blocks[i]), Fraction(0))

    @property
    def residuals(self) -> tuple:
        return tuple(self.residual(i) for i in range(len(self.blocks)))


@dataclass(frozen=True)
class ExplicitPdb:
    schema: Schema
    worlds: tuple  # of (Instance, Fraction)

    def __post_init__(self):
        worlds = []
        seen = set()
        for inst, p in self.worlds:
            if not isinstance(inst, Instance):
                inst = Instance(inst)
            p = as_prob(p)
            if isinstance(p, PowProb):
                raise ModelError("explicit world probabilities must be rational")
            check_unit(p, "world probability")
            inst.check(self.schema)
            if inst in seen:
                raise ModelError(f"world {inst} listed twice")
            seen.add(inst)
            worlds.append((inst, p))
        total = sum((p for _, p in worlds), Fraction(0))
        if total != 1:
            raise ModelError(f"world probabilities sum to {total}, not 1")
        object.__setattr__(self, "worlds", tuple(worlds))

    is_finite = True

    def support(self) -> list:
        return [(i, p) for i, p in self.worlds if p]


@dataclass(frozen=True)
class SizeLawPdb:
    """Countable PDB given by its size law: world i has size base^i and
    probability a * ratio^i. Worlds are realised as R(i, 1..size) when
    materialised."""

    a: Fraction
    ratio: Fraction
    size_base: int
    relation: str = "R"

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "ratio", Fraction(self.ratio))
        if not 0 < self.ratio < 1 or self.a <= 0:
            raise ModelError("size law needs a > 0 and 0 < ratio < 1")
        if self.a * self.ratio / (1 - self.ratio) != 1:
            raise ModelError("size law probabilities must sum to 1")
        if not isinstance(self.size_base, int) or self.size_base < 1:
            raise ModelError("size base must be a positive integer")

    is_finite = False

    @property
    def schema(self) -> Schema:
        return Schema(((self.relation, 2),))

    def size(self, i: int) -> int:
        return self.size_base ** i

    def p(self, i: int) -> Fraction:
        return self.a * self.ratio ** i

    def world(self, i: int) -> Instance:
        return Instance(Fact(self.relation, (i, j)) for j in range(1, self.size(i) + 1))


@dataclass(frozen=True)
class SquareDecayPdb:
    """Countable PDB with |D_i| = size_mult * i and P(D_i) proportional to
    base^(-i^2). A window of n worlds is renormalised over those n worlds, so
    its probabilities stay rational."""

    base: int = 2
    size_mult: int = 1
    relation: str = "R"

    def __post_init__(self):
        if not isinstance(self.base, int) or self.base < 2:
            raise ModelError("square decay needs an integer base >= 2")
        if not isinstance(self.size_mult, int) or self.size_mult < 1:
            raise ModelError("size multiplier must be a positive integer")

    is_finite = False

    @property
    def schema(self) -> Schema:
        return Schema(((self.relation, 2),))

    def size(self, i: int) -> int:
        return self.size_mult * i

    def weight(self, i: int) -> Fraction:
        return Fraction(1, self.base ** (i * i))

    def normalizer(self, n: int) -> Fraction:
        """Z_n with Z_n * sum_{i<=n} weight(i) = 1."""
        return 1 / sum((self.weight(i) for i in range(1, n + 1)), Fraction(0))

    def p(self, i: int, n: int) -> Fraction:
        return self.normalizer(n) * self.weight(i)

    def world(self, i: int) -> Instance:
        return Instance(Fact(self.relation, (i, j)) for j in range(1, self.size(i) + 1))

    def window(self, n: int) -> ExplicitPdb:
        z = self.normalizer(n)
        return ExplicitPdb(self.schema, tuple((self.world(i), z * self.weight(i)) for i in range(1, n + 1)))


def ti_new(schema: Schema, family) -> TiPdb:
    if isinstance(family, (list, tuple)):
        family = ExplicitFamily(tuple(family))
    return TiPdb(schema, family)


def ti_from_facts(facts_probs, schema: Schema | None = None) -> TiPdb:
    facts_probs = [(f, p) for f, p in facts_probs]
    if schema is None:
        schema = Schema(tuple(sorted({(f.relation, len(f.args)) for f, _ in facts_probs})))
    return TiPdb(schema, ExplicitFamily(tuple(facts_probs)))


def bid_new(schema: Schema, blocks) -> BidPdb:
    return BidPdb(schema, tuple(tuple(b) for b in blocks))


def explicit_new(schema: Schema, worlds) -> ExplicitPdb:
    return ExplicitPdb(schema, tuple(worlds))


def schema_of_facts(facts) -> Schema:
    rels = {}
    for f in facts:
        if rels.setdefault(f.relation, len(f.args)) != len(f.args):
            raise SchemaError(f"relation {f.relation} used with two arities")
    return Schema(tuple(sorted(rels.items())))


def marginal(pdb, f: Fact):
    if isinstance(pdb, TiPdb):
        return pdb.family.marginal(f)
    if isinstance(pdb, BidPdb):
        for block in pdb.blocks:
            for g, p in block:
                if g == f:
                    return p
        return Fraction(0)
    if isinstance(pdb, ExplicitPdb):
        return sum((p for inst, p in pdb.worlds if f in inst), Fraction(0))
    if isinstance(pdb, SizeLawPdb):
        if f.relation == pdb.relation and len(f.args) == 2 and type(f.args[0]) is int \
                and f.args[0] >= 1 and type(f.args[1]) is int and 1 <= f.args[1] <= pdb.size(f.args[0]):
            return pdb.p(f.args[0])
        return Fraction(0)
    raise TypeError(f"not a PDB: {pdb!r}")
