"""World enumeration, push-forwards, conditioning, comparison and sampling."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from ..errors import GuardExceeded, ModelError, NullEventError
from ..relmodel.atoms import Instance
from ..relmodel.evaluate import apply_view, eval_formula
from ..relmodel.formula import free_vars
from .model import BidPdb, ExplicitPdb, SizeLawPdb, SquareDecayPdb, TiPdb
from .radicals import PowProb, RadicalSum, compare, normalize

WORLD_GUARD = 2 ** 25


class Distribution:
    """Finite-support law on instances.

    Probabilities are weight / normalizer. The normalizer is folded into the
    weights whenever it is rational, so it is 1 except after conditioning on
    an event whose probability is irrational.
    """

    __slots__ = ("weights", "normalizer", "complete")

    def __init__(self, weights: dict, normalizer=Fraction(1), complete: bool = True):
        self.weights = {i: w for i, w in weights.items() if not _is_zero(w)}
        self.normalizer = normalize(normalizer)
        self.complete = complete
        if isinstance(self.normalizer, Fraction) and self.normalizer != 1:
            n = self.normalizer
            self.weights = {i: normalize(w / n) for i, w in self.weights.items()}
            self.normalizer = Fraction(1)

    def prob(self, inst: Instance):
        w = self.weights.get(inst, Fraction(0))
        if self.normalizer == 1:
            return w
        raise ArithmeticError("probability has an irrational normalizer; use weights")

    def items(self) -> list:
        return sorted(self.weights.items(), key=lambda kv: kv[0].sort_key())

    def support(self) -> list:
        return [i for i, _ in self.items()]

    def total(self):
        return normalize(sum(self.weights.values(), Fraction(0)))

    def __len__(self):
        return len(self.weights)

    def __repr__(self):
        inner = ", ".join(f"{i!r}: {w}" for i, w in self.items())
        return f"Distribution({{{inner}}})"


def _is_zero(w) -> bool:
    if isinstance(w, RadicalSum):
        return w.is_zero()
    return w == 0


def _lift(p):
    return p.to_radical() if isinstance(p, PowProb) else p


def _window(pdb, trunc):
    if isinstance(pdb, TiPdb):
        fam = pdb.family
        if fam.is_finite:
            entries = fam.facts(trunc)
            complete = trunc is None or trunc >= len(fam)
        else:
            if trunc is None:
                raise ModelError("a countable TI family needs a truncation")
            entries = fam.facts(trunc)
            complete = False
        return entries, complete
    raise TypeError


def enumerate_worlds(pdb, trunc: int | None = None, guard: int = WORLD_GUARD) -> Distribution:
    """Exact law of the PDB (or of its first `trunc` facts/worlds)."""
    if isinstance(pdb, TiPdb):
        entries, complete = _window(pdb, trunc)
        certain = [f for f, p in entries if p == 1]
        uncertain = [(f, _lift(p)) for f, p in entries if not (p == 0 or p == 1)]
        if 2 ** len(uncertain) > guard:
            raise GuardExceeded(f"{2 ** len(uncertain)} worlds exceed the guard {guard}")
        worlds = [((), Fraction(1))]
        for f, p in uncertain:
            q = 1 - p
            nxt = []
            for facts, w in worlds:
                nxt.append((facts, w * q))
                nxt.append((facts + (f,), w * p))
            worlds = nxt
        out = {}
        base = tuple(certain)
        for facts, w in worlds:
            if _is_zero(w):
                continue
            inst = Instance(base + facts)
            out[inst] = out.get(inst, 0) + w
        return Distribution({i: normalize(w) for i, w in out.items()}, complete=complete)
    if isinstance(pdb, BidPdb):
        count = 1
        for i, block in enumerate(pdb.blocks):
            count *= sum(1 for _, p in block if p) + (1 if pdb.residual(i) else 0)
        if count > guard:
            raise GuardExceeded(f"{count} worlds exceed the guard {guard}")
        worlds = [((), Fraction(1))]
        for i, block in enumerate(pdb.blocks):
            options = [((f,), p) for f, p in block if p]
            r = pdb.residual(i)
            if r:
                options.append(((), r))
            worlds = [(facts + extra, w * p) for facts, w in worlds for extra, p in options]
        out = {}
        for facts, w in worlds:
            inst = Instance(facts)
            out[inst] = out.get(inst, 0) + w
        return Distribution(out)
    if isinstance(pdb, SquareDecayPdb):
        if trunc is None:
            raise ModelError("a countable family needs a truncation")
        if pdb.size(trunc) * trunc > guard:
            raise GuardExceeded("materialised worlds exceed the guard")
        dist = enumerate_worlds(pdb.window(trunc))
        dist.complete = False
        return dist
    if isinstance(pdb, ExplicitPdb):
        worlds = pdb.worlds if trunc is None else pdb.worlds[:trunc]
        complete = trunc is None or trunc >= len(pdb.worlds)
        return Distribution(dict(worlds), complete=complete)
    if isinstance(pdb, SizeLawPdb):
        if trunc is None:
            raise ModelError("a countable size law needs a truncation")
        if sum(pdb.size(i) for i in range(1, trunc + 1)) > guard:
            raise GuardExceeded("materialised worlds exceed the guard")
        return Distribution({pdb.world(i): pdb.p(i) for i in range(1, trunc + 1)}, complete=False)
    raise TypeError(f"not a PDB: {pdb!r}")


def conditioned_worlds(pdb: TiPdb, condition, trunc: int | None = None,
                       guard: int = WORLD_GUARD) -> Distribution:
    """enumerate_worlds followed by conditioning, for a TI.

    The condition is tested on bare instances first, and weights are built
    only for the surviving worlds (sharing common prefixes), which matters
    when marginals are radicals and few worlds survive.
    """
    if free_vars(condition):
        raise ModelError("a condition must be a sentence")
    entries, complete = _window(pdb, trunc)
    certain = tuple(f for f, p in entries if p == 1)
    uncertain = [(f, _lift(p)) for f, p in entries if not (p == 0 or p == 1)]
    n = len(uncertain)
    if 2 ** n > guard:
        raise GuardExceeded(f"{2 ** n} worlds exceed the guard {guard}")
    kept = []
    for mask in range(1 << n):
        inst = Instance(certain + tuple(uncertain[j][0] for j in range(n) if mask >> j & 1))
        _, rows = eval_formula(condition, inst)
        if rows:
            kept.append((mask, inst))
    weights = {}

    def build(idx, w, group):
        if idx == n:
            for _, inst in group:
                weights[inst] = weights.get(inst, 0) + w
            return
        p = uncertain[idx][1]
        off = [g for g in group if not g[0] >> idx & 1]
        on = [g for g in group if g[0] >> idx & 1]
        if off:
            build(idx + 1, w * (1 - p), off)
        if on:
            build(idx + 1, w * p, on)

    if kept:
        build(0, Fraction(1), kept)
    weights = {i: normalize(w) for i, w in weights.items() if not _is_zero(w)}
    mass = normalize(sum(weights.values(), Fraction(0)))
    if _is_zero(mass):
        raise NullEventError("the condition has probability zero")
    return Distribution(weights, mass, complete)


def pushforward(dist: Distribution, view) -> Distribution:
    out = {}
    for inst, w in dist.weights.items():
        img = apply_view(view, inst)
        out[img] = out.get(img, 0) + w
    return Distribution({i: normalize(w) for i, w in out.items()}, dist.normalizer, dist.complete)


def event_weight(dist: Distribution, condition):
    if free_vars(condition):
        raise ModelError("a condition must be a sentence")
    total = Fraction(0)
    for inst, w in dist.weights.items():
        _, rows = eval_formula(condition, inst)
        if rows:
            total = total + w
    return normalize(total)


def condition_distribution(dist: Distribution, condition) -> Distribution:
    if free_vars(condition):
        raise ModelError("a condition must be a sentence")
    kept = {}
    for inst, w in dist.weights.items():
        _, rows = eval_formula(condition, inst)
        if rows:
            kept[inst] = w
    mass = normalize(sum(kept.values(), Fraction(0)))
    if _is_zero(mass):
        raise NullEventError("the condition has probability zero")
    return Distribution(kept, mass, dist.complete)


@dataclass(frozen=True)
class Comparison:
    verdict: str  # "equal", "not_equal" or "indeterminate"
    witness: Instance | None = None
    left: object = None
    right: object = None

    def __bool__(self):
        return self.verdict == "equal"


def distributions_equal(d1: Distribution, d2: Distribution) -> Comparison:
    """Exact comparison of two laws (cross-multiplied by their normalizers).

    Values are held in canonical radical form, which decides equality, so
    the "indeterminate" verdict is never produced here.
    """
    keys = set(d1.weights) | set(d2.weights)
    for inst in sorted(keys, key=Instance.sort_key):
        a = d1.weights.get(inst, Fraction(0))
        b = d2.weights.get(inst, Fraction(0))
        lhs = normalize(_lift(a) * _lift(d2.normalizer)) if d2.normalizer != 1 else a
        rhs = normalize(_lift(b) * _lift(d1.normalizer)) if d1.normalizer != 1 else b
        if not normalize(lhs) == normalize(rhs):
            return Comparison("not_equal", inst, a, b)
    return Comparison("equal")


# sampling

def _bernoulli(rng: random.Random, p) -> bool:
    if isinstance(p, Fraction):
        return rng.randrange(p.denominator) < p.numerator
    u = Fraction(rng.getrandbits(64), 2 ** 64)
    return compare(p, u) == 1


def _categorical(rng: random.Random, probs) -> int:
    """Index drawn with the given rational probabilities (summing to 1)."""
    den = math.lcm(*(p.denominator for p in probs))
    x = rng.randrange(den)
    acc = 0
    for i, p in enumerate(probs):
        acc += p.numerator * (den // p.denominator)
        if x < acc:
            return i
    return len(probs) - 1


def sample(pdb, rng: random.Random, trunc: int | None = None) -> Instance:
    """One world drawn from the PDB (or from its window of `trunc` facts)."""
    if isinstance(pdb, TiPdb):
        entries, _ = _window(pdb, trunc)
        return Instance(f for f, p in entries if _bernoulli(rng, p))
    if isinstance(pdb, BidPdb):
        facts = []
        for i, block in enumerate(pdb.blocks):
            opts = [f for f, _ in block] + [None]
            probs = [p for _, p in block] + [pdb.residual(i)]
            choice = opts[_categorical(rng, probs)]
            if choice is not None:
                facts.append(choice)
        return Instance(facts)
    if isinstance(pdb, SquareDecayPdb):
        return sample(pdb.window(20 if trunc is None else trunc), rng)
    if isinstance(pdb, ExplicitPdb):
        worlds = [w for w, _ in pdb.worlds]
        return worlds[_categorical(rng, [p for _, p in pdb.worlds])]
    if isinstance(pdb, SizeLawPdb):
        # P(index <= n) = 1 - ratio^n
        x = Fraction(rng.getrandbits(64), 2 ** 64)
        i = 1
        while 1 - pdb.ratio ** i <= x:
            i += 1
        return pdb.world(i)
    raise TypeError(f"not a PDB: {pdb!r}")


def sample_many(pdb, seed: int, n: int, trunc: int | None = None) -> list:
    rng = random.Random(seed)
    return [sample(pdb, rng, trunc) for _ in range(n)]
