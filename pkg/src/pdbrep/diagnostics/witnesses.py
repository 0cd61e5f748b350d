"""Worlds-level witnesses against monotone representations."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from ..probspace.worlds import Distribution
from ..relmodel.atoms import Fact


@dataclass(frozen=True)
class Witness:
    kind: str  # "mutual_exclusive", "no_max_world" or "max_world"
    payload: tuple  # two facts, two instances or one instance


def _facts_of(dist: Distribution) -> list:
    return sorted({f for inst in dist.weights for f in inst}, key=Fact.sort_key)


def mutual_exclusive_witness(dist: Distribution):
    """Two facts of positive marginal that never occur together, or None."""
    facts = _facts_of(dist)
    together = set()
    for inst in dist.weights:
        fs = sorted(inst, key=Fact.sort_key)
        together.update(combinations(fs, 2))
    for f, g in combinations(facts, 2):
        if (f, g) not in together:
            return Witness("mutual_exclusive", (f, g))
    return None


def max_world_check(dist: Distribution) -> Witness:
    """MaxWorld(D) if one world contains all others, else two incomparable
    inclusion-maximal worlds."""
    worlds = [i for i, _ in dist.items()]
    if not worlds:
        raise ValueError("empty distribution")
    sets = [i.fact_set for i in worlds]
    maximal = [w for w, s in zip(worlds, sets) if not any(s < t for t in sets)]
    if len(maximal) == 1:
        return Witness("max_world", (maximal[0],))
    return Witness("no_max_world", (maximal[0], maximal[1]))
