"""Probability assignments on a given set of worlds: one that satisfies the
series condition (hence representable) and one with infinite expected size."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import ModelError
from ..probspace.model import ExplicitPdb, schema_of_facts
from ..probspace.radicals import RadicalSum
from ..probspace.worlds import Distribution
from ..relmodel.atoms import Instance


def representable_weight(i: int, size: int) -> Fraction:
    """z_i = (2^-i / |D_i|)^|D_i|, and 1 for the empty instance."""
    if size == 0:
        return Fraction(1)
    return (Fraction(1, 2 ** i) / size) ** size


def assign_representable_probs(worlds) -> ExplicitPdb:
    """P(D_i) = z_i / Z for worlds D_1, D_2, ... in the given order."""
    worlds = [w if isinstance(w, Instance) else Instance(w) for w in worlds]
    if not worlds:
        raise ModelError("need at least one world")
    if len(set(worlds)) != len(worlds):
        raise ModelError("duplicate worlds")
    zs = [representable_weight(i, len(w)) for i, w in enumerate(worlds, start=1)]
    total = sum(zs, Fraction(0))
    schema = schema_of_facts([f for w in worlds for f in w])
    return ExplicitPdb(schema, tuple((w, z / total) for w, z in zip(worlds, zs)))


def representable_term_identity(pdb: ExplicitPdb, i: int) -> tuple:
    """Both sides of |D_i| (z_i/Z)^(1/|D_i|) = 2^-i (1/Z)^(1/|D_i|) as exact
    radical values (i counts from 1, D_i non-empty)."""
    world, p = pdb.worlds[i - 1]
    s = len(world)
    if s == 0:
        raise ModelError("the identity is stated for non-empty worlds")
    total = sum((representable_weight(j, len(w)) for j, (w, _) in enumerate(pdb.worlds, start=1)),
                Fraction(0))
    lhs = RadicalSum.power(p, Fraction(1, s), s)
    rhs = RadicalSum.power(1 / total, Fraction(1, s), Fraction(1, 2 ** i))
    return lhs, rhs


@dataclass(frozen=True)
class DivergentAssignment:
    worlds: tuple  # of (Instance, Fraction), in input order
    subsequence: tuple  # positions (from 1) of the chosen worlds D_{i_k}

    @property
    def mass(self) -> Fraction:
        return sum((p for _, p in self.worlds), Fraction(0))

    def distribution(self) -> Distribution:
        return Distribution(dict(self.worlds), complete=self.mass == 1)

    def size_partial_sums(self) -> list:
        """sum_{k<=K} |D_{i_k}| p_k for K = 1, 2, ..."""
        out, acc = [], Fraction(0)
        for pos in self.subsequence:
            w, p = self.worlds[pos - 1]
            acc += len(w) * p
            out.append(acc)
        return out


def subsequence_mass(k: int) -> Fraction:
    return Fraction(1, 2 * k * (k + 1))


def assign_divergent_probs(worlds, horizon: int) -> DivergentAssignment:
    """Greedy subsequence with |D_{i_k}| >= k gets 1/(2k(k+1)); the j-th
    remaining world gets 2^-(j+1), so the window carries mass < 1 and the
    expected size of the full family is infinite."""
    window = []
    for w in worlds:
        if len(window) >= horizon:
            break
        window.append(w if isinstance(w, Instance) else Instance(w))
    if len(set(window)) != len(window):
        raise ModelError("duplicate worlds")
    chosen, k = [], 1
    for pos, w in enumerate(window, start=1):
        if len(w) >= k:
            chosen.append(pos)
            k += 1
    if not chosen:
        raise ModelError("the horizon has no world of size >= 1")
    masses = {}
    for k, pos in enumerate(chosen, start=1):
        masses[pos] = subsequence_mass(k)
    j = 0
    out = []
    for pos, w in enumerate(window, start=1):
        if pos not in masses:
            j += 1
            masses[pos] = Fraction(1, 2 ** (j + 1))
        out.append((w, masses[pos]))
    return DivergentAssignment(tuple(out), tuple(chosen))


__all__ = ["assign_representable_probs", "representable_term_identity", "representable_weight",
           "assign_divergent_probs", "DivergentAssignment", "subsequence_mass"]
