"""Size moments E(|D|^k): exact partial sums plus certified tail bounds."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import ModelError
from .model import BidPdb, ExplicitPdb, SizeLawPdb, SquareDecayPdb, TiPdb
from .radicals import PowProb, normalize


@dataclass(frozen=True)
class MomentBound:
    """partial = moment of the truncation window; the full moment lies in
    [partial, partial + tail_bound]. tail_bound None means the moment is
    infinite."""

    k: int
    n: int | None
    partial: object
    tail_bound: object

    @property
    def finite(self) -> bool:
        return self.tail_bound is not None

    @property
    def exact(self) -> bool:
        return self.tail_bound == 0


def count_law(probs) -> list:
    """Law of a sum of independent Bernoullis: list of P(X = j)."""
    law = [Fraction(1)]
    for p in probs:
        p = p.to_radical() if isinstance(p, PowProb) else p
        q = 1 - p
        nxt = [0] * (len(law) + 1)
        for j, w in enumerate(law):
            nxt[j] = nxt[j] + w * q
            nxt[j + 1] = nxt[j + 1] + w * p
        law = nxt
    return [normalize(w) for w in law]


def _law_moment(law, k: int):
    return normalize(sum((w * j ** k for j, w in enumerate(law)), Fraction(0)))


def _recursive_upper(first, k: int):
    """Upper bounds U_1..U_k with U_j = U_{j-1} (j - 1 + U_1)."""
    ups = [Fraction(1), first]
    for j in range(2, k + 1):
        ups.append(ups[-1] * (j - 1 + first))
    return ups


def moment(pdb, k: int, trunc: int | None = None) -> MomentBound:
    if k < 1:
        raise ModelError("moment order must be >= 1")
    if isinstance(pdb, TiPdb):
        fam = pdb.family
        if fam.is_finite:
            entries = fam.facts(trunc)
            rest = fam.facts()[len(entries):]
            tail1 = sum((p for _, p in rest), Fraction(0)) if rest else Fraction(0)
            n = len(entries)
        else:
            if trunc is None:
                raise ModelError("a countable TI family needs a truncation")
            entries = fam.facts(trunc)
            tail1 = fam.law.tail(trunc)
            n = trunc
        law = count_law([p for _, p in entries])
        partial = _law_moment(law, k)
        if tail1 == 0:
            return MomentBound(k, n, partial, Fraction(0))
        if any(isinstance(p, PowProb) for _, p in entries):
            raise ModelError("tail bounds need rational marginals")
        upper = _recursive_upper(_law_moment(law, 1) + tail1, k)[k]
        return MomentBound(k, n, partial, upper - partial)
    if isinstance(pdb, BidPdb):
        law = count_law([sum((p for _, p in b), Fraction(0)) for b in pdb.blocks])
        return MomentBound(k, None, _law_moment(law, k), Fraction(0))
    if isinstance(pdb, ExplicitPdb):
        total = sum((p * len(inst) ** k for inst, p in pdb.worlds), Fraction(0))
        return MomentBound(k, None, total, Fraction(0))
    if isinstance(pdb, SquareDecayPdb):
        if trunc is None:
            raise ModelError("a countable family needs a truncation")
        return MomentBound(k, trunc, moment(pdb.window(trunc), k).partial, Fraction(0))
    if isinstance(pdb, SizeLawPdb):
        if trunc is None:
            raise ModelError("a countable size law needs a truncation")
        rho = Fraction(pdb.size_base) ** k * pdb.ratio
        partial = sum((pdb.p(i) * pdb.size(i) ** k for i in range(1, trunc + 1)), Fraction(0))
        if rho >= 1:
            return MomentBound(k, trunc, partial, None)
        return MomentBound(k, trunc, partial, pdb.a * rho ** (trunc + 1) / (1 - rho))
    raise TypeError(f"not a PDB: {pdb!r}")


def moment_upper(pdb, k: int, trunc: int | None = None):
    """Upper bound on E(|D|^k), or None if infinite."""
    m = moment(pdb, k, trunc)
    if m.tail_bound is None:
        return None
    return normalize(m.partial + m.tail_bound)
