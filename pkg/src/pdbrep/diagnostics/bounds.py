"""Moment inequality, view-probability bound and moment reports."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ModelError, NotApplicable
from ..probspace.model import TiPdb
from ..probspace.moments import moment, moment_upper
from ..probspace.radicals import RadicalSum, normalize
from ..probspace.worlds import WORLD_GUARD, enumerate_worlds, pushforward
from ..relmodel.atoms import Instance, atom_key
from ..relmodel.evaluate import View, apply_view


@dataclass(frozen=True)
class MomentCheck:
    k: int
    lhs: Fraction  # E(X^k)
    rhs: Fraction  # E(X^(k-1)) (k - 1 + E(X))
    holds: bool


def moment_inequality_check(ti: TiPdb, k_max: int, trunc: int | None = None,
                            guard: int = WORLD_GUARD) -> list:
    """Exact E(X^k) <= E(X^(k-1)) (k-1+E(X)) for k = 2..k_max, X the size."""
    dist = enumerate_worlds(ti, trunc, guard)
    if dist.normalizer != 1 or not all(isinstance(w, Fraction) for w in dist.weights.values()):
        raise ModelError("the moment check needs rational marginals")
    moments = [sum((w * len(i) ** k for i, w in dist.weights.items()), Fraction(0))
               for k in range(k_max + 1)]
    out = []
    for k in range(2, k_max + 1):
        rhs = moments[k - 1] * (k - 1 + moments[1])
        out.append(MomentCheck(k, moments[k], rhs, moments[k] <= rhs))
    return out


@dataclass(frozen=True)
class BoundReport:
    target: Instance
    A_star: tuple
    F_star: tuple  # base facts meeting A_star
    r: int
    bound: object  # RadicalSum, or Fraction when rational
    actual: Fraction
    holds: bool


def view_prob_bound(ti: TiPdb, view: View, target: Instance, guard: int = WORLD_GUARD) -> BoundReport:
    """Pr(view(I) = target) against |A|(r^2 |A|^(r-1) sum_{f in F} p_f)^(|A|/r).

    A is the active domain of the target minus the view constants, F the base
    facts mentioning an element of A, r the maximum base arity.
    """
    consts = view.constants()
    a_star = tuple(sorted(target.adom() - consts, key=atom_key))
    if not a_star:
        raise NotApplicable("every element of the target is a view constant")
    r = ti.schema.max_arity
    if r == 0:
        raise NotApplicable("the base schema has only nullary relations")
    aset = set(a_star)
    f_star = tuple(f for f, p in ti.family.facts() if aset & set(f.args))
    mass = sum((ti.family.marginal(f) for f in f_star), Fraction(0))
    a = len(a_star)
    inner = Fraction(r * r) * Fraction(a) ** (r - 1) * mass
    bound = normalize(RadicalSum.power(inner, Fraction(a, r), a)) if inner else Fraction(0)
    dist = enumerate_worlds(ti, None, guard)
    actual = normalize(sum((w for i, w in dist.weights.items() if apply_view(view, i) == target),
                           Fraction(0)))
    if not isinstance(actual, Fraction):
        raise ModelError("the bound check needs rational marginals")
    # actual <= a * inner^(a/r)  iff  actual^r <= a^r * inner^a
    holds = actual ** r <= Fraction(a) ** r * inner ** a
    return BoundReport(target, a_star, f_star, r, bound, actual, holds)


@dataclass(frozen=True)
class MomentRow:
    k: int
    partial: object  # exact partial sum (or None when not computed)
    tail_bound: object  # Fraction, or None when the moment is infinite
    upper: object  # partial + tail, or a bound through the view; None if infinite

    @property
    def finite(self) -> bool:
        return self.upper is not None


def image_moment_upper(view: View, base, k: int, trunc: int | None = None):
    """Bound on E(|view(I)|^k) from the base moments.

    |view(I)| <= m (r|I| + C)^s (see view_size_bound), so E(|view(I)|^k) is at most
    m^k sum_j binom(sk, j) r^j C^(sk-j) E(|I|^j).
    """
    m = len(view.queries)
    s = max((q.arity for q in view.queries), default=0)
    r = view.input_schema.max_arity if view.input_schema is not None else 1
    c = len(view.constants())
    total = Fraction(0)
    for j in range(s * k + 1):
        ej = Fraction(1) if j == 0 else moment_upper(base, j, trunc)
        if ej is None:
            return None
        total += math.comb(s * k, j) * Fraction(r) ** j * Fraction(c) ** (s * k - j) * ej
    return Fraction(m) ** k * total


def finite_moments_report(pdb, k_max: int, trunc: int | None = None) -> list:
    """Per k: partial sum, tail bound and overall upper bound.

    pdb may also be a Representation without condition; then the partial
    sum is the exact moment of the image over the base window and the upper
    bound goes through the view size bound.
    """
    from ..compilers.representation import Representation
    rows = []
    if isinstance(pdb, Representation):
        if pdb.condition is not None:
            raise ModelError("moment reports take unconditioned representations")
        partial_dist = None
        if pdb.base.is_finite or trunc is not None:
            partial_dist = pushforward(enumerate_worlds(pdb.base, trunc), pdb.view)
        for k in range(1, k_max + 1):
            partial = None
            if partial_dist is not None:
                partial = normalize(sum((w * len(i) ** k for i, w in partial_dist.weights.items()),
                                        Fraction(0)))
            if pdb.base.is_finite and trunc is None:
                # the image of a finite base is finite, so the partial sum is exact
                rows.append(MomentRow(k, partial, Fraction(0), partial))
                continue
            upper = image_moment_upper(pdb.view, pdb.base, k, trunc)
            tail = None
            if upper is not None and partial is not None:
                tail = normalize(upper - partial)
            rows.append(MomentRow(k, partial, tail, upper))
        return rows
    for k in range(1, k_max + 1):
        m = moment(pdb, k, trunc)
        upper = None if m.tail_bound is None else normalize(m.partial + m.tail_bound)
        rows.append(MomentRow(k, m.partial, m.tail_bound, upper))
    return rows


def disjoint_inequality_table(r: int, ns, a=None, d=None, z: float = 6 / math.pi ** 2) -> list:
    """Rows (n, d_n, Z/n^2, d_n (a_n d_n^(r-1))^(d_n/r)) for the domain-disjoint
    necessary condition; defaults a_n = 1/n and d_n = ceil(log n)."""
    a = a or (lambda n: 1 / n)
    d = d or (lambda n: math.ceil(math.log(n)))
    rows = []
    for n in ns:
        dn = d(n)
        rhs = dn * (a(n) * dn ** (r - 1)) ** (dn / r) if dn else 0.0
        rows.append((n, dn, z / n ** 2, rhs))
    return rows


__all__ = ["MomentCheck", "moment_inequality_check", "BoundReport", "view_prob_bound",
           "MomentRow", "image_moment_upper", "finite_moments_report",
           "disjoint_inequality_table"]
