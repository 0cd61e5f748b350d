"""Syntactic fragment classification: SjfCQ < CQ < UCQ < FO."""
from __future__ import annotations

from enum import IntEnum

from .formula import And, Eq, Exists, Formula, Or, Rel, subformulas


class Fragment(IntEnum):
    SJFCQ = 0
    CQ = 1
    UCQ = 2
    FO = 3

    @property
    def label(self) -> str:
        return {0: "SjfCQ", 1: "CQ", 2: "UCQ", 3: "FO"}[int(self)]

    def __str__(self):
        return self.label


def classify(f: Formula) -> Fragment:
    """Smallest fragment containing f.

    CQs are built from relational and equality atoms with conjunction and
    existential quantification; UCQs additionally allow disjunction.
    """
    kinds = set()
    names = []
    for g in subformulas(f):
        t = type(g)
        if t is Rel:
            names.append(g.name)
        elif t in (Eq, And, Exists):
            pass
        elif t is Or:
            kinds.add("or")
        else:
            return Fragment.FO
    if "or" in kinds:
        return Fragment.UCQ
    if len(set(names)) == len(names):
        return Fragment.SJFCQ
    return Fragment.CQ


classify_fragment = classify


def classify_view(view) -> Fragment:
    return max((classify(q.formula) for q in view.queries), default=Fragment.SJFCQ)


def is_monotone_syntax(f: Formula) -> bool:
    return classify(f) <= Fragment.UCQ
