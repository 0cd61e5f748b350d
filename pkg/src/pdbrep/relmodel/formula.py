"""First-order formula AST, traversal helpers and the canonical printer."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable

from .atoms import BOT, CopyIdx, atom_key, check_atom


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Const:
    value: object

    def __post_init__(self):
        check_atom(self.value)

    def __repr__(self):
        return format_atom(self.value)


Term = "Var | Const"


def term(x) -> "Var | Const":
    """Var and Const pass through; any other value becomes a Const."""
    if isinstance(x, (Var, Const)):
        return x
    return Const(x)


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True, slots=True, eq=True)
class Rel(Formula):
    name: str
    terms: tuple

    def __post_init__(self):
        if not isinstance(self.terms, tuple):
            object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True, slots=True)
class Eq(Formula):
    left: object
    right: object


@dataclass(frozen=True, slots=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class Forall(Formula):
    var: str
    body: Formula


def rel(name: str, *terms) -> Rel:
    return Rel(name, tuple(terms))


def conj(parts: Iterable[Formula]):
    """Left-associated conjunction, or None when empty (meaning true)."""
    out = None
    for p in parts:
        out = p if out is None else And(out, p)
    return out


def disj(parts: Iterable[Formula]):
    """Left-associated disjunction, or None when empty (meaning false)."""
    out = None
    for p in parts:
        out = p if out is None else Or(out, p)
    return out


def exists_many(names: Iterable[str], body: Formula) -> Formula:
    for n in reversed(list(names)):
        body = Exists(n, body)
    return body


def neq(a, b) -> Formula:
    return Not(Eq(a, b))


def tuple_eq(vars_: Iterable, values: Iterable):
    """Conjunction of componentwise equalities (None if nullary)."""
    return conj(Eq(v, Const(c) if not isinstance(c, (Var, Const)) else c) for v, c in zip(vars_, values))


def flatten_and(f: Formula) -> list:
    out = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, And):
            stack.append(g.right)
            stack.append(g.left)
        else:
            out.append(g)
    return out


def flatten_or(f: Formula) -> list:
    out = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Or):
            stack.append(g.right)
            stack.append(g.left)
        else:
            out.append(g)
    return out


def _term_vars(ts) -> set:
    return {t.name for t in ts if isinstance(t, Var)}


# id-keyed caches; entries hold the formula so the id stays valid
_FREE_CACHE: dict = {}
_CONST_CACHE: dict = {}
_CACHE_LIMIT = 500_000


def free_vars(f: Formula) -> frozenset:
    if len(_FREE_CACHE) > _CACHE_LIMIT:
        _FREE_CACHE.clear()
    return _free(f, _FREE_CACHE)


def _free(f, cache):
    key = id(f)
    hit = cache.get(key)
    if hit is not None:
        return hit[1]
    t = type(f)
    if t is Rel:
        r = frozenset(_term_vars(f.terms))
    elif t is Eq:
        r = frozenset(_term_vars((f.left, f.right)))
    elif t is Not:
        r = _free(f.sub, cache)
    elif t is And or t is Or:
        r = _free(f.left, cache) | _free(f.right, cache)
    elif t is Exists or t is Forall:
        r = _free(f.body, cache) - {f.var}
    else:
        raise TypeError(f"not a formula: {f!r}")
    cache[key] = (f, r)
    return r


def subformulas(f: Formula):
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        t = type(g)
        if t is Not:
            stack.append(g.sub)
        elif t is And or t is Or:
            stack.append(g.right)
            stack.append(g.left)
        elif t is Exists or t is Forall:
            stack.append(g.body)


def constants(f: Formula) -> set:
    hit = _CONST_CACHE.get(id(f))
    if hit is not None:
        return set(hit[1])
    if len(_CONST_CACHE) > _CACHE_LIMIT:
        _CONST_CACHE.clear()
    out = _constants(f)
    _CONST_CACHE[id(f)] = (f, frozenset(out))
    return out


def _constants(f: Formula) -> set:
    out = set()
    for g in subformulas(f):
        if type(g) is Rel:
            out.update(t.value for t in g.terms if isinstance(t, Const))
        elif type(g) is Eq:
            out.update(t.value for t in (g.left, g.right) if isinstance(t, Const))
    return out


def relations(f: Formula) -> dict:
    """Relation name -> arity as used in the formula."""
    out = {}
    for g in subformulas(f):
        if type(g) is Rel:
            out[g.name] = len(g.terms)
    return out


def relation_occurrences(f: Formula) -> list:
    return [g.name for g in subformulas(f) if type(g) is Rel]


def all_var_names(f: Formula) -> set:
    names = set()
    for g in subformulas(f):
        t = type(g)
        if t is Rel:
            names |= _term_vars(g.terms)
        elif t is Eq:
            names |= _term_vars((g.left, g.right))
        elif t is Exists or t is Forall:
            names.add(g.var)
    return names


def depth(f: Formula) -> int:
    t = type(f)
    if t is Rel or t is Eq:
        return 0
    if t is Not:
        return 1 + depth(f.sub)
    if t is And or t is Or:
        return 1 + max(depth(f.left), depth(f.right))
    return 1 + depth(f.body)


class FreshNames:
    """Generates variable names not clashing with a given set."""

    def __init__(self, taken: Iterable[str] = (), prefix: str = "v"):
        self.taken = set(taken)
        self.prefix = prefix
        self._counter = itertools.count(1)

    def __call__(self, hint: str | None = None) -> str:
        base = hint or self.prefix
        if base not in self.taken and hint is not None:
            self.taken.add(base)
            return base
        while True:
            name = f"{base}{next(self._counter)}"
            if name not in self.taken:
                self.taken.add(name)
                return name


# printing

def format_atom(a) -> str:
    if a is BOT:
        return "_bot"
    if isinstance(a, CopyIdx):
        return f"_c{a.index}"
    if isinstance(a, bool):
        raise TypeError("bool is not an atom")
    if isinstance(a, int):
        return str(a)
    if isinstance(a, str):
        return json.dumps(a, ensure_ascii=False)
    raise TypeError(f"not an atom: {a!r}")


def format_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    return format_atom(t.value)


# precedence levels: 0 quantifier, 1 disjunction, 2 conjunction, 3 unary
def _fmt(f, ctx: int) -> str:
    t = type(f)
    if t is Rel:
        return f"{f.name}({', '.join(format_term(x) for x in f.terms)})"
    if t is Eq:
        return f"{format_term(f.left)} = {format_term(f.right)}"
    if t is Not:
        return "!" + _fmt(f.sub, 3)
    if t is And:
        s = f"{_fmt(f.left, 2)} & {_fmt(f.right, 3)}"
        return s if ctx <= 2 else f"({s})"
    if t is Or:
        s = f"{_fmt(f.left, 1)} | {_fmt(f.right, 2)}"
        return s if ctx <= 1 else f"({s})"
    if t is Exists or t is Forall:
        kw = "exists" if t is Exists else "forall"
        s = f"{kw} {f.var}: {_fmt(f.body, 0)}"
        return s if ctx == 0 else f"({s})"
    raise TypeError(f"not a formula: {f!r}")


def format_formula(f: Formula) -> str:
    """Canonical text; parse(format_formula(f)) == f."""
    return _fmt(f, 0)


def sort_atoms(atoms) -> list:
    return sorted(atoms, key=atom_key)
