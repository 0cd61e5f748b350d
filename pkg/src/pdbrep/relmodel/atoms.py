"""Atoms, schemas, facts and instances.

Atoms are plain Python ints and strs plus two reserved kinds used by the
compilers: copy indices and the bottom marker. The total order is
Int < Str < CopyIdx < Bot, ties broken by value.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from ..errors import SchemaError


class _Bot:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOT"

    def __reduce__(self):
        return (_Bot, ())


BOT = _Bot()


@dataclass(frozen=True, slots=True)
class CopyIdx:
    index: int

    def __repr__(self):
        return f"CopyIdx({self.index})"


Atom = "int | str | CopyIdx | _Bot"


def is_atom(value) -> bool:
    if isinstance(value, bool):
        return False
    return isinstance(value, (int, str, CopyIdx)) or value is BOT


def is_reserved(value) -> bool:
    return isinstance(value, CopyIdx) or value is BOT


def atom_key(a):
    t = type(a)
    if t is int:
        return (0, a, "")
    if t is str:
        return (1, 0, a)
    if t is CopyIdx:
        return (2, a.index, "")
    if a is BOT:
        return (3, 0, "")
    raise TypeError(f"not an atom: {a!r}")


def check_atom(a):
    if not is_atom(a):
        raise SchemaError(f"not an atom: {a!r}")
    return a


@dataclass(frozen=True)
class Schema:
    """Ordered mapping from relation names to arities."""

    relations: tuple  # of (name, arity)

    def __post_init__(self):
        seen = set()
        for name, arity in self.relations:
            if not isinstance(name, str) or not name:
                raise SchemaError(f"bad relation name {name!r}")
            if not isinstance(arity, int) or isinstance(arity, bool) or arity < 0:
                raise SchemaError(f"bad arity for {name}: {arity!r}")
            if name in seen:
                raise SchemaError(f"duplicate relation {name}")
            seen.add(name)

    @classmethod
    def of(cls, mapping=None, **kw) -> "Schema":
        items = list((mapping or {}).items()) + list(kw.items())
        return cls(tuple(items))

    @property
    def names(self) -> tuple:
        return tuple(n for n, _ in self.relations)

    def arity(self, name: str) -> int:
        for n, a in self.relations:
            if n == name:
                return a
        raise SchemaError(f"unknown relation {name}")

    def __contains__(self, name) -> bool:
        return any(n == name for n, _ in self.relations)

    @property
    def max_arity(self) -> int:
        return max((a for _, a in self.relations), default=0)

    def union(self, other: "Schema") -> "Schema":
        rels = list(self.relations)
        for name, arity in other.relations:
            if name in self:
                if self.arity(name) != arity:
                    raise SchemaError(f"arity clash for {name}")
            else:
                rels.append((name, arity))
        return Schema(tuple(rels))

    def check_fact(self, fact: "Fact"):
        if self.arity(fact.relation) != len(fact.args):
            raise SchemaError(
                f"{fact.relation} has arity {self.arity(fact.relation)}, got {len(fact.args)} args"
            )


@dataclass(frozen=True, slots=True)
class Fact:
    relation: str
    args: tuple

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        for a in self.args:
            check_atom(a)

    def sort_key(self):
        return (self.relation, tuple(atom_key(a) for a in self.args))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        return f"{self.relation}({', '.join(map(repr, self.args))})"


def fact(relation: str, *args) -> Fact:
    return Fact(relation, tuple(args))


class Instance:
    """Finite set of facts stored in canonical order."""

    __slots__ = ("facts", "_set", "_hash")

    def __init__(self, facts: Iterable[Fact] = ()):
        uniq = set(facts)
        self.facts = tuple(sorted(uniq, key=Fact.sort_key))
        self._set = frozenset(uniq)
        self._hash = hash(self._set)

    @classmethod
    def _from_sorted(cls, facts: tuple) -> "Instance":
        inst = cls.__new__(cls)
        inst.facts = facts
        inst._set = frozenset(facts)
        inst._hash = hash(inst._set)
        return inst

    def __iter__(self) -> Iterator[Fact]:
        return iter(self.facts)

    def __len__(self) -> int:
        return len(self.facts)

    def __contains__(self, f) -> bool:
        return f in self._set

    def __eq__(self, other) -> bool:
        return isinstance(other, Instance) and self._set == other._set

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self):
        return "{" + ", ".join(map(repr, self.facts)) + "}"

    @property
    def fact_set(self) -> frozenset:
        return self._set

    def sort_key(self):
        return tuple(f.sort_key() for f in self.facts)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def relation(self, name: str) -> set:
        return {f.args for f in self.facts if f.relation == name}

    def index(self) -> dict:
        idx: dict = {}
        for f in self.facts:
            idx.setdefault(f.relation, set()).add(f.args)
        return idx

    def union(self, other: "Instance") -> "Instance":
        return Instance(self._set | other._set)

    def adom(self) -> set:
        return {a for f in self.facts for a in f.args}

    def check(self, schema: Schema) -> "Instance":
        for f in self.facts:
            schema.check_fact(f)
        return self


def instance(*facts: Fact) -> Instance:
    return Instance(facts)


EMPTY = Instance()


def adom(inst: Instance) -> set:
    return inst.adom()
