"""Recursive-descent parser for the textual formula syntax.

    formula := "exists" IDENT ":" formula | "forall" IDENT ":" formula | disj
    disj    := conj ("|" conj)*
    conj    := unary ("&" unary)*
    unary   := "!" unary | atom | "(" formula ")"
    atom    := RELNAME "(" [term ("," term)*] ")" | term "=" term
    term    := IDENT | INT | STRING | "_bot" | "_c" INT
"""
from __future__ import annotations

import json
import re

from ..errors import FormulaSyntaxError, SchemaError
from .atoms import BOT, CopyIdx
from .formula import (And, Const, Eq, Exists, Forall, Not, Or, Rel, Var,
                      subformulas)

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<copy>_c[0-9]+\b)
  | (?P<bot>_bot\b)
  | (?P<int>-?[0-9]+)
  | (?P<relname>[A-Z][A-Za-z0-9_']*)
  | (?P<ident>[a-z][A-Za-z0-9_']*)
  | (?P<punct>[()&|!=:,])
    """,
    re.VERBOSE,
)

KEYWORDS = {"exists", "forall"}


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "ident" and value in KEYWORDS:
                kind = value
            elif kind == "punct":
                kind = value
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self, offset=0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            shown = tok[1] or "end of input"
            raise FormulaSyntaxError(f"expected {kind!r}, found {shown!r}", self.text, tok[2])
        self.i += 1
        return tok

    def formula(self):
        kind = self.peek()[0]
        if kind in KEYWORDS:
            self.take()
            var = self.take("ident")[1]
            self.take(":")
            body = self.formula()
            return Exists(var, body) if kind == "exists" else Forall(var, body)
        return self.disj()

    def disj(self):
        f = self.conj()
        while self.peek()[0] == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.peek()[0] == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self):
        kind = self.peek()[0]
        if kind == "!":
            self.take()
            return Not(self.unary())
        if kind == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if kind == "relname":
            name = self.take()[1]
            self.take("(")
            terms = []
            if self.peek()[0] != ")":
                terms.append(self.term())
                while self.peek()[0] == ",":
                    self.take()
                    terms.append(self.term())
            self.take(")")
            return Rel(name, tuple(terms))
        left = self.term()
        self.take("=")
        right = self.term()
        return Eq(left, right)

    def term(self):
        kind, value, pos = self.take()
        if kind == "ident":
            return Var(value)
        if kind == "int":
            return Const(int(value))
        if kind == "string":
            return Const(json.loads(value))
        if kind == "bot":
            return Const(BOT)
        if kind == "copy":
            return Const(CopyIdx(int(value[2:])))
        raise FormulaSyntaxError(f"expected a term, found {value or 'end of input'!r}", self.text, pos)


def parse_formula(text: str, schema=None):
    """Parse text; with a schema, relation names and arities are checked."""
    p = _Parser(text)
    f = p.formula()
    tok = p.peek()
    if tok[0] != "eof":
        raise FormulaSyntaxError(f"unexpected {tok[1]!r}", text, tok[2])
    if schema is not None:
        check_formula_schema(f, schema)
    return f


def check_formula_schema(f, schema):
    for g in subformulas(f):
        if isinstance(g, Rel):
            if g.name not in schema:
                raise SchemaError(f"unknown relation {g.name}")
            if schema.arity(g.name) != len(g.terms):
                raise SchemaError(f"{g.name} has arity {schema.arity(g.name)}, used with {len(g.terms)}")


def parse_term(text: str):
    p = _Parser(text)
    t = p.term()
    tok = p.peek()
    if tok[0] != "eof":
        raise FormulaSyntaxError(f"unexpected {tok[1]!r}", text, tok[2])
    return t
