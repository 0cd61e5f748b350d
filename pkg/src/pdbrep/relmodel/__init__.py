"""Relational model: atoms, instances, formulas, evaluation and views."""
from .atoms import (BOT, EMPTY, CopyIdx, Fact, Instance, Schema, adom,
                    atom_key, fact, instance, is_atom, is_reserved)
from .evaluate import (Query, View, active_domain, apply_view, eval_formula,
                       evaluate, holds, query_from_text,
                       view_size_bound)
from .formula import (And, Const, Eq, Exists, Forall, Formula, Not, Or, Rel,
                      Var, conj, constants, disj, format_atom, format_formula,
                      free_vars, rel, relations)
from .fragments import Fragment, classify, classify_fragment, classify_view
from .parser import parse_formula, parse_term
from .transform import (copy_names, is_existential_form, relativize_to_copy,
                        rename_free, substitute_relations, to_existential_form)

__all__ = [
    "BOT", "EMPTY", "CopyIdx", "Fact", "Instance", "Schema", "adom", "atom_key",
    "fact", "instance", "is_atom", "is_reserved", "Query", "View",
    "active_domain", "apply_view", "eval_formula", "evaluate", "holds",
    "query_from_text", "view_size_bound", "classify_fragment", "And", "Const", "Eq", "Exists", "Forall", "Formula",
    "Not", "Or", "Rel", "Var", "conj", "constants", "disj", "format_atom",
    "format_formula", "free_vars", "rel", "relations", "Fragment", "classify",
    "classify_view", "parse_formula", "parse_term", "copy_names",
    "is_existential_form", "relativize_to_copy", "rename_free",
    "substitute_relations", "to_existential_form",
]
