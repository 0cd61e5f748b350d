"""Command-line front end: JSON in, JSON out.

Exit codes: 0 success (holds, equal), 1 property violated or distributions
unequal (also an undecided dagger check), 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .compilers import (assign_representable_probs, compile_bid,
                        compile_bid_to_ti, dagger_check, dagger_compile,
                        eliminate_condition, eliminate_condition_rep,
                        monotone_to_sjfcq, verify_representation)
from .compilers.io import (representation_from_json, representation_to_json,
                           to_json, view_from_json)
from .diagnostics import (finite_moments_report, max_world_check,
                          moment_inequality_check, mutual_exclusive_witness,
                          view_prob_bound)
from .errors import PdbError
from .probspace import (BidPdb, ExplicitPdb, TiPdb, enumerate_worlds,
                        pushforward, sample_many)
from .probspace.io import (distribution_to_json, instance_from_json,
                           instance_to_json, pdb_from_json)
from .probspace.radicals import set_precision
from .probspace.worlds import condition_distribution
from .relmodel import (apply_view, classify, format_formula, free_vars,
                       holds, parse_formula)

DEFAULT_TRUNCATION = 20


class UsageError(Exception):
    pass


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _need(args, name: str):
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"--{name.replace('_', '-')} is required for {args.command}")
    return value


def _pdb(args):
    return pdb_from_json(_load(_need(args, "pdb")))


def _trunc(args, pdb):
    if args.truncate is not None:
        return args.truncate
    return None if getattr(pdb, "is_finite", True) else DEFAULT_TRUNCATION


def _view(args, schema=None):
    return view_from_json(_load(_need(args, "view")), schema)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=False, ensure_ascii=False) + "\n")


def cmd_parse(args) -> int:
    f = parse_formula(_need(args, "formula"))
    _emit({"formula": format_formula(f), "fragment": str(classify(f)),
           "free": sorted(free_vars(f))})
    return 0


def cmd_eval(args) -> int:
    inst = instance_from_json(_load(_need(args, "instance")))
    if args.condition is not None:
        _emit({"holds": holds(parse_formula(args.condition), inst)})
        return 0
    _emit(instance_to_json(apply_view(_view(args), inst)))
    return 0


def cmd_worlds(args) -> int:
    pdb = _pdb(args)
    dist = enumerate_worlds(pdb, _trunc(args, pdb))
    if args.condition is not None:
        dist = condition_distribution(dist, parse_formula(args.condition, pdb.schema))
    _emit(distribution_to_json(dist))
    return 0


def cmd_push(args) -> int:
    pdb = _pdb(args)
    dist = enumerate_worlds(pdb, _trunc(args, pdb))
    if args.condition is not None:
        dist = condition_distribution(dist, parse_formula(args.condition, pdb.schema))
    _emit(distribution_to_json(pushforward(dist, _view(args, pdb.schema))))
    return 0


def _compile(args, pdb):
    target = args.target
    if target == "sjfcq-ti":
        if not isinstance(pdb, TiPdb):
            raise UsageError("--target sjfcq-ti needs a TI input")
        view = _view(args, pdb.schema)
        if len(view.queries) != 1:
            raise UsageError("--target sjfcq-ti takes a single-query view")
        rep = monotone_to_sjfcq(pdb, view.queries[0])
        return rep, None, pushforward(enumerate_worlds(pdb), view)
    if isinstance(pdb, BidPdb):
        if target == "cti":
            rep, report = compile_bid(pdb)
            return rep, report, None
        rep, bid_report, elim_report = compile_bid_to_ti(pdb)
        return rep, {"bid": bid_report, "elimination": elim_report}, None
    if isinstance(pdb, ExplicitPdb):
        c = args.c if args.c is not None else max(1, max(len(i) for i, _ in pdb.worlds))
        rep, report = dagger_compile(pdb, c)
        if target == "cti":
            return rep, report, None
        rep, elim_report = eliminate_condition_rep(rep)
        return rep, {"segmentation": report, "elimination": elim_report}, None
    if isinstance(pdb, TiPdb):
        if args.condition is None:
            raise UsageError("compiling a TI input needs --condition (or --target sjfcq-ti)")
        cond = parse_formula(args.condition, pdb.schema)
        if target == "cti":
            raise UsageError("a conditioned TI input is already of the cti form")
        rep, report = eliminate_condition(pdb, cond)
        return rep, report, condition_distribution(enumerate_worlds(pdb), cond)
    raise UsageError("compile takes a finite TI, BID or explicit PDB")


def cmd_compile(args) -> int:
    pdb = _pdb(args)
    rep, report, source = _compile(args, pdb)
    out = {"representation": representation_to_json(rep), "report": to_json(report)}
    code = 0
    if not args.no_verify:
        result = verify_representation(source if source is not None else pdb, rep)
        out["verify"] = to_json(result)
        code = 0 if result else 1
    _emit(out)
    return code


def cmd_verify(args) -> int:
    pdb = _pdb(args)
    rep = representation_from_json(_load(_need(args, "rep")))
    source = enumerate_worlds(pdb, _trunc(args, pdb))
    if args.view is not None:
        source = pushforward(source, _view(args, pdb.schema))
    result = verify_representation(source, rep)
    _emit(to_json(result))
    return 0 if result else 1


def cmd_moments(args) -> int:
    if args.rep is not None:
        target = representation_from_json(_load(args.rep))
        trunc = args.truncate
        if trunc is None and not target.base.is_finite:
            trunc = DEFAULT_TRUNCATION
    else:
        target = _pdb(args)
        trunc = _trunc(args, target)
    rows = finite_moments_report(target, args.k, trunc)
    _emit([{**to_json(r), "finite": r.finite} for r in rows])
    return 0


def cmd_check_dagger(args) -> int:
    pdb = _pdb(args)
    c = args.c if args.c is not None else 1
    n = args.truncate if args.truncate is not None else DEFAULT_TRUNCATION
    result = dagger_check(pdb, c, n)
    _emit(to_json(result))
    return 0 if result.verdict == "holds" else 1


def cmd_sample(args) -> int:
    pdb = _pdb(args)
    seed = args.seed if args.seed is not None else 0
    worlds = sample_many(pdb, seed, args.n, _trunc(args, pdb))
    _emit([instance_to_json(w) for w in worlds])
    return 0


def cmd_diag(args) -> int:
    kind = args.kind
    if kind == "assign":
        worlds = [instance_from_json(w) for w in _load(_need(args, "instance"))]
        _emit(to_json(assign_representable_probs(worlds).worlds))
        return 0
    pdb = _pdb(args)
    if kind == "moment-inequality":
        if not isinstance(pdb, TiPdb):
            raise UsageError("moment-inequality takes a TI input")
        checks = moment_inequality_check(pdb, args.k, _trunc(args, pdb))
        _emit(to_json(checks))
        return 0 if all(c.holds for c in checks) else 1
    if kind == "view-bound":
        if not isinstance(pdb, TiPdb):
            raise UsageError("view-bound takes a TI input")
        target = instance_from_json(_load(_need(args, "instance")))
        report = view_prob_bound(pdb, _view(args, pdb.schema), target)
        _emit(to_json(report))
        return 0 if report.holds else 1
    dist = enumerate_worlds(pdb, _trunc(args, pdb))
    if args.view is not None:
        dist = pushforward(dist, _view(args, pdb.schema))
    if kind == "mutual-exclusive":
        _emit(to_json(mutual_exclusive_witness(dist)))
        return 0
    _emit(to_json(max_world_check(dist)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pdbrep", description="Representations of probabilistic databases.")
    p.add_argument("--precision", type=int, metavar="BITS", help="interval precision for radical comparisons")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("parse", cmd_parse, "parse and pretty-print a formula")
    sp.add_argument("formula")
    sp = add("eval", cmd_eval, "evaluate a view or sentence on an instance")
    sp.add_argument("--instance", required=True, metavar="FILE")
    sp.add_argument("--view", metavar="FILE")
    sp.add_argument("--condition", metavar="STR")
    for name, func, help_ in (("worlds", cmd_worlds, "enumerate the worlds of a PDB"),
                              ("push", cmd_push, "push a PDB through a view")):
        sp = add(name, func, help_)
        sp.add_argument("--pdb", metavar="FILE")
        sp.add_argument("--view", metavar="FILE")
        sp.add_argument("--condition", metavar="STR")
        sp.add_argument("--truncate", type=int, metavar="INT")
    sp = add("compile", cmd_compile, "compile a PDB into a representation")
    sp.add_argument("--pdb", metavar="FILE")
    sp.add_argument("--target", choices=["ti", "cti", "sjfcq-ti"], default="ti")
    sp.add_argument("--view", metavar="FILE")
    sp.add_argument("--condition", metavar="STR")
    sp.add_argument("--c", type=int, metavar="INT")
    sp.add_argument("--no-verify", action="store_true")
    sp = add("verify", cmd_verify, "compare a representation with a PDB")
    sp.add_argument("--pdb", metavar="FILE")
    sp.add_argument("--rep", metavar="FILE")
    sp.add_argument("--view", metavar="FILE")
    sp.add_argument("--truncate", type=int, metavar="INT")
    sp = add("moments", cmd_moments, "moments of the instance size")
    sp.add_argument("--pdb", metavar="FILE")
    sp.add_argument("--rep", metavar="FILE")
    sp.add_argument("-k", type=int, default=2, metavar="INT")
    sp.add_argument("--truncate", type=int, metavar="INT")
    sp = add("check-dagger", cmd_check_dagger, "check the size/probability series condition")
    sp.add_argument("--pdb", metavar="FILE")
    sp.add_argument("--c", type=int, metavar="INT")
    sp.add_argument("--truncate", type=int, metavar="INT")
    sp = add("sample", cmd_sample, "draw seeded samples")
    sp.add_argument("--pdb", metavar="FILE")
    sp.add_argument("--seed", type=int, metavar="INT")
    sp.add_argument("-n", type=int, default=1, metavar="INT")
    sp.add_argument("--truncate", type=int, metavar="INT")
    sp = add("diag", cmd_diag, "bounds and witnesses")
    sp.add_argument("kind", choices=["moment-inequality", "view-bound", "mutual-exclusive",
                                     "max-world", "assign"])
    sp.add_argument("--pdb", metavar="FILE")
    sp.add_argument("--view", metavar="FILE")
    sp.add_argument("--instance", metavar="FILE")
    sp.add_argument("-k", type=int, default=4, metavar="INT")
    sp.add_argument("--truncate", type=int, metavar="INT")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.precision is not None:
            set_precision(args.precision)
        return args.func(args)
    except (UsageError, PdbError, ValueError) as exc:
        print(f"pdbrep: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
