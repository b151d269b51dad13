"""Command-line entry point.

Exit codes: 0 success, 1 check failure, 2 invalid input, 3 budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys

from .errors import BudgetError, InvalidInput, TameBlocksError

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3


def _load_group(path):
    from .permgrp import PermGroup

    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read group file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise InvalidInput("group JSON must be an object")
    return PermGroup.from_json(data)


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_classify(args):
    from .atlas import build
    from .classifier import classify

    if args.recipe:
        A = build(args.recipe, seed=args.seed)
        G, desc = A.group, A.recipe.display()
    else:
        G = _load_group(args.group)
        desc = G.name or args.group
    report = classify(G, seed=args.seed, descriptor=desc)
    d = report.to_dict()
    print(f"{desc}: class {d['class']['tag']} (n={report.n}), structure case ({report.structure_case}), "
          f"pattern {report.pattern}, canonical {report.canonical.display()} -> {report.status}")
    for e in report.ledger:
        print(f"  [{e['status']}] {e['check']}: {e['witness']}")
    if args.json:
        _write_json(args.json, d)
    return EXIT_OK if report.verified else EXIT_FAIL


def cmd_inspect(args):
    from .atlas import build
    from .twolocal import twolocal_report

    G = build(args.recipe, seed=args.seed).group
    print(json.dumps(twolocal_report(G), indent=2))
    return EXIT_OK


def cmd_suite(args):
    from .suite import paper_suite

    def show(e):
        print(f"[{e['status']}] {e['check']} ({e['seconds']}s): {e['witness']}", flush=True)

    result = paper_suite(tier=args.tier, seed=args.seed, progress=show)
    print(f"paper-suite {args.tier}: {result['status']}")
    if args.json:
        _write_json(args.json, result)
    return EXIT_OK if result["status"] == "PASS" else EXIT_FAIL


def cmd_construct(args):
    from .atlas import build

    A = build(args.recipe, seed=args.seed)
    payload = A.group.to_json()
    payload.setdefault("name", A.recipe.display())
    _write_json(args.out, payload)
    print(f"{A.recipe.display()}: degree {A.group.degree}, order {A.group.order} -> {args.out}")
    return EXIT_OK


def cmd_module_lab(args):
    from .modrep2 import perm_module, scott, split_summands, vertex_bracket
    from .permgrp import subgroup
    from .twolocal import frame_of

    G = _load_group(args.group)
    Hraw = _load_group(args.subgroup)
    if Hraw.degree != G.degree:
        raise InvalidInput("group and subgroup have different degrees")
    H = subgroup(G, Hraw.gens, name=Hraw.name or "H")
    if args.op == "split":
        dec = split_summands(perm_module(G, H), seed=args.seed)
        out = {"dim": dec.parent.dim, "summands": dec.dims, "verified": dec.verify()}
    elif args.op == "scott":
        S = scott(G, H, seed=args.seed)
        out = {"scott_dim": S.dim, "module": S.to_json()}
    else:
        S = scott(G, H, seed=args.seed)
        fr = frame_of(G)
        slice_ = {"1": subgroup(G, []), "Z": subgroup(G, [fr.z]), "C4(u)": subgroup(G, [fr.u]),
                  "C4(v)": subgroup(G, [fr.v]), "K": fr.K, "Q": fr.Q, "P": fr.P}
        out = {"scott_dim": S.dim, "relatively_projective": vertex_bracket(S, slice_)}
    print(json.dumps(out, indent=2))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="tameblocks", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify the principal 2-block of a group")
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--recipe")
    src.add_argument("--group", metavar="FILE")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--json", metavar="OUT")
    c.set_defaults(func=cmd_classify)

    i = sub.add_parser("inspect", help="2-local report for a recipe")
    i.add_argument("--recipe", required=True)
    i.add_argument("--seed", type=int, default=0)
    i.set_defaults(func=cmd_inspect)

    s = sub.add_parser("paper-suite", help="run the verification battery")
    s.add_argument("--tier", choices=("core", "extended"), default="core")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json", metavar="OUT")
    s.set_defaults(func=cmd_suite)

    b = sub.add_parser("construct", help="write a recipe group as JSON")
    b.add_argument("--recipe", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_construct)

    m = sub.add_parser("module-lab", help="permutation-module experiments")
    m.add_argument("--group", required=True)
    m.add_argument("--subgroup", required=True)
    m.add_argument("--op", choices=("split", "scott", "vertex"), required=True)
    m.add_argument("--seed", type=int, default=0)
    m.set_defaults(func=cmd_module_lab)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvalidInput as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except TameBlocksError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return getattr(exc, "exit_code", EXIT_FAIL)


if __name__ == "__main__":
    sys.exit(main())
