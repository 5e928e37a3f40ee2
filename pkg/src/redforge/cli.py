"""Command-line front end: build trees, verify theorems, hunt counterexamples.

Exit codes: 0 ok / verdict reached, 1 a check was violated, 2 input error,
3 node budget exhausted, 4 search inconclusive within budget.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from .cvector import verify_cvectors
from .embed import (
    ScopeError,
    balance,
    check_embeddability,
    check_qh_identity,
    check_qht_identity,
    check_theorem7,
    check_weighted_leaf_sum,
    weighted_leaf_sum,
)
from .geom import verify_shelling, verify_triangulation
from .multigraph import MultiGraph, complete_graph, graph_from_obj, path_graph
from .poly import poly_from_obj, poly_to_obj
from .redtree import (
    DepthExceeded,
    RandomStrategy,
    build_tree,
    check_leaf_sum_identity,
    full_dim_leaves_dfs,
    leaf_census,
    leaves_dfs,
    order_O_strategy,
    strategy_from_steps,
    tree_to_obj,
)
from .search import BudgetExhausted, search_c7

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_INCONCLUSIVE = 4

ALL_CHECKS = (
    "triangulation",
    "shelling",
    "leafsum",
    "embeddability",
    "qh",
    "qht",
    "theorem7",
    "cvector",
)


def _default_budget(args) -> int:
    if args.budget is not None:
        return args.budget
    env = os.environ.get("REDFORGE_BUDGET")
    return int(env) if env else 10**6


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _load_graphs(path: str) -> list[MultiGraph]:
    obj = _load_json(path)
    if isinstance(obj, list):
        return [graph_from_obj(o) for o in obj]
    return [graph_from_obj(obj)]


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()[:16]


def _emit(report: dict, args) -> None:
    if args.format == "json":
        text = json.dumps(report, indent=2, default=str)
    else:
        lines = [f"{report['command']}: input {report.get('input_digest', '-')}"]
        for v in report.get("verdicts", []):
            lines.append(f"  {v['check']}: {v['verdict']}")
        if "census" in report:
            lines.append(f"  census: {report['census']}")
        if "polynomial" in report:
            lines.append(f"  polynomial: {report['polynomial']}")
        if report.get("witness_steps"):
            lines.append(f"  witness steps: {len(report['witness_steps'])}")
        text = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _build(args, g: MultiGraph):
    budget = _default_budget(args)
    if args.order == "O":
        return build_tree(g, order_O_strategy, budget=budget)
    if args.order == "random":
        return build_tree(g, RandomStrategy(args.seed), budget=budget)
    if args.order == "file":
        if not args.order_file:
            raise ValueError("--order file needs --order-file")
        steps = _load_json(args.order_file)
        if isinstance(steps, dict):
            steps = steps.get("witness_steps") or steps.get("steps") or []
        return build_tree(g, strategy_from_steps(steps), name="replay", budget=budget)
    raise ValueError(f"unsupported order {args.order!r}")


def cmd_tree(args) -> int:
    try:
        graphs = _load_graphs(args.graph)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    reports = []
    for g in graphs:
        try:
            tree = _build(args, g)
        except DepthExceeded as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BUDGET
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        census = leaf_census(tree.root)
        reports.append(
            {
                "command": "tree",
                "input_digest": _digest(args.graph),
                "strategy": tree.strategy_name,
                "census": {str(k): v for k, v in sorted(census.items())},
                "full_dimensional_leaves": len(full_dim_leaves_dfs(tree.root)),
                "tree": tree_to_obj(tree),
            }
        )
    for r in reports:
        _emit(r, args)
    return EXIT_OK


def _run_check(name: str, tree) -> dict:
    if name == "triangulation":
        rep = verify_triangulation(tree)
        return {
            "check": name,
            "verdict": "pass" if rep.ok else "fail",
            "scope_verified": rep.scope_verified,
            "detail": {"pairs": rep.checked_pairs, "failures": rep.failures},
        }
    if name == "shelling":
        rep = verify_shelling(tree)
        return {
            "check": name,
            "verdict": "pass" if rep.ok else "fail",
            "scope_verified": rep.scope_verified,
            "detail": {"failures": rep.failures, "certificates": rep.certificates},
        }
    if name == "leafsum":
        ok1, w1 = check_leaf_sum_identity(tree.root)
        ok2, w2 = check_weighted_leaf_sum(tree)
        return {
            "check": name,
            "verdict": "pass" if ok1 and ok2 else "fail",
            "detail": {"unweighted": ok1, "weighted": ok2},
        }
    if name == "embeddability":
        verdict = check_embeddability(tree)
        ok = verdict.at_least("strong") if tree.is_order_O else True
        return {
            "check": name,
            "verdict": "pass" if ok else "fail",
            "detail": verdict.to_obj(),
        }
    if name == "qh":
        ok, witness = check_qh_identity(tree)
        return {"check": name, "verdict": "pass" if ok else "fail", "detail": witness}
    if name == "qht":
        ok, witness = check_qht_identity(tree)
        return {"check": name, "verdict": "pass" if ok else "fail", "detail": witness}
    if name == "theorem7":
        ok, witnesses = check_theorem7(tree)
        return {"check": name, "verdict": "pass" if ok else "fail", "detail": witnesses}
    if name == "cvector":
        ok, witness = verify_cvectors(tree)
        return {"check": name, "verdict": "pass" if ok else "fail", "detail": witness}
    raise ValueError(f"unknown check {name!r}")


def cmd_verify(args) -> int:
    try:
        graphs = _load_graphs(args.graph)
        checks = [c.strip() for c in args.checks.split(",") if c.strip()]
        for c in checks:
            if c not in ALL_CHECKS:
                raise ValueError(f"unknown check {c!r}; choose from {ALL_CHECKS}")
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    exit_code = EXIT_OK
    started = time.time()
    for g in graphs:
        try:
            tree = _build(args, g)
        except DepthExceeded as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BUDGET
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        verdicts = []
        for name in checks:
            try:
                verdicts.append(_run_check(name, tree))
            except ScopeError as exc:
                verdicts.append(
                    {"check": name, "verdict": "scope-error", "detail": str(exc)}
                )
        report = {
            "command": "verify",
            "input_digest": _digest(args.graph),
            "strategy": tree.strategy_name,
            "graph": {"n": g.n, "edges": [[e.src, e.dst] for e in g.edges]},
            "verdicts": verdicts,
            "timing_seconds": round(time.time() - started, 3),
        }
        _emit(report, args)
        for v in verdicts:
            if v["verdict"] == "fail":
                exit_code = EXIT_VIOLATION
            elif v["verdict"] == "scope-error" and not args.allow_scope:
                exit_code = max(exit_code, EXIT_VIOLATION)
    return exit_code


def cmd_search_c7(args) -> int:
    try:
        g = _load_graphs(args.graph)[0] if args.graph else complete_graph(args.n)
        target_poly = None
        if args.target_poly:
            target_poly = poly_from_obj(_load_json(args.target_poly))
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    started = time.time()
    try:
        outcome = search_c7(
            g,
            space=args.space,
            seed=args.seed,
            samples=args.samples,
            budget=_default_budget(args),
            target_poly=target_poly,
            predicate=args.target,
        )
    except BudgetExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except DepthExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    report = {
        "command": "search-c7",
        "input_digest": _digest(args.graph) if args.graph else f"K{args.n}",
        "space": outcome.space,
        "predicate": outcome.predicate,
        "found": outcome.found,
        "exhausted": outcome.exhausted,
        "examined": outcome.examined,
        "timing_seconds": round(time.time() - started, 3),
    }
    if outcome.polynomial is not None:
        report["polynomial"] = poly_to_obj(outcome.polynomial)
        report["polynomial_repr"] = repr(outcome.polynomial)
    if outcome.witness_steps is not None:
        report["witness_steps"] = outcome.witness_steps
    if outcome.witnesses_summary:
        report["violations_seen"] = outcome.witnesses_summary
    _emit(report, args)
    return EXIT_OK


def cmd_experiment(args) -> int:
    """Weight-versus-balance comparison on the order-O tree of a path graph."""
    if args.name != "wb-balance":
        print(f"error: unknown experiment {args.name!r}", file=sys.stderr)
        return EXIT_INPUT
    g = path_graph(args.n)
    tree = build_tree(g)
    expansion = weighted_leaf_sum(tree)
    by_graph: dict = {}
    for leaf in leaves_dfs(tree.root):
        by_graph.setdefault(leaf.graph, []).append(leaf)
    rows = []
    agree = True
    for gr, poly in sorted(expansion.items(), key=lambda kv: sorted(e.ends for e in kv[0].edges)):
        want = None
        for leaf in by_graph[gr]:
            b = balance(tree, leaf)
            want = b if want is None else want + b
        match = poly == want
        agree = agree and match
        rows.append(
            {
                "graph": [[e.src, e.dst] for e in gr.edges],
                "weight": repr(poly),
                "balance_sum": repr(want),
                "match": match,
            }
        )
    report = {
        "command": "experiment",
        "name": "wb-balance",
        "n": args.n,
        "all_match": agree,
        "leaves": rows,
    }
    _emit(report, args)
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="redforge",
        description="Reduction trees, reduced forms, and flow-polytope checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_order=True):
        p.add_argument("--budget", type=int, default=None,
                       help="node/work budget (default: $REDFORGE_BUDGET or 1e6)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=1,
                       help="accepted for interface compatibility; checks run serially")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--out", default=None)
        if with_order:
            p.add_argument("--order", choices=("O", "file", "random"), default="O")
            p.add_argument("--order-file", default=None,
                           help="replay step file for --order file")

    p_tree = sub.add_parser("tree", help="build a reduction tree")
    p_tree.add_argument("graph", help="graph JSON file")
    common(p_tree)
    p_tree.set_defaults(func=cmd_tree)

    p_verify = sub.add_parser("verify", help="run theorem checks on a tree")
    p_verify.add_argument("graph", help="graph JSON file (object or list)")
    p_verify.add_argument("--checks", default=",".join(ALL_CHECKS))
    p_verify.add_argument("--allow-scope", action="store_true")
    common(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_search = sub.add_parser("search-c7", help="hunt counterexample trees")
    p_search.add_argument("--graph", default=None, help="root graph JSON (default: K_n)")
    p_search.add_argument("--n", type=int, default=4, help="root K_n when --graph absent")
    p_search.add_argument("--space", choices=("orderO", "all", "random"), default="all")
    p_search.add_argument("--samples", type=int, default=100)
    p_search.add_argument(
        "--target",
        choices=("c7-violation", "weak", "strong", "extra-strong"),
        default="c7-violation",
        help="predicate the witness must violate",
    )
    p_search.add_argument("--target-poly", default=None,
                          help="JSON polynomial; search for a tree realizing it")
    common(p_search, with_order=False)
    p_search.set_defaults(func=cmd_search_c7)

    p_exp = sub.add_parser("experiment", help="exploratory reports")
    p_exp.add_argument("name", choices=("wb-balance",))
    p_exp.add_argument("--n", type=int, default=5)
    common(p_exp, with_order=False)
    p_exp.set_defaults(func=cmd_experiment)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
