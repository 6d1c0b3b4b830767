"""Command line: ``cuckoo-walk {run,bounds,verify,compare,sweep}``.

Exit codes: 0 success, 1 usage or domain error, 2 failed rounds,
3 oracle budget exceeded, 4 an oracle check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import random
import sys
from collections import Counter
from typing import Optional, Sequence

from cuckoowalk import bounds
from cuckoowalk import graph as gm
from cuckoowalk.experiments import (
    ExperimentConfig,
    compare_walk_vs_bfs,
    run_experiment,
    summary_json,
    write_outputs,
)
from cuckoowalk.hash_family import FamilyConfig, choices_of
from cuckoowalk.table import LITERAL, NO_BACKTRACK, CuckooTable, WalkPolicy, default_max_steps, insert_random_walk

EXIT_OK, EXIT_USAGE, EXIT_ROUND_FAILURE, EXIT_BUDGET, EXIT_CHECK = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _policy(args) -> WalkPolicy:
    mode = NO_BACKTRACK if args.policy == "no-backtrack" else LITERAL
    return WalkPolicy(mode, args.max_steps or default_max_steps(args.m))


def _experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--m", type=_positive_int, required=True)
    load = p.add_mutually_exclusive_group(required=True)
    load.add_argument("--epsilon", type=float)
    load.add_argument("--n", type=int)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--trials", type=_positive_int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", choices=("literal", "no-backtrack"), default="literal")
    p.add_argument("--max-steps", type=_positive_int, default=None)
    p.add_argument("--out", default=None)


def _config(args, **extra) -> ExperimentConfig:
    return ExperimentConfig(
        m=args.m,
        d=args.d,
        trials=args.trials,
        base_seed=args.seed,
        epsilon=args.epsilon,
        n=args.n,
        policy=_policy(args),
        **extra,
    )


def cmd_run(args) -> int:
    config = _config(args, oracle_level=args.oracle, theta=args.theta, timing=args.timing)
    summary, records = run_experiment(config)
    if args.out:
        write_outputs(args.out, summary, records)
    pe = summary.path_edges
    print(f"m={config.m} n={config.n} d={config.d} trials={config.trials} policy={config.policy.mode}")
    print(f"rounds={summary.rounds} placed={summary.placed} failures={summary.failures}")
    if pe["count"]:
        print(f"mean_path_edges={pe['mean']:.6f} sem={pe['sem']:.3g} max={pe['max']}")
    if config.epsilon is not None and args.theta is not None:
        print(f"upper_bound(theta={args.theta})={bounds.upper_bound_expected_path(args.theta):.6f}")
    if config.oracle_level != "none":
        print(f"trace_failures={summary.trace_failures} evictor_failures={summary.evictor_failures}")
    return EXIT_ROUND_FAILURE if summary.failures else EXIT_OK


def cmd_bounds(args) -> int:
    params = bounds.BoundParams(args.epsilon, args.d, args.theta)
    theta_max = bounds.largest_feasible_theta(args.epsilon, args.d)
    rows = [
        ("gamma", f"{params.gamma:.10g}"),
        ("d2_gamma", f"{args.d**2 * params.gamma:.10g}"),
        ("feasible", str(bounds.feasible(params)).lower()),
        ("upper_bound", f"{bounds.upper_bound_expected_path(args.theta):.10g}"),
        ("lower_bound", f"{bounds.lower_bound_expected_path(args.epsilon, args.d):.10g}"),
        ("largest_feasible_theta", "none" if theta_max is None else f"{theta_max:.10g}"),
    ]
    for key, val in rows:
        print(f"{key:<24}{val}")
    return EXIT_OK


def _verify(args) -> tuple[list[tuple[str, bool, str]], Optional[str]]:
    """Run every oracle check on one instance; returns (checks, budget_failure)."""
    cfg = FamilyConfig(args.m, args.d, args.seed)
    n = args.n
    if not 0 <= n <= args.m:
        raise UsageError(f"need 0 <= n <= m, got n={n}, m={args.m}")
    graph = gm.CuckooGraph.from_config(cfg, n)
    checks: list[tuple[str, bool, str]] = []

    same = all(list(graph.adjacency[x]) == choices_of(cfg, x) for x in range(n))
    checks.append(("choice paths agree", same, f"{n} items"))

    rng = random.Random(args.seed ^ 0x5EED)
    policy = WalkPolicy.default(args.m)
    table = CuckooTable(cfg)
    blocked_ok = trace_ok = evict_ok = True
    placed = 0
    for item in range(n):
        k = item + 1
        pre = list(table.slot_to_item)
        occ = {s for s, x in enumerate(pre) if x >= 0}
        b = gm.blocked_set(graph, occ, k)
        if b != gm.blocked_set_lazy(cfg, occ, k):
            blocked_ok = False
        out = insert_random_walk(table, item, policy, rng)
        if not out.placed:
            continue
        placed += 1
        if args.tamper and placed == 1:
            # slot m is outside the graph, so the last edge is fabricated
            out.trace.steps[-1] = out.trace.steps[-1]._replace(slot=args.m)
        if not gm.verify_trace_as_augmenting_path(graph, pre, out.trace):
            trace_ok = False
        if out.trace.evictions and not gm.evictors_are_blocked(out.trace, b, occ):
            evict_ok = False
    checks.append(("trace is augmenting path", trace_ok, f"{placed}/{n} rounds placed"))
    checks.append(("evictors lie in B_k", evict_ok, ""))
    checks.append(("blocked set dual path", blocked_ok, f"k=1..{n}"))
    errs = table.matching_errors()
    checks.append(("matching invariant", not errs, errs[0] if errs else f"size={table.size}"))

    hist = Counter(s for x in range(n) for s in choices_of(cfg, x))
    delta = gm.max_degree(graph)
    checks.append(("max degree vs histogram", delta == max(hist.values(), default=0), f"max_degree={delta}"))

    occ = table.occupied()
    try:
        b = gm.blocked_set(graph, occ, n)
        for ell in range(1, args.ell_max + 1):
            c = gm.count_interesting_paths(graph, b, occ, ell, budget=args.budget)
            checks.append((f"interesting paths ell={ell}", True, f"directed={c.count} undirected={c.undirected}"))
        cap = args.lam if args.lam is not None else gm.default_cycle_cap(max(n, 1))
        radius = args.radius if args.radius is not None else gm.default_radius(max(n, 1))
        cs = gm.count_short_cycles(graph, cap, radius=radius, budget=args.budget)
        checks.append(
            (
                f"short cycles cap={cap}",
                True,
                f"cycle_count={cs.cycle_count} parallel={cs.parallel_count} "
                f"near(radius={radius})={cs.near_cycle_vertices}",
            )
        )
    except gm.BudgetExceeded as e:
        return checks, str(e)
    return checks, None


def cmd_verify(args) -> int:
    checks, budget_failure = _verify(args)
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
    if budget_failure:
        print(f"BUDGET  {budget_failure}")
        return EXIT_BUDGET
    return EXIT_OK if all(ok for _, ok, _ in checks) else EXIT_CHECK


def cmd_compare(args) -> int:
    config = _config(args)
    rep = compare_walk_vs_bfs(config)
    print(f"m={config.m} n={config.n} d={config.d} trials={config.trials}")
    print(f"walk_per_item={rep.walk_per_item:.6f} bfs_per_item={rep.bfs_per_item:.6f}")
    print(f"walk_total={sum(rep.walk_totals)} bfs_paired_total={sum(rep.bfs_paired_totals)} "
          f"bfs_independent_total={sum(rep.bfs_independent_totals)}")
    print(f"paired_violations={len(rep.paired_violations)}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        data = {k: getattr(rep, k) for k in rep.__dataclass_fields__}
        data["config"] = config.echo()
        with open(os.path.join(args.out, "compare.json"), "w") as f:
            f.write(summary_json(data))
    return EXIT_OK if rep.paired_ok else EXIT_CHECK


def sweep_rows(grid: Sequence[float], theta: float, d_max: int) -> list[tuple]:
    rows = []
    for eps in grid:
        d = bounds.min_feasible_d(eps, theta, d_max)
        if d is None:
            rows.append((eps, "", "", ""))
        else:
            rows.append((eps, d, bounds.gamma(eps, d), bounds.upper_bound_expected_path(theta)))
    return rows


def cmd_sweep(args) -> int:
    try:
        grid = [float(t) for t in args.epsilon_grid.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad --epsilon-grid {args.epsilon_grid!r}")
    if not grid:
        raise UsageError("--epsilon-grid is empty")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("epsilon", "d_min", "gamma", "upper_bound"))
    for eps, d, g, ub in sweep_rows(grid, args.theta, args.d_max):
        w.writerow((repr(eps), d, g if g == "" else format(g, ".17g"), ub if ub == "" else format(ub, ".17g")))
    sys.stdout.write(buf.getvalue())
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "sweep.csv"), "w", newline="") as f:
            f.write(buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cuckoo-walk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="Monte-Carlo trials, writes records.csv and summary.json")
    _experiment_flags(p)
    p.add_argument("--oracle", choices=("none", "light", "full"), default="none")
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--timing", action="store_true", help="record per-round wall time (breaks byte-identical output)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bounds", help="evaluate the closed-form bounds")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="run every oracle check on one instance")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ell-max", type=_positive_int, default=3)
    p.add_argument("--lambda", dest="lam", type=int, default=None)
    p.add_argument("--radius", type=int, default=None)
    p.add_argument("--budget", type=float, default=gm.DEFAULT_BUDGET)
    p.add_argument("--tamper", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="random walk against shortest augmenting paths")
    _experiment_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="least feasible d per epsilon")
    p.add_argument("--epsilon-grid", required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--d-max", type=_positive_int, default=100_000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as e:
        print(f"cuckoo-walk: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
