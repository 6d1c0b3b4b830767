"""Seeded Monte-Carlo trials over random-walk insertion.

Trial ``t`` of a config draws its graph from ``derive_seed(base_seed, t, 0)``
and its walk randomness from ``derive_seed(base_seed, t, 1)``, so results do
not depend on how trials are spread over worker processes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import random
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import stats

from cuckoowalk import graph as gm
from cuckoowalk.bounds import gamma, items_for_load
from cuckoowalk.hash_family import FamilyConfig, derive_seed
from cuckoowalk.table import (
    CuckooTable,
    InsertFn,
    WalkPolicy,
    insert_bfs,
    insert_random_walk,
    shortest_augmenting_path,
)

ORACLE_LEVELS = ("none", "light", "full")
CSV_COLUMNS = ("trial", "k", "path_edges", "evictions", "revealed", "status", "wall_ns")
GRAPH_STREAM, WALK_STREAM = 0, 1
THREADS_ENV = "CUCKOO_WALK_THREADS"


class InsufficientTrials(ValueError):
    pass


@dataclass
class ExperimentConfig:
    m: int
    d: int
    trials: int = 1
    base_seed: int = 0
    epsilon: Optional[float] = None
    n: Optional[int] = None
    policy: Optional[WalkPolicy] = None
    oracle_level: str = "none"
    theta: Optional[float] = None
    checkpoints: Optional[tuple[int, ...]] = None
    ell_max: int = 3
    cycle_stats: bool = True
    timing: bool = False

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.n is None:
            if self.epsilon is None:
                raise ValueError("give either epsilon or n")
            if not 0.0 < self.epsilon < 1.0:
                raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
            self.n = items_for_load(self.m, self.epsilon)
        elif self.epsilon is None and self.n < self.m:
            self.epsilon = 1.0 - self.n / self.m
        if not 0 <= self.n < self.m:
            raise ValueError(f"need 0 <= n < m, got n={self.n}, m={self.m}")
        if self.policy is None:
            self.policy = WalkPolicy.default(self.m)
        if self.oracle_level not in ORACLE_LEVELS:
            raise ValueError(f"oracle_level must be one of {ORACLE_LEVELS}")
        if self.checkpoints is None:
            n = self.n
            self.checkpoints = tuple(sorted({k for k in (n // 4, n // 2, 3 * n // 4, n) if k >= 1}))
        else:
            self.checkpoints = tuple(sorted(set(self.checkpoints)))
            if any(not 1 <= k <= self.n for k in self.checkpoints):
                raise ValueError(f"checkpoints must lie in [1, n={self.n}]")
        self.base_seed &= (1 << 64) - 1

    def family(self, trial: int) -> FamilyConfig:
        return FamilyConfig(self.m, self.d, derive_seed(self.base_seed, trial, GRAPH_STREAM))

    def walk_rng(self, trial: int) -> random.Random:
        return random.Random(derive_seed(self.base_seed, trial, WALK_STREAM))

    def echo(self) -> dict:
        out = asdict(self)
        out["policy"] = {"mode": self.policy.mode, "max_steps": self.policy.max_steps}
        out["checkpoints"] = list(self.checkpoints)
        return out


@dataclass
class TrialRecord:
    trial: int
    k: int
    path_edges: int
    evictions: int
    revealed: int
    status: str
    wall_ns: int = 0

    def row(self) -> tuple:
        return tuple(getattr(self, c) for c in CSV_COLUMNS)


@dataclass
class TrialResult:
    trial: int
    records: list[TrialRecord]
    empty_slots: list[int]
    blocked_sizes: dict[int, int] = field(default_factory=dict)
    nu: dict[tuple[int, int], tuple[int, int]] = field(default_factory=dict)
    nu_over_budget: int = 0
    max_degree: Optional[int] = None
    cycle_count: Optional[int] = None
    parallel_cycles: Optional[int] = None
    trace_failures: int = 0
    evictor_failures: int = 0


def run_trial(config: ExperimentConfig, trial: int, insert: InsertFn = insert_random_walk) -> TrialResult:
    cfg = config.family(trial)
    rng = config.walk_rng(trial)
    level = config.oracle_level
    table = CuckooTable(cfg)
    graph = gm.CuckooGraph.from_config(cfg, config.n) if level != "none" else None
    checkpoints = set(config.checkpoints) if level != "none" else set()
    result = TrialResult(trial, [], [])
    clock = time.perf_counter_ns

    for item in range(config.n):
        k = item + 1
        if k in checkpoints:
            occupied = table.occupied()
            blocked = gm.blocked_set(graph, occupied, k)
            result.blocked_sizes[k] = len(blocked)
            if level == "full":
                for ell in range(1, config.ell_max + 1):
                    try:
                        c = gm.count_interesting_paths(graph, blocked, occupied, ell)
                    except gm.BudgetExceeded:
                        result.nu_over_budget += 1
                        continue
                    result.nu[(k, ell)] = (c.count, c.undirected)
        pre = list(table.slot_to_item) if level != "none" else None

        t0 = clock() if config.timing else 0
        out = insert(table, item, config.policy, rng)
        wall = clock() - t0 if config.timing else 0

        tr = out.trace
        result.records.append(
            TrialRecord(trial, k, tr.path_edges, tr.evictions, tr.revealed_count, out.status, wall)
        )
        if level != "none" and out.placed:
            if not gm.verify_trace_as_augmenting_path(graph, pre, tr):
                result.trace_failures += 1
            if tr.evictions:
                occ = {s for s, x in enumerate(pre) if x >= 0}
                if not gm.evictors_are_blocked(tr, gm.blocked_set(graph, occ, k), occ):
                    result.evictor_failures += 1

    result.empty_slots = [s for s, x in enumerate(table.slot_to_item) if x < 0]
    if graph is not None:
        result.max_degree = gm.max_degree(graph)
        if level == "full" and config.cycle_stats and config.n:
            cap = gm.default_cycle_cap(config.n)
            try:
                cs = gm.count_short_cycles(graph, cap)
                result.cycle_count, result.parallel_cycles = cs.cycle_count, cs.parallel_count
            except gm.BudgetExceeded:
                pass
    return result


def _run_chunk(args) -> list[TrialResult]:
    config, trials = args
    return [run_trial(config, t) for t in trials]


def resolve_workers(workers: Optional[int] = None) -> int:
    if workers is None:
        raw = os.environ.get(THREADS_ENV)
        if raw is None:
            return 1
        workers = int(raw)
    if workers < 1:
        raise ValueError(f"worker count must be positive, got {workers}")
    return workers


def run_trials(config: ExperimentConfig, workers: Optional[int] = None) -> list[TrialResult]:
    workers = min(resolve_workers(workers), config.trials)
    if workers == 1:
        return [run_trial(config, t) for t in range(config.trials)]
    ids = list(range(config.trials))
    chunks = [ids[i::workers] for i in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_chunk, [(config, c) for c in chunks]))
    results = [r for part in parts for r in part]
    results.sort(key=lambda r: r.trial)
    return results


def _sem(values: np.ndarray) -> float:
    if len(values) < 2:
        return 0.0
    return float(values.std(ddof=1) / math.sqrt(len(values)))


def _describe(values: np.ndarray) -> dict:
    if len(values) == 0:
        return {"count": 0, "mean": None, "sem": None, "p50": None, "p90": None, "p99": None, "max": None}
    return {
        "count": int(len(values)),
        "mean": float(values.mean()),
        "sem": _sem(values),
        "p50": float(np.percentile(values, 50)),
        "p90": float(np.percentile(values, 90)),
        "p99": float(np.percentile(values, 99)),
        "max": int(values.max()),
    }


@dataclass
class UniformityResult:
    statistic: float
    p_value: float
    df: int
    trials: int
    k: int


def empty_slot_chi_square(counts: np.ndarray, trials: int) -> tuple[float, float, int]:
    """Chi-square test that each trial's empty set is a uniform random subset.

    ``counts[j]`` is how many trials left slot j empty. With r empties per
    trial out of m slots, ``counts`` has covariance
    ``T p (1-p) m/(m-1) (I - 11'/m)`` where ``p = r/m``, so the scaled sum
    below is asymptotically chi-square with m-1 degrees of freedom.
    """
    counts = np.asarray(counts, dtype=float)
    m = len(counts)
    p = counts.sum() / (trials * m)
    if p >= 1.0 or p <= 0.0 or m < 2:
        return 0.0, 1.0, max(m - 1, 0)
    expected = trials * p
    stat = (m - 1) / m * float(((counts - expected) ** 2).sum()) / (expected * (1.0 - p))
    return stat, float(stats.chi2.sf(stat, m - 1)), m - 1


@dataclass
class AggregateSummary:
    config: dict
    rounds: int
    placed: int
    failures: int
    failed_trials: int
    mean_path_edges: Optional[float]
    path_edges: dict
    path_vertices: dict
    per_k: dict
    blocked_sizes: dict
    nu: dict
    nu_over_budget: int
    max_degree_histogram: dict
    short_cycles: dict
    empty_slot_chi2: dict
    trace_failures: int
    evictor_failures: int

    def to_dict(self) -> dict:
        return asdict(self)


def aggregate(config: ExperimentConfig, results: Sequence[TrialResult]) -> AggregateSummary:
    n = config.n
    records = [r for res in results for r in res.records]
    placed = [r for r in records if r.status == "placed"]
    edges = np.array([r.path_edges for r in placed], dtype=float)

    per_k = {"k": [], "count": [], "mean": [], "sem": [], "p50": [], "p90": [], "p99": [], "max": []}
    if records:
        by_k = np.full((len(results), n), np.nan)
        for ti, res in enumerate(results):
            for r in res.records:
                if r.status == "placed":
                    by_k[ti, r.k - 1] = r.path_edges
        for k in range(1, n + 1):
            col = by_k[:, k - 1]
            desc = _describe(col[~np.isnan(col)])
            per_k["k"].append(k)
            for key in ("count", "mean", "sem", "p50", "p90", "p99", "max"):
                per_k[key].append(desc[key])

    blocked = {}
    for k in config.checkpoints if config.oracle_level != "none" else ():
        sizes = [res.blocked_sizes[k] for res in results if k in res.blocked_sizes]
        blocked[str(k)] = {
            "samples": sizes,
            "mean": float(np.mean(sizes)) if sizes else None,
            "threshold": k * gamma(config.epsilon, config.d) if config.epsilon else None,
        }

    nu = {}
    keys = sorted({key for res in results for key in res.nu})
    for k, ell in keys:
        vals = np.array([res.nu[(k, ell)][0] for res in results if (k, ell) in res.nu], dtype=float)
        und = np.array([res.nu[(k, ell)][1] for res in results if (k, ell) in res.nu], dtype=float)
        nu[f"{k},{ell}"] = {
            "k": k,
            "ell": ell,
            "samples": int(len(vals)),
            "mean": float(vals.mean()),
            "sem": _sem(vals),
            "undirected_mean": float(und.mean()),
            "max": int(vals.max()),
        }

    deg_hist = Counter(res.max_degree for res in results if res.max_degree is not None)
    cyc = [res.cycle_count for res in results if res.cycle_count is not None]
    par = [res.parallel_cycles for res in results if res.parallel_cycles is not None]
    short_cycles = {
        "instances": len(cyc),
        "cap": gm.default_cycle_cap(n) if n else None,
        "mean_cycle_count": float(np.mean(cyc)) if cyc else None,
        "mean_parallel_count": float(np.mean(par)) if par else None,
        "histogram": {str(c): v for c, v in sorted(Counter(cyc).items())},
    }

    counts = np.zeros(config.m)
    for res in results:
        counts[res.empty_slots] += 1
    stat, pval, df = empty_slot_chi_square(counts, len(results))

    return AggregateSummary(
        config=config.echo(),
        rounds=len(records),
        placed=len(placed),
        failures=len(records) - len(placed),
        failed_trials=sum(1 for res in results if any(r.status != "placed" for r in res.records)),
        mean_path_edges=float(edges.mean()) if len(edges) else None,
        path_edges=_describe(edges),
        path_vertices=_describe(edges + 1),
        per_k=per_k,
        blocked_sizes=blocked,
        nu=nu,
        nu_over_budget=sum(res.nu_over_budget for res in results),
        max_degree_histogram={str(k): v for k, v in sorted(deg_hist.items())},
        short_cycles=short_cycles,
        empty_slot_chi2={"statistic": stat, "p_value": pval, "df": df},
        trace_failures=sum(res.trace_failures for res in results),
        evictor_failures=sum(res.evictor_failures for res in results),
    )


def run_experiment(
    config: ExperimentConfig, workers: Optional[int] = None
) -> tuple[AggregateSummary, list[TrialRecord]]:
    results = run_trials(config, workers)
    records = [r for res in results for r in res.records]
    records.sort(key=lambda r: (r.trial, r.k))
    return aggregate(config, results), records


# persistence ---------------------------------------------------------------


def records_csv(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in sorted(records, key=lambda r: (r.trial, r.k)):
        w.writerow(r.row())
    return buf.getvalue()


def _json(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return "null"
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(f"{_json(k)}:{_json(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def summary_json(summary: AggregateSummary | dict) -> str:
    """Sorted keys, floats with 17 significant digits."""
    data = summary.to_dict() if isinstance(summary, AggregateSummary) else summary
    return _json(data) + "\n"


def write_outputs(out_dir: str, summary: AggregateSummary, records: Sequence[TrialRecord]) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "records.csv"), "w", newline="") as f:
        f.write(records_csv(records))
    with open(os.path.join(out_dir, "summary.json"), "w") as f:
        f.write(summary_json(summary))


# focused checks ------------------------------------------------------------


def uniformity_test_empty_set(
    config: ExperimentConfig, k: int, insert: InsertFn = insert_random_walk
) -> UniformityResult:
    """p-value for "the slots still empty before round k form a uniform subset"."""
    if not 1 <= k <= config.n + 1:
        raise ValueError(f"k must lie in [1, n+1], got {k}")
    m, trials = config.m, config.trials
    p = (m - k + 1) / m
    if p < 1.0 and min(trials * p, trials * (1 - p)) < 5:
        raise InsufficientTrials(
            f"{trials} trials give expected per-slot counts below 5 at k={k}, m={m}"
        )
    counts = np.zeros(m)
    for t in range(trials):
        table = CuckooTable(config.family(t))
        rng = config.walk_rng(t)
        for item in range(k - 1):
            insert(table, item, config.policy, rng)
        counts[[s for s, x in enumerate(table.slot_to_item) if x < 0]] += 1
    stat, pval, df = empty_slot_chi_square(counts, trials)
    return UniformityResult(stat, pval, df, trials, k)


@dataclass
class BlockedReport:
    gamma: float
    theta: Optional[float]
    per_k: dict
    exceed_fraction: float
    flagged: bool
    vacuous: bool
    empty_at_k1: bool


def blocked_fraction_check(
    config: ExperimentConfig,
    theta: Optional[float] = None,
    summary: Optional[AggregateSummary] = None,
    workers: Optional[int] = None,
) -> BlockedReport:
    """Fraction of (trial, checkpoint) pairs where |B_k| >= k * gamma.

    A checkpoint with ``k * gamma < 1`` is vacuous: any nonempty B_k exceeds
    the threshold there, so those pairs are reported but marked.
    """
    if config.epsilon is None:
        raise ValueError("blocked_fraction_check needs epsilon")
    if summary is None:
        if config.oracle_level == "none":
            raise ValueError("blocked_fraction_check needs oracle_level light or full")
        summary, _ = run_experiment(config, workers)
    g = gamma(config.epsilon, config.d)
    per_k = {}
    exceed = total = 0
    vacuous = False
    for key, entry in summary.blocked_sizes.items():
        k = int(key)
        thr = k * g
        hits = sum(1 for s in entry["samples"] if s >= thr)
        per_k[key] = {"threshold": thr, "exceedances": hits, "samples": len(entry["samples"]), "vacuous": thr < 1}
        vacuous |= thr < 1
        exceed += hits
        total += len(entry["samples"])
    frac = exceed / total if total else 0.0
    # B_1 is empty by definition: nothing is occupied before round 1
    empty_at_k1 = all(s == 0 for s in summary.blocked_sizes.get("1", {}).get("samples", []))
    return BlockedReport(g, theta, per_k, frac, frac > 0.01, vacuous, empty_at_k1)


@dataclass
class CompareReport:
    trials: int
    n: int
    walk_totals: list[int]
    bfs_paired_totals: list[int]
    bfs_independent_totals: list[int]
    paired_violations: list[int]
    walk_per_item: float
    bfs_per_item: float
    per_k_walk_mean: list[float]
    per_k_bfs_mean: list[float]

    @property
    def paired_ok(self) -> bool:
        return not self.paired_violations


def compare_walk_vs_bfs(config: ExperimentConfig) -> CompareReport:
    """Drive each graph instance with the walk and with shortest augmenting paths.

    ``bfs_paired`` measures the shortest augmenting path from the walk's own
    pre-round state, so it is bounded by the walk round by round.
    ``bfs_independent`` builds a separate table by BFS insertion.
    """
    n = config.n
    walk_totals, paired_totals, indep_totals, violations = [], [], [], []
    walk_k = np.zeros(n)
    bfs_k = np.zeros(n)
    for t in range(config.trials):
        cfg = config.family(t)
        rng = config.walk_rng(t)
        walk = CuckooTable(cfg)
        indep = CuckooTable(cfg)
        wsum = psum = isum = 0
        bad = False
        for item in range(n):
            path = shortest_augmenting_path(walk, item)
            out = insert_random_walk(walk, item, config.policy, rng)
            if out.placed:
                p_len = 2 * len(path) - 1
                w_len = out.trace.path_edges
                wsum += w_len
                psum += p_len
                walk_k[item] += w_len
                bfs_k[item] += p_len
                bad |= p_len > w_len
            iout = insert_bfs(indep, item)
            if iout.placed:
                isum += iout.trace.path_edges
        walk_totals.append(wsum)
        paired_totals.append(psum)
        indep_totals.append(isum)
        if bad or psum > wsum:
            violations.append(t)
    denom = max(config.trials * n, 1)
    return CompareReport(
        trials=config.trials,
        n=n,
        walk_totals=walk_totals,
        bfs_paired_totals=paired_totals,
        bfs_independent_totals=indep_totals,
        paired_violations=violations,
        walk_per_item=sum(walk_totals) / denom,
        bfs_per_item=sum(paired_totals) / denom,
        per_k_walk_mean=list(walk_k / config.trials),
        per_k_bfs_mean=list(bfs_k / config.trials),
    )
