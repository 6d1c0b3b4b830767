"""Exhaustive structural oracles over the bipartite cuckoo multigraph.

Vertices are items ``0 .. n-1`` on one side and slots ``0 .. m-1`` on the
other; item ``x`` has one edge per choice position, so a repeated choice is a
parallel edge. Everything here is exact enumeration meant for small
instances, guarded by a work budget.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from cuckoowalk.hash_family import FamilyConfig, choice_matrix, lazy_reveal
from cuckoowalk.table import EMPTY, InsertTrace

DEFAULT_BUDGET = 10**8
A0 = 3


class BudgetExceeded(RuntimeError):
    def __init__(self, what: str, predicted: float, budget: float):
        super().__init__(f"{what}: predicted work {predicted:.3g} exceeds budget {budget:.3g}")
        self.what = what
        self.predicted = predicted
        self.budget = budget


class CuckooGraph:
    def __init__(self, m: int, choices: np.ndarray):
        choices = np.asarray(choices, dtype=np.int64)
        if choices.ndim != 2:
            raise ValueError("choices must be an (n, d) array")
        if choices.size and (choices.min() < 0 or choices.max() >= m):
            raise ValueError("choice outside [0, m)")
        self.m_slots = m
        self.choices = choices

    @classmethod
    def from_config(cls, cfg: FamilyConfig, n: int) -> "CuckooGraph":
        return cls(cfg.m, choice_matrix(cfg, n))

    @classmethod
    def from_lists(cls, m: int, choices: Sequence[Sequence[int]], d: Optional[int] = None) -> "CuckooGraph":
        if not choices:
            return cls(m, np.zeros((0, d or 2), dtype=np.int64))
        return cls(m, np.array(choices, dtype=np.int64))

    @property
    def n_items(self) -> int:
        return self.choices.shape[0]

    @property
    def d(self) -> int:
        return self.choices.shape[1]

    @cached_property
    def adjacency(self) -> list[tuple[int, ...]]:
        return [tuple(int(s) for s in row) for row in self.choices]

    @cached_property
    def item_edges(self) -> list[dict[int, int]]:
        """Per item: slot -> edge multiplicity."""
        return [dict(Counter(row)) for row in self.adjacency]

    @cached_property
    def slot_edges(self) -> list[dict[int, int]]:
        """Per slot: item -> edge multiplicity."""
        out: list[dict[int, int]] = [{} for _ in range(self.m_slots)]
        for x, edges in enumerate(self.item_edges):
            for s, mult in edges.items():
                out[s][x] = mult
        return out

    def degrees(self) -> np.ndarray:
        return np.bincount(self.choices.ravel(), minlength=self.m_slots)


@dataclass(frozen=True)
class BlockedSet:
    k: int
    members: frozenset[int]

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, x: object) -> bool:
        return x in self.members


@dataclass(frozen=True)
class InterestingPathCount:
    k: int
    ell: int
    count: int
    undirected: int


@dataclass(frozen=True)
class CycleStats:
    cap: int
    cycle_count: int
    parallel_count: int
    by_length: dict[int, int]
    near_cycle_vertices: int
    radius: int
    max_degree: int


def default_cycle_cap(n: int) -> int:
    """``max(4, ceil((log log n)^2))`` rounded up to even."""
    if n < 3:
        return 4
    lam = math.ceil(math.log(math.log(n)) ** 2) if math.log(n) > 1 else 0
    lam += lam % 2
    return max(4, lam)


def default_radius(n: int, a0: int = A0) -> int:
    if n < 3 or math.log(n) <= 1:
        return 0
    return math.ceil(2 * a0 * math.log(math.log(n)))


def blocked_set(graph: CuckooGraph, occupied: Iterable[int], k: int) -> BlockedSet:
    """Items among the first k whose every choice lies in ``occupied``."""
    if k > graph.n_items:
        raise ValueError(f"k={k} exceeds n_items={graph.n_items}")
    if k <= 0:
        return BlockedSet(k, frozenset())
    occ = np.zeros(graph.m_slots, dtype=bool)
    occ[list(occupied)] = True
    mask = occ[graph.choices[:k]].all(axis=1)
    return BlockedSet(k, frozenset(int(x) for x in np.nonzero(mask)[0]))


def blocked_set_lazy(cfg: FamilyConfig, occupied: Iterable[int], k: int) -> BlockedSet:
    """Same definition, evaluated per item through one-at-a-time reveals."""
    occ = set(occupied)
    members = set()
    for x in range(max(k, 0)):
        if all(lazy_reveal(cfg, x, j) in occ for j in range(cfg.d)):
            members.add(x)
    return BlockedSet(k, frozenset(members))


def count_interesting_paths(
    graph: CuckooGraph,
    blocked: BlockedSet,
    occupied: Iterable[int],
    ell: int,
    budget: float = DEFAULT_BUDGET,
) -> InterestingPathCount:
    """Count interesting paths ``(x1, s1, x2, ..., x_ell)``.

    All x_i are distinct members of ``blocked``, all s_i are distinct
    occupied slots. Paths are directed vertex sequences and each one is
    weighted by the product of its edge multiplicities, so a path through a
    doubled edge counts once per edge instance. ``undirected`` halves the
    count for ell >= 2 (every reversed interesting path is interesting too).
    """
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    members = blocked.members
    predicted = float(len(members) * graph.d) ** ell
    if predicted > budget:
        raise BudgetExceeded(f"interesting paths ell={ell}", predicted, budget)
    occ = set(occupied)
    item_edges = graph.item_edges
    slot_edges = graph.slot_edges

    def extend(x: int, depth: int, used_x: set[int], used_s: set[int]) -> int:
        if depth == ell:
            return 1
        total = 0
        for s, mu in item_edges[x].items():
            if s not in occ or s in used_s:
                continue
            used_s.add(s)
            for y, nu in slot_edges[s].items():
                if y in members and y not in used_x:
                    used_x.add(y)
                    total += mu * nu * extend(y, depth + 1, used_x, used_s)
                    used_x.discard(y)
            used_s.discard(s)
        return total

    count = sum(extend(x, 1, {x}, set()) for x in sorted(members))
    undirected = count if ell == 1 else count // 2
    return InterestingPathCount(blocked.k, ell, count, undirected)


def _predict_cycle_work(graph: CuckooGraph, cap: int) -> float:
    delta = max_degree(graph)
    return float(graph.n_items) * float(graph.d * max(delta, 1)) ** (cap // 2)


def _enumerate_cycles(graph: CuckooGraph, cap: int):
    """Yield (length, weight, vertex set) once per direction of each cycle.

    Vertex ids: item x -> x, slot s -> n + s. The smallest item on each cycle
    is its anchor, so every cycle shows up exactly twice.
    """
    n = graph.n_items
    item_edges = graph.item_edges
    slot_edges = graph.slot_edges
    half = cap // 2

    for x0 in range(n):
        home = item_edges[x0]
        items = [x0]
        slots: list[int] = []

        def walk(x: int, weight: int):
            for s, mu in item_edges[x].items():
                if s in slots:
                    continue
                if len(items) >= 2 and s in home:
                    w = weight * mu * home[s]
                    yield 2 * len(items), w, set(items) | {n + t for t in slots} | {n + s}
                if len(items) < half:
                    slots.append(s)
                    for y, nu in slot_edges[s].items():
                        if y > x0 and y not in items:
                            items.append(y)
                            yield from walk(y, weight * mu * nu)
                            items.pop()
                    slots.pop()

        yield from walk(x0, 1)


def count_short_cycles(
    graph: CuckooGraph,
    cap: int,
    radius: int = 0,
    budget: float = DEFAULT_BUDGET,
) -> CycleStats:
    """Count simple cycles of length 4 .. cap; report parallel edges apart.

    ``cycle_count`` excludes the length-2 cycles formed by parallel edges,
    which are reported in ``parallel_count`` as ``C(mult, 2)`` per item-slot
    pair.
    """
    if cap < 4 or cap % 2:
        raise ValueError(f"cap must be an even integer >= 4, got {cap}")
    predicted = _predict_cycle_work(graph, cap)
    if predicted > budget:
        raise BudgetExceeded(f"short cycles cap={cap}", predicted, budget)
    by_length: Counter[int] = Counter()
    on_cycle: set[int] = set()
    for length, weight, verts in _enumerate_cycles(graph, cap):
        by_length[length] += weight
        on_cycle |= verts
    by_length = Counter({L: c // 2 for L, c in by_length.items()})
    parallel = sum(mu * (mu - 1) // 2 for edges in graph.item_edges for mu in edges.values())
    return CycleStats(
        cap=cap,
        cycle_count=sum(by_length.values()),
        parallel_count=parallel,
        by_length=dict(sorted(by_length.items())),
        near_cycle_vertices=_count_within(graph, on_cycle, radius),
        radius=radius,
        max_degree=max_degree(graph),
    )


def short_cycle_vertices(graph: CuckooGraph, cap: int, budget: float = DEFAULT_BUDGET) -> set[int]:
    predicted = _predict_cycle_work(graph, cap)
    if predicted > budget:
        raise BudgetExceeded(f"short cycles cap={cap}", predicted, budget)
    out: set[int] = set()
    for _, _, verts in _enumerate_cycles(graph, cap):
        out |= verts
    return out


def _count_within(graph: CuckooGraph, sources: set[int], radius: int) -> int:
    n = graph.n_items
    dist = {v: 0 for v in sources}
    queue = deque(sources)
    while queue:
        v = queue.popleft()
        if dist[v] == radius:
            continue
        if v < n:
            nbrs = (n + s for s in graph.item_edges[v])
        else:
            nbrs = iter(graph.slot_edges[v - n])
        for u in nbrs:
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return len(dist)


def vertices_near_short_cycles(
    graph: CuckooGraph, cap: int, radius: int, budget: float = DEFAULT_BUDGET
) -> int:
    """Vertices within ``radius`` of a simple cycle of length <= cap."""
    if cap < 4 or cap % 2:
        raise ValueError(f"cap must be an even integer >= 4, got {cap}")
    return _count_within(graph, short_cycle_vertices(graph, cap, budget), radius)


def max_degree(graph: CuckooGraph) -> int:
    """Largest slot degree, counting parallel edges."""
    if graph.n_items == 0:
        return 0
    return int(graph.degrees().max())


class TraceCheck(NamedTuple):
    ok: bool
    reason: str

    def __bool__(self) -> bool:
        return self.ok


def verify_trace_as_augmenting_path(graph: CuckooGraph, pre, trace: InsertTrace) -> TraceCheck:
    """Check a placed trace is an alternating walk ending in a slot empty in ``pre``.

    ``pre`` is the table (or its ``slot_to_item`` list) the round started from.
    """
    slots = list(getattr(pre, "slot_to_item", pre))
    steps = trace.steps
    if not steps:
        return TraceCheck(False, "empty trace")
    if trace.terminal_slot is None:
        return TraceCheck(False, "round did not place the item")
    if trace.item in slots:
        return TraceCheck(False, "inserted item already placed")
    if trace.item >= graph.n_items:
        return TraceCheck(False, "inserted item outside graph")
    if steps[0].evictor != trace.item:
        return TraceCheck(False, "walk does not start at the inserted item")
    x = trace.item
    for i, (evictor, s, evicted) in enumerate(steps):
        if evictor != x:
            return TraceCheck(False, f"step {i}: evictor {evictor} is not the displaced item {x}")
        if not 0 <= s < graph.m_slots or s not in graph.item_edges[evictor]:
            return TraceCheck(False, f"step {i}: edge ({evictor}, {s}) not in graph")
        resident = None if slots[s] == EMPTY else slots[s]
        if resident != evicted:
            return TraceCheck(False, f"step {i}: slot {s} holds {resident}, trace says {evicted}")
        last = i == len(steps) - 1
        if (evicted is None) != last:
            return TraceCheck(False, f"step {i}: placement before the end of the walk")
        slots[s] = evictor
        x = evicted
    if trace.terminal_slot != steps[-1].slot:
        return TraceCheck(False, "terminal slot mismatch")
    return TraceCheck(True, "ok")


def evictors_are_blocked(trace: InsertTrace, blocked: BlockedSet, occupied: set[int]) -> bool:
    """Every evicting item lies in B_k and every slot it pushes into is occupied.

    The occupied set does not change during a round, so this holds for the
    whole walk, cycles included; in particular the first simple stretch of
    the walk is an interesting path.
    """
    for x, s, z in trace.steps:
        if z is None:
            continue
        if x not in blocked or s not in occupied:
            return False
    return True
