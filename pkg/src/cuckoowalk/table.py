"""The cuckoo table: random-walk insertion, BFS insertion and lookup.

A table is a matching of inserted items into slots. Every round either
places the new item (possibly after a chain of evictions) or rolls back to
the exact pre-round state.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

from cuckoowalk.hash_family import FamilyConfig, LazyChoices

EMPTY = -1

LITERAL = "literal"
NO_BACKTRACK = "no_backtrack"

PLACED = "placed"
FAILED_MAX_STEPS = "failed_max_steps"
FAILED_NO_PATH = "failed_no_path"


class Step(NamedTuple):
    evictor: int
    slot: int
    evicted: Optional[int]


@dataclass
class InsertTrace:
    item: int
    steps: list[Step] = field(default_factory=list)
    terminal_slot: Optional[int] = None
    revealed_count: int = 0

    @property
    def evictions(self) -> int:
        return sum(1 for s in self.steps if s.evicted is not None)

    @property
    def path_edges(self) -> int:
        # x1, xi1, x2, ..., x_{s+1}, xi_{s+1}: two edges per eviction plus the final one
        if self.terminal_slot is None:
            return 2 * self.evictions
        return 2 * self.evictions + 1

    @property
    def path_vertices(self) -> int:
        return self.path_edges + 1


@dataclass
class InsertOutcome:
    status: str
    trace: InsertTrace

    @property
    def placed(self) -> bool:
        return self.status == PLACED


@dataclass(frozen=True)
class WalkPolicy:
    mode: str = LITERAL
    max_steps: int = 1000

    def __post_init__(self):
        if self.mode not in (LITERAL, NO_BACKTRACK):
            raise ValueError(f"unknown walk mode {self.mode!r}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps}")

    @classmethod
    def default(cls, m: int, mode: str = LITERAL) -> "WalkPolicy":
        return cls(mode=mode, max_steps=default_max_steps(m))


def default_max_steps(m: int) -> int:
    return max(1, 100 * math.ceil(math.log2(m))) if m > 1 else 100


class CuckooTable:
    """Matching of items into slots, plus the lazy view of the choices."""

    def __init__(self, cfg: FamilyConfig, fixed_choices: Optional[Sequence[Sequence[int]]] = None):
        self.cfg = cfg
        self.slot_to_item: list[int] = [EMPTY] * cfg.m
        self.item_to_slot: dict[int, int] = {}
        self.choices = LazyChoices(cfg, fixed_choices)

    @property
    def m(self) -> int:
        return self.cfg.m

    @property
    def d(self) -> int:
        return self.cfg.d

    @property
    def size(self) -> int:
        return len(self.item_to_slot)

    def occupied(self) -> set[int]:
        return {s for s, x in enumerate(self.slot_to_item) if x != EMPTY}

    def snapshot(self) -> tuple[tuple[int, ...], tuple[tuple[int, int], ...]]:
        """Hashable copy of the matching, for equality checks."""
        return tuple(self.slot_to_item), tuple(sorted(self.item_to_slot.items()))

    def copy(self) -> "CuckooTable":
        other = CuckooTable.__new__(CuckooTable)
        other.cfg = self.cfg
        other.slot_to_item = list(self.slot_to_item)
        other.item_to_slot = dict(self.item_to_slot)
        other.choices = LazyChoices(self.cfg, self.choices.fixed)
        return other

    def matching_errors(self) -> list[str]:
        """Full scan of the matching invariant; empty list when it holds."""
        errors = []
        for x, s in self.item_to_slot.items():
            if self.slot_to_item[s] != x:
                errors.append(f"item {x} maps to slot {s} holding {self.slot_to_item[s]}")
            if s not in self.choices.vector(x):
                errors.append(f"item {x} sits in slot {s}, not one of its choices")
        held = [x for x in self.slot_to_item if x != EMPTY]
        if len(held) != len(self.item_to_slot):
            errors.append(f"{len(held)} occupied slots but {self.size} placed items")
        if len(set(held)) != len(held):
            errors.append("an item occupies two slots")
        return errors

    def _check_insertable(self, item: int) -> None:
        # a full table is allowed: the round then fails by its step cap
        if item in self.item_to_slot:
            raise ValueError(f"item {item} is already placed")
        if self.choices.fixed is not None and not 0 <= item < len(self.choices.fixed):
            raise ValueError(f"item {item} has no fixed choice vector")

    def _apply(self, steps: list[Step]) -> None:
        for x, s, z in steps:
            self.slot_to_item[s] = x
            self.item_to_slot[x] = s
            if z is not None and self.item_to_slot.get(z) == s:
                del self.item_to_slot[z]

    def _undo(self, item: int, steps: list[Step]) -> None:
        for x, s, z in reversed(steps):
            self.slot_to_item[s] = EMPTY if z is None else z
            if z is not None:
                self.item_to_slot[z] = s
        self.item_to_slot.pop(item, None)


def insert_random_walk(
    table: CuckooTable, item: int, policy: WalkPolicy, rng: random.Random
) -> InsertOutcome:
    """One round of random-walk insertion.

    Step 2 visits x's choice positions in a fresh random order and stops at
    the first empty slot, which is a uniform pick among the empty positions
    and reveals choices one at a time. Step 3 picks a position uniformly
    (``no_backtrack`` excludes positions equal to the slot x was just evicted
    from, unless that leaves none).
    """
    table._check_insertable(item)
    d = table.d
    slots = table.slot_to_item
    where = table.item_to_slot
    reveal = table.choices.reveal
    exposed_before = table.choices.exposed
    trace = InsertTrace(item)
    steps = trace.steps

    x = item
    vacated = None
    evictions = 0
    while True:
        order = list(range(d))
        for i in range(d):
            j = rng.randrange(i, d)
            order[i], order[j] = order[j], order[i]
            y = reveal(x, order[i])
            if slots[y] == EMPTY:
                slots[y] = x
                where[x] = y
                steps.append(Step(x, y, None))
                trace.terminal_slot = y
                trace.revealed_count = table.choices.exposed - exposed_before
                return InsertOutcome(PLACED, trace)

        if evictions >= policy.max_steps:
            table._undo(item, steps)
            trace.revealed_count = table.choices.exposed - exposed_before
            return InsertOutcome(FAILED_MAX_STEPS, trace)

        # every position was revealed by the scan above
        if policy.mode == NO_BACKTRACK and vacated is not None:
            allowed = [p for p in range(d) if reveal(x, p) != vacated]
        else:
            allowed = None
        if allowed:
            y = reveal(x, allowed[rng.randrange(len(allowed))])
        else:
            y = reveal(x, rng.randrange(d))

        z = slots[y]
        slots[y] = x
        where[x] = y
        del where[z]
        steps.append(Step(x, y, z))
        evictions += 1
        vacated = y
        x = z


def shortest_augmenting_path(table: CuckooTable, item: int) -> Optional[list[Step]]:
    """BFS over slots for a shortest path from ``item`` to an empty slot.

    Reads full choice vectors, so it does not disturb the table's exposure
    counters. Returns None when no augmenting path exists.
    """
    slots = table.slot_to_item
    vector = table.choices.vector
    parent: dict[int, Optional[int]] = {}
    queue: list[int] = []
    found = None

    def expand(x: int, via: Optional[int]) -> Optional[int]:
        for s in vector(x):
            if s in parent:
                continue
            parent[s] = via
            if slots[s] == EMPTY:
                return s
            queue.append(s)
        return None

    found = expand(item, None)
    head = 0
    while found is None and head < len(queue):
        s = queue[head]
        head += 1
        found = expand(slots[s], s)
    if found is None:
        return None

    path = [found]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    path.reverse()
    steps = []
    x = item
    for s in path:
        z = slots[s]
        steps.append(Step(x, s, None if z == EMPTY else z))
        x = z
    return steps


def insert_bfs(
    table: CuckooTable, item: int, policy: Optional[WalkPolicy] = None, rng: Optional[random.Random] = None
) -> InsertOutcome:
    """Insert along a shortest augmenting path; fails only if none exists.

    ``policy`` and ``rng`` are ignored; they make the signature interchangeable
    with :func:`insert_random_walk`.
    """
    table._check_insertable(item)
    steps = shortest_augmenting_path(table, item)
    trace = InsertTrace(item)
    if steps is None:
        return InsertOutcome(FAILED_NO_PATH, trace)
    table._apply(steps)
    trace.steps = steps
    trace.terminal_slot = steps[-1].slot
    return InsertOutcome(PLACED, trace)


def lookup(table: CuckooTable, item: int) -> Optional[int]:
    if table.choices.fixed is not None and not 0 <= item < len(table.choices.fixed):
        return None
    for s in table.choices.vector(item):
        if table.slot_to_item[s] == item:
            return s
    return None


def replay(table: CuckooTable, trace: InsertTrace) -> None:
    """Apply a placed trace to ``table`` step by step."""
    table._apply(trace.steps)


InsertFn = Callable[[CuckooTable, int, WalkPolicy, random.Random], InsertOutcome]


def build_table(
    n: int,
    cfg: FamilyConfig,
    policy: Optional[WalkPolicy] = None,
    rng: random.Random | int | None = None,
    *,
    stop_on_failure: bool = True,
    insert: InsertFn = insert_random_walk,
    on_round: Optional[Callable[[int, CuckooTable], None]] = None,
    fixed_choices: Optional[Sequence[Sequence[int]]] = None,
) -> tuple[CuckooTable, list[InsertOutcome]]:
    """Insert items ``0 .. n-1`` in order.

    ``on_round(k, table)`` is called before round ``k`` (1-based) runs, with the
    table holding the state the round starts from. With ``stop_on_failure``
    the returned outcome list ends at the first failed round.
    """
    if n > cfg.m:
        raise ValueError(f"cannot place {n} items into {cfg.m} slots")
    if policy is None:
        policy = WalkPolicy.default(cfg.m)
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    table = CuckooTable(cfg, fixed_choices)
    outcomes = []
    for item in range(n):
        if on_round is not None:
            on_round(item + 1, table)
        out = insert(table, item, policy, rng)
        outcomes.append(out)
        if not out.placed and stop_on_failure:
            break
    return table, outcomes
