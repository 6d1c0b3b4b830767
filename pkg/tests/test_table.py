import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuckoowalk.hash_family import FamilyConfig
from cuckoowalk.table import (
    FAILED_MAX_STEPS,
    FAILED_NO_PATH,
    NO_BACKTRACK,
    PLACED,
    CuckooTable,
    WalkPolicy,
    build_table,
    default_max_steps,
    insert_bfs,
    insert_random_walk,
    lookup,
    replay,
    shortest_augmenting_path,
)


def place(table, item, slot):
    table.slot_to_item[slot] = item
    table.item_to_slot[item] = slot


def fixed_table(m, choices):
    return CuckooTable(FamilyConfig(m, len(choices[0])), fixed_choices=choices)


def within_3se(hits, trials, p):
    return abs(hits - trials * p) <= 3 * math.sqrt(trials * p * (1 - p))


def test_empty_table_places_directly():
    table = CuckooTable(FamilyConfig(64, 4, seed=1))
    out = insert_random_walk(table, 0, WalkPolicy(), random.Random(0))
    assert out.status == PLACED
    assert out.trace.path_edges == 1
    assert out.trace.evictions == 0
    assert out.trace.revealed_count == 1
    assert lookup(table, 0) == out.trace.terminal_slot


def test_forced_single_eviction():
    # B = item 0 with choices [0, 1] sits in slot 0; A = item 1 has [0, 0]
    table = fixed_table(2, [[0, 1], [0, 0]])
    place(table, 0, 0)
    out = insert_random_walk(table, 1, WalkPolicy(), random.Random(3))
    assert out.status == PLACED
    assert out.trace.path_edges == 3
    assert [tuple(s) for s in out.trace.steps] == [(1, 0, 0), (0, 1, None)]
    assert table.slot_to_item == [1, 0]
    assert not table.matching_errors()


def test_failed_round_rolls_back():
    table = fixed_table(1, [[0, 0], [0, 0]])
    place(table, 0, 0)
    before = table.snapshot()
    out = insert_random_walk(table, 1, WalkPolicy(max_steps=10), random.Random(0))
    assert out.status == FAILED_MAX_STEPS
    assert out.trace.evictions == 10
    assert table.snapshot() == before


def test_bfs_examples():
    table = CuckooTable(FamilyConfig(16, 3, seed=2))
    out = insert_bfs(table, 0)
    assert out.status == PLACED and out.trace.path_edges == 1

    table = fixed_table(2, [[0, 1], [0, 0]])
    place(table, 0, 0)
    out = insert_bfs(table, 1)
    assert out.trace.path_edges == 3
    assert table.slot_to_item == [1, 0]

    table = fixed_table(1, [[0, 0], [0, 0]])
    place(table, 0, 0)
    before = table.snapshot()
    out = insert_bfs(table, 1)
    assert out.status == FAILED_NO_PATH
    assert table.snapshot() == before


def test_insert_rejects_placed_item():
    table = CuckooTable(FamilyConfig(8, 2))
    insert_random_walk(table, 0, WalkPolicy(), random.Random(0))
    with pytest.raises(ValueError):
        insert_random_walk(table, 0, WalkPolicy(), random.Random(0))
    with pytest.raises(ValueError):
        insert_bfs(table, 0)


def test_lookup_follows_displacement():
    table = fixed_table(2, [[0, 1], [0, 0]])
    place(table, 0, 0)
    assert lookup(table, 0) == 0
    insert_random_walk(table, 1, WalkPolicy(), random.Random(0))
    assert lookup(table, 0) == 1
    assert lookup(table, 1) == 0


def test_lookup_absent():
    table = CuckooTable(FamilyConfig(32, 3, seed=4))
    assert lookup(table, 17) is None


def test_step2_uniform_over_empty_positions():
    # choices [0, 0, 1] all empty: slot 0 holds 2 of 3 positions
    trials = 30000
    rng = random.Random(11)
    hits = 0
    for _ in range(trials):
        table = fixed_table(3, [[0, 0, 1]])
        hits += insert_random_walk(table, 0, WalkPolicy(), rng).trace.terminal_slot == 0
    assert within_3se(hits, trials, 2 / 3)


def test_step3_uniform_over_positions():
    # A = [0, 0, 1] finds 0 and 1 taken and evicts from slot 0 w.p. 2/3
    trials = 30000
    rng = random.Random(12)
    hits = 0
    for _ in range(trials):
        table = fixed_table(3, [[0, 2, 2], [1, 2, 2], [0, 0, 1]])
        place(table, 0, 0)
        place(table, 1, 1)
        out = insert_random_walk(table, 2, WalkPolicy(), rng)
        assert out.trace.path_edges == 3
        hits += out.trace.steps[0].slot == 0
    assert within_3se(hits, trials, 2 / 3)


def test_no_backtrack_avoids_vacated_slot():
    # A = [0, 1] evicts B from 0; B = [0, 1] with 1 taken must not return to 0
    for seed in range(200):
        table = fixed_table(3, [[0, 1], [1, 2], [0, 1]])
        place(table, 0, 0)
        place(table, 1, 1)
        out = insert_random_walk(table, 2, WalkPolicy(NO_BACKTRACK, 50), random.Random(seed))
        assert out.status == PLACED
        for prev, step in zip(out.trace.steps, out.trace.steps[1:]):
            assert step.slot != prev.slot


def test_no_backtrack_falls_back_when_all_equal():
    table = fixed_table(1, [[0, 0], [0, 0]])
    place(table, 0, 0)
    out = insert_random_walk(table, 1, WalkPolicy(NO_BACKTRACK, 5), random.Random(0))
    assert out.status == FAILED_MAX_STEPS


def test_policy_validation():
    with pytest.raises(ValueError):
        WalkPolicy(max_steps=0)
    with pytest.raises(ValueError):
        WalkPolicy(mode="greedy")
    assert default_max_steps(2048) == 1100
    assert WalkPolicy.default(1).max_steps >= 1


def test_build_table_trivial():
    table, outs = build_table(0, FamilyConfig(4, 2))
    assert table.size == 0 and outs == []
    table, outs = build_table(1, FamilyConfig(1, 2), rng=0)
    assert len(outs) == 1 and outs[0].trace.path_edges == 1
    with pytest.raises(ValueError):
        build_table(3, FamilyConfig(2, 2))


def test_build_table_stops_at_first_failure():
    cfg = FamilyConfig(2, 2)
    choices = [[0, 0], [0, 0]]
    table, outs = build_table(2, cfg, WalkPolicy(max_steps=3), rng=0, fixed_choices=choices)
    assert [o.status for o in outs] == [PLACED, FAILED_MAX_STEPS]


def test_half_load_d30_never_fails():
    cfg_m, d = 2048, 30
    n = 1024
    for seed in range(100):
        cfg = FamilyConfig(cfg_m, d, seed=seed)
        table, outs = build_table(n, cfg, rng=random.Random(seed + 10**6))
        assert len(outs) == n
        assert all(o.placed for o in outs)


def test_build_is_deterministic():
    cfg = FamilyConfig(64, 3, seed=8)
    a = [(o.status, o.trace.steps) for o in build_table(40, cfg, rng=5)[1]]
    b = [(o.status, o.trace.steps) for o in build_table(40, cfg, rng=5)[1]]
    assert a == b


@st.composite
def instances(draw):
    m = draw(st.integers(1, 9))
    d = draw(st.integers(2, 3))
    n = draw(st.integers(0, m))
    choices = draw(st.lists(st.lists(st.integers(0, m - 1), min_size=d, max_size=d), min_size=n, max_size=n))
    return m, d, choices


@settings(max_examples=200, deadline=None)
@given(inst=instances(), seed=st.integers(0, 2**32), max_steps=st.integers(1, 20), mode=st.sampled_from(["literal", NO_BACKTRACK]))
def test_round_invariants(inst, seed, max_steps, mode):
    m, d, choices = inst
    table = CuckooTable(FamilyConfig(m, d), fixed_choices=choices)
    policy = WalkPolicy(mode, max_steps)
    rng = random.Random(seed)
    for item in range(len(choices)):
        pre = table.copy()
        before = table.snapshot()
        bfs = shortest_augmenting_path(table, item)
        assert table.snapshot() == before
        out = insert_random_walk(table, item, policy, rng)
        tr = out.trace
        if out.placed:
            assert tr.path_edges == 2 * tr.evictions + 1
            assert tr.path_edges % 2 == 1
            assert tr.steps[0].evictor == item
            assert tr.steps[-1].evicted is None
            assert all(s.slot in choices[s.evictor] for s in tr.steps)
            if tr.evictions == 0:
                assert pre.slot_to_item[tr.terminal_slot] == -1
            replay(pre, tr)
            assert pre.snapshot() == table.snapshot()
            assert bfs is not None and 2 * len(bfs) - 1 <= tr.path_edges
        else:
            assert table.snapshot() == before
            assert tr.evictions == max_steps
        assert not table.matching_errors()


@settings(max_examples=100, deadline=None)
@given(inst=instances())
def test_bfs_finds_path_iff_one_exists(inst):
    m, d, choices = inst
    table = CuckooTable(FamilyConfig(m, d), fixed_choices=choices)
    for item in range(len(choices)):
        # repeated augmentation keeps the matching maximum for every prefix
        insert_bfs(table, item)
        assert not table.matching_errors()
        assert table.size == _max_matching(choices[: item + 1], m)


def _max_matching(choices, m):
    match = [-1] * m

    def augment(x, seen):
        for s in set(choices[x]):
            if s in seen:
                continue
            seen.add(s)
            if match[s] < 0 or augment(match[s], seen):
                match[s] = x
                return True
        return False

    return sum(augment(x, set()) for x in range(len(choices)))
