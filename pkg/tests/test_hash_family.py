import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from cuckoowalk.hash_family import (
    FamilyConfig,
    LazyChoices,
    choice_matrix,
    choices_of,
    derive_seed,
    lazy_reveal,
    mix64,
)

seeds = st.integers(min_value=0, max_value=2**64 - 1)


def test_single_slot_universe():
    assert choices_of(FamilyConfig(1, 3, seed=12345), 0) == [0, 0, 0]


def test_repeated_calls_identical():
    cfg = FamilyConfig(1000, 4, seed=99)
    assert choices_of(cfg, 5) == choices_of(cfg, 5)


def test_frozen_values():
    # pins the mixing construction so output stays bit-identical across releases
    cfg = FamilyConfig(1000, 4, seed=1)
    assert choices_of(cfg, 0) == [158, 846, 752, 873]
    assert choices_of(cfg, 0) == [int(v) for v in choice_matrix(cfg, 1)[0]]
    assert mix64(0) == 0
    assert mix64(1) == 0x5692161D100B05E5


def test_config_validation():
    with pytest.raises(ValueError):
        FamilyConfig(0, 2)
    with pytest.raises(ValueError):
        FamilyConfig(4, 1)


@given(seed=seeds, m=st.integers(1, 10**6), d=st.integers(2, 8), item=st.integers(0, 10**9))
def test_lazy_reveal_matches_full_vector(seed, m, d, item):
    cfg = FamilyConfig(m, d, seed)
    full = choices_of(cfg, item)
    assert len(full) == d
    assert all(0 <= s < m for s in full)
    assert [lazy_reveal(cfg, item, j) for j in range(d)] == full


def test_lazy_reveal_position_out_of_range():
    cfg = FamilyConfig(10, 3)
    with pytest.raises(IndexError):
        lazy_reveal(cfg, 0, 3)
    with pytest.raises(IndexError):
        lazy_reveal(cfg, 0, -1)


def test_partial_reveal_leaves_rest_hidden():
    cfg = FamilyConfig(97, 5, seed=3)
    lc = LazyChoices(cfg)
    lc.reveal(7, 1)
    lc.reveal(7, 4)
    lc.reveal(7, 1)
    assert lc.exposed == 2
    assert lc.queries == 3
    assert [lc.is_exposed(7, j) for j in range(5)] == [False, True, False, False, True]
    assert lc.full(7) == choices_of(cfg, 7)
    assert lc.exposed == 5


@settings(max_examples=50)
@given(seed=seeds, m=st.integers(1, 5000), d=st.integers(2, 6), n=st.integers(0, 40), start=st.integers(0, 1000))
def test_vectorised_path_is_bit_identical(seed, m, d, n, start):
    cfg = FamilyConfig(m, d, seed)
    mat = choice_matrix(cfg, n, start=start)
    assert mat.shape == (n, d)
    for i in range(n):
        assert list(mat[i]) == choices_of(cfg, start + i)


def test_rejection_region_is_exercised():
    # m = 2**63 + 1 rejects almost half of all words
    cfg = FamilyConfig(2**63 + 1, 4, seed=5)
    assert cfg.limit == 2**63 + 1
    mat = choice_matrix(cfg, 50)
    for i in range(50):
        row = choices_of(cfg, i)
        assert all(0 <= s < cfg.m for s in row)
        assert [int(v) for v in mat[i]] == row


def test_duplicate_pair_frequency():
    # with replacement: P(both choices equal) = 1/m
    m, n = 10**4, 10**6
    mat = choice_matrix(FamilyConfig(m, 2, seed=2024), n)
    hits = int((mat[:, 0] == mat[:, 1]).sum())
    p = 1 / m
    se = math.sqrt(n * p * (1 - p))
    assert abs(hits - n * p) <= 3 * se


@pytest.mark.parametrize("m", [997, 1024])
def test_per_position_chi_square(m):
    d = 3
    mat = choice_matrix(FamilyConfig(m, d, seed=77), 10**6 // d)
    for j in range(d):
        counts = np.bincount(mat[:, j], minlength=m)
        assert stats.chisquare(counts).pvalue >= 0.001


def test_seed_changes_vectors():
    base = choice_matrix(FamilyConfig(64, 3, seed=0), 16)
    differ = sum(
        not np.array_equal(base, choice_matrix(FamilyConfig(64, 3, seed=s), 16)) for s in range(1, 11)
    )
    assert differ >= 9


def test_derive_seed_streams_distinct():
    vals = {derive_seed(7, t, p) for t in range(200) for p in (0, 1)}
    assert len(vals) == 400
    assert derive_seed(7, 3, 0) == derive_seed(7, 3, 0)
