"""Seeded choice generation: each item draws d slots uniformly, with replacement.

Slots come from a keyed counter-mode construction built on the splitmix64
finalizer::

    key   = mix64(seed + G * (item + 1))
    word  = mix64(key + G * (1 + position + (attempt << 32)))
    slot  = word % m        (retrying with attempt + 1 while word >= limit)

``limit`` is the largest multiple of ``m`` not exceeding ``2**64``, so every
accepted word maps to a slot with exactly equal probability. The scalar path
(:func:`choices_of`) and the vectorised path (:func:`choice_matrix`) produce
bit-identical values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """splitmix64 finalizer; a bijection on 64-bit words."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, *parts: int) -> int:
    """Split a 64-bit seed into an independent child keyed by ``parts``."""
    z = mix64(base_seed)
    for p in parts:
        z = mix64(z ^ mix64((p + 1) * GOLDEN))
    return z


@dataclass(frozen=True)
class FamilyConfig:
    m: int
    d: int
    seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        object.__setattr__(self, "seed", self.seed & MASK64)

    @property
    def limit(self) -> int:
        return (1 << 64) - ((1 << 64) % self.m)


def _item_key(seed: int, item: int) -> int:
    return mix64(seed + GOLDEN * (item + 1))


def _draw(cfg: FamilyConfig, key: int, position: int) -> int:
    limit = cfg.limit
    attempt = 0
    while True:
        word = mix64(key + GOLDEN * (1 + position + (attempt << 32)))
        if word < limit:
            return word % cfg.m
        attempt += 1


def choices_of(cfg: FamilyConfig, item: int) -> list[int]:
    """Return the d slot choices of ``item`` (duplicates kept)."""
    if item < 0:
        raise ValueError(f"item ids are non-negative, got {item}")
    key = _item_key(cfg.seed, item)
    return [_draw(cfg, key, j) for j in range(cfg.d)]


def lazy_reveal(cfg: FamilyConfig, item: int, position: int) -> int:
    """Return choice ``position`` of ``item`` without computing the others."""
    if not 0 <= position < cfg.d:
        raise IndexError(f"position {position} outside [0, {cfg.d})")
    if item < 0:
        raise ValueError(f"item ids are non-negative, got {item}")
    return _draw(cfg, _item_key(cfg.seed, item), position)


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def choice_matrix(cfg: FamilyConfig, n: int, start: int = 0) -> np.ndarray:
    """Choices of items ``start .. start+n-1`` as an ``(n, d)`` int64 array."""
    if n == 0:
        return np.zeros((0, cfg.d), dtype=np.int64)
    with np.errstate(over="ignore"):
        items = np.arange(start + 1, start + n + 1, dtype=np.uint64)
        keys = _mix64_np(np.uint64(cfg.seed) + np.uint64(GOLDEN) * items)
        pos = np.arange(1, cfg.d + 1, dtype=np.uint64)
        words = _mix64_np(keys[:, None] + np.uint64(GOLDEN) * pos[None, :])
        limit = cfg.limit
        out = np.empty((n, cfg.d), dtype=np.int64)
        if limit == 1 << 64:
            # m is a power of two: no rejection region
            out[:] = (words % np.uint64(cfg.m)).astype(np.int64)
            return out
        bad = words >= np.uint64(limit)
        out[~bad] = (words[~bad] % np.uint64(cfg.m)).astype(np.int64)
    # the rejection region has probability < m / 2**64; finish those scalar
    for i, j in zip(*np.nonzero(bad)):
        out[i, j] = _draw(cfg, _item_key(cfg.seed, start + int(i)), int(j))
    return out


class LazyChoices:
    """Per-table exposure tracker over a :class:`FamilyConfig`.

    Each ``(item, position)`` pair is computed at most once and only when
    queried. ``exposed`` counts pairs ever revealed; ``queries`` counts every
    call to :meth:`reveal`.

    ``fixed`` replaces the seeded family with explicit choice vectors, for
    hand-built instances.
    """

    def __init__(self, cfg: FamilyConfig, fixed: Optional[Sequence[Sequence[int]]] = None):
        self.cfg = cfg
        self.fixed = None
        if fixed is not None:
            self.fixed = [list(v) for v in fixed]
            for v in self.fixed:
                if len(v) != cfg.d or any(not 0 <= s < cfg.m for s in v):
                    raise ValueError(f"fixed choice vector {v} does not fit m={cfg.m}, d={cfg.d}")
        self._cache: dict[int, list[int]] = {}
        self._keys: dict[int, int] = {}
        self.exposed = 0
        self.queries = 0

    def reveal(self, item: int, position: int) -> int:
        self.queries += 1
        row = self._cache.get(item)
        if row is None:
            row = self._cache[item] = [-1] * self.cfg.d
            self._keys[item] = _item_key(self.cfg.seed, item)
        slot = row[position]
        if slot < 0:
            if self.fixed is not None:
                slot = self.fixed[item][position]
            else:
                slot = _draw(self.cfg, self._keys[item], position)
            row[position] = slot
            self.exposed += 1
        return slot

    def vector(self, item: int) -> list[int]:
        """All d choices of ``item`` without touching the exposure counters."""
        if self.fixed is not None:
            return list(self.fixed[item])
        return choices_of(self.cfg, item)

    def full(self, item: int) -> list[int]:
        """All d choices of ``item``; exposes any still hidden."""
        return [self.reveal(item, j) for j in range(self.cfg.d)]

    def is_exposed(self, item: int, position: int) -> bool:
        row = self._cache.get(item)
        return row is not None and row[position] >= 0

    def exposed_positions(self, item: int) -> int:
        row = self._cache.get(item)
        return 0 if row is None else sum(1 for s in row if s >= 0)
