"""Frequent pattern mining that keeps, for every pattern, the alerts it came from.

The miner is a levelwise Apriori over a vertical layout: each item owns the
set of transaction ids (tids) that contain it, a candidate's tid set is the
intersection of its two parents' sets, and support is simply the size of
that set.  Tid sets are held as Python ints used as bitsets while mining
(``&`` and ``int.bit_count`` are fast for a few tens of thousands of bits)
and handed out as sorted tuples on the resulting patterns.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np

from .ingest import Dataset, Item, Transaction

__all__ = [
    "FrequentPatternSet",
    "MinerConfig",
    "Pattern",
    "brute_force_mine",
    "candidate_gen",
    "format_pattern",
    "mine",
    "tidlist_intersect",
    "write_patterns",
]

BRUTE_FORCE_MAX_ITEMS = 24


@dataclass(frozen=True)
class MinerConfig:
    """Mining thresholds.

    An int ``min_support`` is an absolute transaction count; a float is a
    fraction of the dataset in (0, 1], turned into ``ceil(fraction * n)``.
    """

    min_support: int | float = 2
    max_pattern_len: int | None = None

    def __post_init__(self):
        s = self.min_support
        if isinstance(s, bool) or not isinstance(s, (int, float)):
            raise ValueError(f"min_support must be a number, got {s!r}")
        if isinstance(s, float):
            if not 0.0 < s <= 1.0:
                raise ValueError(f"fractional min_support must be in (0, 1], got {s}")
        elif s < 1:
            raise ValueError(f"absolute min_support must be >= 1, got {s}")
        if self.max_pattern_len is not None and self.max_pattern_len < 1:
            raise ValueError("max_pattern_len must be >= 1")

    def absolute_support(self, n: int) -> int:
        if isinstance(self.min_support, float):
            # round first so 0.5 * 3 does not become 1.5000000000000002
            return max(1, math.ceil(round(self.min_support * n, 9)))
        return self.min_support


@dataclass(frozen=True, slots=True)
class Pattern:
    items: tuple[Item, ...]  # canonical order
    tids: tuple[int, ...]

    @property
    def support(self) -> int:
        return len(self.tids)

    @property
    def itemset(self) -> frozenset[Item]:
        return frozenset(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def contained_in(self, transaction: Transaction) -> bool:
        return all(item in transaction.items for item in self.items)


@dataclass(frozen=True)
class FrequentPatternSet:
    patterns: tuple[Pattern, ...]
    min_support_abs: int
    dataset_size: int

    def __len__(self) -> int:
        return len(self.patterns)

    def __iter__(self) -> Iterator[Pattern]:
        return iter(self.patterns)

    def as_dict(self) -> dict[frozenset[Item], tuple[int, ...]]:
        return {p.itemset: p.tids for p in self.patterns}

    def get(self, items: Iterable[Item]) -> Pattern | None:
        key = frozenset(items)
        for p in self.patterns:
            if p.itemset == key:
                return p
        return None


def tidlist_intersect(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Merge-intersect two ascending, duplicate-free tid lists."""
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        x, y = a[i], b[j]
        if x == y:
            out.append(x)
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return out


def _join_groups(level: Sequence[tuple]) -> Iterator[list[tuple]]:
    """Yield runs of the sorted ``level`` that share everything but the last element."""
    start = 0
    for i in range(1, len(level) + 1):
        if i == len(level) or level[i][:-1] != level[start][:-1]:
            yield level[start:i]
            start = i


def _join(group: Sequence[tuple], frequent: set, slots=None) -> Iterator[tuple[tuple, tuple, tuple]]:
    """Prefix-join one group; yields (candidate, left parent, right parent).

    Candidates whose k-subsets are not all in ``frequent`` are pruned.  The
    two parents are the subsets obtained by dropping the last two elements,
    so only the remaining k-1 subsets are looked up.  With ``slots`` (the
    field position of each item id), pairs of items at the same position are
    skipped: a line holds one token per position, so they never co-occur.
    """
    m = len(group)
    for i, left in enumerate(group):
        j = i + 1
        if slots is not None:
            # items sort by position first, so same-position partners are adjacent
            sa = slots[left[-1]]
            if sa is not None:
                while j < m and slots[group[j][-1]] == sa:
                    j += 1
        for right in group[j:]:
            cand = left + (right[-1],)
            k = len(cand)
            if k > 2 and any(cand[:d] + cand[d + 1:] not in frequent for d in range(k - 2)):
                continue
            yield cand, left, right


def candidate_gen(frequent_k: Sequence[Pattern]) -> list[tuple[Item, ...]]:
    """Apriori candidate generation: join k-patterns sharing k-1 items, prune.

    >>> from alertrank.ingest import Item
    >>> ps = [Pattern((Item(None, x),), ()) for x in "235"]
    >>> [tuple(i.token for i in c) for c in candidate_gen(ps)]
    [('2', '3'), ('2', '5'), ('3', '5')]
    """
    if not frequent_k:
        return []
    keys = sorted({tuple(sorted(p.items)) for p in frequent_k})
    if len({len(k) for k in keys}) != 1:
        raise ValueError("candidate_gen needs patterns of equal length")
    frequent = set(keys)
    return [cand for group in _join_groups(keys) for cand, _, _ in _join(group, frequent)]


def _bits_to_tids(bits: int, n: int) -> tuple[int, ...]:
    if bits.bit_count() <= 32:
        out = []
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return tuple(out)
    raw = np.frombuffer(bits.to_bytes((n + 7) // 8 or 1, "little"), dtype=np.uint8)
    return tuple(np.flatnonzero(np.unpackbits(raw, bitorder="little")).tolist())


def _extend_group(group, level_bits, frequent, slots, min_abs):
    out = []
    for cand, left, right in _join(group, frequent, slots):
        bits = level_bits[left] & level_bits[right]
        if bits.bit_count() >= min_abs:
            out.append((cand, bits))
    return out


def mine(dataset: Dataset, config: MinerConfig | None = None, workers: int = 1) -> FrequentPatternSet:
    """Mine every item-set contained in at least ``min_support`` transactions.

    Patterns come out ordered by length, then lexicographically by item
    (field position first, then token).  ``workers > 1`` spreads each
    level's candidate groups over a thread pool; the result is identical.
    """
    config = config or MinerConfig()
    n = dataset.n
    min_abs = config.absolute_support(n)
    max_len = config.max_pattern_len
    if n == 0 or min_abs > n:
        return FrequentPatternSet((), min_abs, n)

    vertical: dict[Item, int] = {}
    for t in dataset.transactions:
        bit = 1 << t.tid
        for item in t.items:
            vertical[item] = vertical.get(item, 0) | bit

    items = sorted(it for it, bits in vertical.items() if bits.bit_count() >= min_abs)
    slots = [it.field_index for it in items]
    if all(s is None for s in slots):
        slots = None

    level_bits = {(i,): vertical[it] for i, it in enumerate(items)}
    del vertical
    patterns: list[Pattern] = []
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        k = 1
        while level_bits:
            keys = sorted(level_bits)
            patterns.extend(_materialize(keys, level_bits, items, n))
            if max_len is not None and k >= max_len:
                break
            frequent = set(keys)
            groups = [g for g in _join_groups(keys) if len(g) > 1]
            args = (level_bits, frequent, slots, min_abs)
            if pool is None:
                results = [_extend_group(g, *args) for g in groups]
            else:
                results = list(pool.map(lambda g: _extend_group(g, *args), groups))
            level_bits = {cand: bits for chunk in results for cand, bits in chunk}
            k += 1
    finally:
        if pool is not None:
            pool.shutdown()
    return FrequentPatternSet(tuple(patterns), min_abs, n)


def _materialize(keys, level_bits, items, n) -> Iterator[Pattern]:
    # patterns of one level often share a tid set; share the tuple as well
    cache: dict[int, tuple[int, ...]] = {}
    for key in keys:
        bits = level_bits[key]
        tids = cache.get(bits)
        if tids is None:
            tids = cache[bits] = _bits_to_tids(bits, n)
        yield Pattern(tuple(items[i] for i in key), tids)


def brute_force_mine(dataset: Dataset, config: MinerConfig | None = None) -> FrequentPatternSet:
    """Reference miner: enumerate every item subset of every transaction and
    count it by scanning the whole dataset.  Exponential; small inputs only."""
    config = config or MinerConfig()
    n = dataset.n
    min_abs = config.absolute_support(n)
    distinct = set().union(*(t.items for t in dataset.transactions)) if n else set()
    if len(distinct) > BRUTE_FORCE_MAX_ITEMS:
        raise ValueError(
            f"brute force refused: {len(distinct)} distinct items > {BRUTE_FORCE_MAX_ITEMS}"
        )
    max_len = config.max_pattern_len
    seen: set[frozenset[Item]] = set()
    for t in dataset.transactions:
        its = sorted(t.items)
        top = len(its) if max_len is None else min(max_len, len(its))
        for k in range(1, top + 1):
            seen.update(frozenset(c) for c in combinations(its, k))
    patterns = []
    for cand in seen:
        tids = tuple(t.tid for t in dataset.transactions if cand <= t.items)
        if len(tids) >= min_abs:
            patterns.append(Pattern(tuple(sorted(cand)), tids))
    patterns.sort(key=lambda p: (len(p.items), p.items))
    return FrequentPatternSet(tuple(patterns), min_abs, n)


def format_pattern(pattern: Pattern) -> str:
    tids = ",".join(map(str, pattern.tids))
    return f"{pattern.support}\t{tids}\t{' '.join(str(i) for i in pattern.items)}"


def write_patterns(fps: FrequentPatternSet, out: TextIO) -> None:
    """Dump one pattern per line: ``support<TAB>tids<TAB>pos=token ...``."""
    for p in fps.patterns:
        out.write(format_pattern(p))
        out.write("\n")

