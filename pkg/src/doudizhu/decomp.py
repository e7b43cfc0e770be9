"""Hand decomposition: partitioning a hand into legal card groups.

Two enumerators are provided. The depth-first one is complete: it walks
partitions as non-decreasing sequences under a canonical group order so
each partition appears exactly once. The dancing-links one solves exact
cover over the hand's card instances, where each candidate group is
mapped to the lexicographically-first instance subset matching its rank
counts; that ordered encoding keeps the matrix tiny but deliberately
drops partitions that would need a second overlapping placement (any
two groups touching the same rank share its first instance). The
sampler uses dancing links above ten cards and DFS below, then
subsamples uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import random

from .cards import CardGroup, CardMultiset, Category, classify
from .movegen import iter_groups


def group_key(g: CardGroup):
    return (int(g.category), g.length, g.principal, tuple(g.kickers))


@dataclass(frozen=True)
class Decomposition:
    """A partition of a hand into legal groups, canonically ordered."""

    groups: tuple[CardGroup, ...]

    def cards(self) -> CardMultiset:
        total = CardMultiset()
        for g in self.groups:
            total = total.add(g.cards)
        return total

    def is_valid_for(self, hand: CardMultiset) -> bool:
        """Cover + disjointness (multiset sum equality) + legality."""
        return self.cards() == hand and all(
            g.category is not Category.NONE and classify(g.cards) == g for g in self.groups
        )

    def __len__(self) -> int:
        return len(self.groups)


@dataclass(frozen=True)
class DecompositionSample:
    decompositions: tuple[Decomposition, ...]
    truncated: bool


def enumerate_dfs(hand: CardMultiset) -> set[Decomposition]:
    """All partitions of `hand` into legal groups."""
    if hand.is_empty():
        raise ValueError("cannot decompose an empty hand")
    results: set[Decomposition] = set()
    acc: list[CardGroup] = []

    def rec(remaining: CardMultiset, min_key) -> None:
        if remaining.is_empty():
            results.add(Decomposition(tuple(acc)))
            return
        for g in iter_groups(remaining):
            k = group_key(g)
            if k < min_key:
                continue
            acc.append(g)
            rec(remaining.remove(g.cards), k)
            acc.pop()

    rec(hand, (0, 0, 0, ()))
    return results


class _DlxColumn:
    __slots__ = ("left", "right", "up", "down", "size", "idx")

    def __init__(self, idx: int):
        self.left = self.right = self.up = self.down = self
        self.size = 0
        self.idx = idx


class _DlxNode:
    __slots__ = ("left", "right", "up", "down", "column", "row")

    def __init__(self, column: _DlxColumn, row: int):
        self.column = column
        self.row = row
        self.left = self.right = self.up = self.down = self


def _dlx_cover(col: _DlxColumn) -> None:
    col.right.left = col.left
    col.left.right = col.right
    i = col.down
    while i is not col:
        j = i.right
        while j is not i:
            j.down.up = j.up
            j.up.down = j.down
            j.column.size -= 1
            j = j.right
        i = i.down


def _dlx_uncover(col: _DlxColumn) -> None:
    i = col.up
    while i is not col:
        j = i.left
        while j is not i:
            j.column.size += 1
            j.down.up = j
            j.up.down = j
            j = j.left
        i = i.up
    col.right.left = col
    col.left.right = col


def _solve_exact_cover(n_columns: int, rows: list[tuple[int, ...]]) -> list[list[int]]:
    """All exact covers (as row-index lists) via dancing links."""
    root = _DlxColumn(-1)
    columns = []
    for c in range(n_columns):
        col = _DlxColumn(c)
        col.left = root.left
        col.right = root
        root.left.right = col
        root.left = col
        columns.append(col)

    for ridx, row in enumerate(rows):
        first = None
        for c in row:
            col = columns[c]
            node = _DlxNode(col, ridx)
            node.up = col.up
            node.down = col
            col.up.down = node
            col.up = node
            col.size += 1
            if first is None:
                first = node
            else:
                node.left = first.left
                node.right = first
                first.left.right = node
                first.left = node

    solutions: list[list[int]] = []
    partial: list[int] = []

    def search() -> None:
        if root.right is root:
            solutions.append(sorted(partial))
            return
        # smallest column first
        col = root.right
        c = col.right
        while c is not root:
            if c.size < col.size:
                col = c
            c = c.right
        if col.size == 0:
            return
        _dlx_cover(col)
        r = col.down
        while r is not col:
            partial.append(r.row)
            j = r.right
            while j is not r:
                _dlx_cover(j.column)
                j = j.right
            search()
            j = r.left
            while j is not r:
                _dlx_uncover(j.column)
                j = j.left
            partial.pop()
            r = r.down
        _dlx_uncover(col)

    search()
    return solutions


def enumerate_dlx(hand: CardMultiset) -> set[Decomposition]:
    """Partitions found by exact cover over ordered card instances.

    Always a subset of enumerate_dfs(hand); at least the rank-by-rank
    partition (each rank's full count as one group) is representable,
    so the result is never empty.
    """
    if hand.is_empty():
        raise ValueError("cannot decompose an empty hand")
    offsets = []
    n = 0
    for i in range(15):
        offsets.append(n)
        n += hand[i]

    groups = list(iter_groups(hand))
    rows: list[tuple[int, ...]] = []
    for g in groups:
        cols = []
        for i in range(15):
            c = g.cards[i]
            cols.extend(range(offsets[i], offsets[i] + c))  # first copies of the rank
        rows.append(tuple(cols))

    results: set[Decomposition] = set()
    for sol in _solve_exact_cover(n, rows):
        chosen = sorted((groups[r] for r in sol), key=group_key)
        results.add(Decomposition(tuple(chosen)))
    return results


DLX_THRESHOLD = 10


@lru_cache(maxsize=256)
def _full_set_ordered(hand: CardMultiset) -> tuple[Decomposition, ...]:
    """Canonically-ordered full decomposition set; cached because agents
    revisit the same hand across consecutive passes."""
    full = enumerate_dlx(hand) if hand.size() > DLX_THRESHOLD else enumerate_dfs(hand)
    return tuple(sorted(full, key=lambda d: tuple(group_key(g) for g in d.groups)))


def decompositions(hand: CardMultiset, limit: int = 100,
                   rng: random.Random | int | None = None) -> DecompositionSample:
    """Sample the decomposition space of `hand`.

    Uses dancing links above DLX_THRESHOLD cards, full DFS otherwise;
    subsamples uniformly without replacement when the space exceeds
    `limit`. Deterministic for a fixed seed.
    """
    if limit < 1:
        raise ValueError("limit must be at least 1")
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    ordered = _full_set_ordered(hand)
    if len(ordered) <= limit:
        return DecompositionSample(ordered, False)
    return DecompositionSample(tuple(rng.sample(ordered, limit)), True)
