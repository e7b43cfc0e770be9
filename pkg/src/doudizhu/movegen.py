"""Action-space enumeration and legal-move generation.

The global catalog contains every card group constructible from the
54-card deck under one documented convention:

* kickers are enumerated by rank combination (suits do not exist), with
  pairwise-distinct ranks, disjoint from the principal ranks, and never
  both jokers together;
* sequential solos run 5..12 ranks, sequential pairs 3..10 (a longer
  pair run would not fit the landlord's 20 cards), trio runs 2..12 and
  airplanes as far as the deck allows -- entries too large to ever be
  held are still enumerated, like the never-legal actions a fixed
  Q-value head has to cover.

That convention yields exactly 13527 distinct groups. Pass is a move
but not a group: it sits at catalog index 0 and is excluded from the
group count.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .cards import (
    FULL_DECK,
    JOKER_INDEX_BJ,
    JOKER_INDEX_RJ,
    MAX_RUN_VALUE,
    MIN_PAIR_RUN,
    MIN_SOLO_RUN,
    MIN_TRIO_RUN,
    NUM_RANKS,
    PASS_GROUP,
    CardGroup,
    CardMultiset,
    Category,
    beats,
    classify,
)

Move = CardGroup  # a move is Pass (the NONE-category group) or a real group
PASS = PASS_GROUP

PAIR_RUN_MAX = 10
SOLO_RUN_MAX = 12
TRIO_RUN_MAX = 12

EXPECTED_GROUP_COUNT = 13527


def is_pass(move: Move) -> bool:
    return move.category is Category.NONE


def _single_rank_groups(source: CardMultiset, need: int, category: Category) -> Iterator[CardGroup]:
    for i in range(NUM_RANKS):
        if source[i] >= need:
            v = i + 3
            yield CardGroup(CardMultiset.from_values([v] * need), category, v)


def _spans(source: CardMultiset, need: int) -> list[tuple[int, int]]:
    """Maximal consecutive index spans within 3..A holding >= need copies."""
    top = MAX_RUN_VALUE - 3
    spans = []
    lo = 0
    while lo <= top:
        if source[lo] < need:
            lo += 1
            continue
        hi = lo
        while hi + 1 <= top and source[hi + 1] >= need:
            hi += 1
        spans.append((lo, hi))
        lo = hi + 2
    return spans


def _run_groups(source: CardMultiset, need: int, min_len: int, max_len: int,
                category: Category) -> Iterator[CardGroup]:
    spans = _spans(source, need)
    if not spans:
        return
    for length in range(min_len, max_len + 1):
        for lo, hi in spans:
            for start in range(lo, hi - length + 2):
                vals = [start + k + 3 for k in range(length) for _ in range(need)]
                yield CardGroup(CardMultiset.from_values(vals), category, start + length + 2, length)


def _kicker_rank_choices(source: CardMultiset, exclude: set[int], n: int, need: int):
    """Ascending n-combinations of kicker rank indices with `need`
    copies available, never containing both jokers."""
    avail = [i for i in range(NUM_RANKS) if i not in exclude and source[i] >= need]
    for combo in itertools.combinations(avail, n):
        if JOKER_INDEX_BJ in combo and JOKER_INDEX_RJ in combo:
            continue
        yield combo


def _trio_kicker_groups(source: CardMultiset) -> Iterator[CardGroup]:
    # single trio + one solo kicker
    for i in range(NUM_RANKS):
        if source[i] < 3:
            continue
        v = i + 3
        for (k,) in _kicker_rank_choices(source, {i}, 1, 1):
            cards = CardMultiset.from_values([v, v, v, k + 3])
            yield CardGroup(cards, Category.SEQ_TRIOS_TAKE_ONE, v, 1,
                            CardMultiset.from_values([k + 3]))


def _trio_pair_kicker_groups(source: CardMultiset) -> Iterator[CardGroup]:
    for i in range(NUM_RANKS):
        if source[i] < 3:
            continue
        v = i + 3
        for (k,) in _kicker_rank_choices(source, {i}, 1, 2):
            cards = CardMultiset.from_values([v, v, v, k + 3, k + 3])
            yield CardGroup(cards, Category.SEQ_TRIOS_TAKE_TWO, v, 1,
                            CardMultiset.from_values([k + 3, k + 3]))


def _airplane_groups(source: CardMultiset, kicker_need: int, category: Category) -> Iterator[CardGroup]:
    spans = _spans(source, 3)
    if not spans:
        return
    budget = sum(source)
    for length in range(MIN_TRIO_RUN, TRIO_RUN_MAX + 1):
        if (3 + kicker_need) * length > budget:
            break
        for lo_span, hi_span in spans:
            for lo in range(lo_span, hi_span - length + 2):
                run = set(range(lo, lo + length))
                principal_vals = [lo + k + 3 for k in range(length) for _ in range(3)]
                for combo in _kicker_rank_choices(source, run, length, kicker_need):
                    kick_vals = [k + 3 for k in combo for _ in range(kicker_need)]
                    yield CardGroup(
                        CardMultiset.from_values(principal_vals + kick_vals),
                        category, lo + length + 2, length,
                        CardMultiset.from_values(kick_vals),
                    )


def _quad_kicker_groups(source: CardMultiset, kicker_need: int, category: Category) -> Iterator[CardGroup]:
    for i in range(NUM_RANKS):
        if source[i] < 4:
            continue
        v = i + 3
        for combo in _kicker_rank_choices(source, {i}, 2, kicker_need):
            kick_vals = [k + 3 for k in combo for _ in range(kicker_need)]
            yield CardGroup(
                CardMultiset.from_values([v] * 4 + kick_vals),
                category, v, 1, CardMultiset.from_values(kick_vals),
            )


def iter_groups(source: CardMultiset) -> Iterator[CardGroup]:
    """Every card group constructible inside `source`, in catalog order:
    category-major, then run length, then principal rank, then kicker
    ranks lexicographic."""
    total = sum(source)
    yield from _single_rank_groups(source, 1, Category.SOLO)
    yield from _single_rank_groups(source, 2, Category.PAIR)
    yield from _single_rank_groups(source, 3, Category.TRIO)
    if total >= MIN_SOLO_RUN:
        yield from _run_groups(source, 1, MIN_SOLO_RUN, SOLO_RUN_MAX, Category.SEQ_SOLOS)
    if total >= 2 * MIN_PAIR_RUN:
        yield from _run_groups(source, 2, MIN_PAIR_RUN, PAIR_RUN_MAX, Category.SEQ_PAIRS)
    if total >= 3 * MIN_TRIO_RUN:
        yield from _run_groups(source, 3, MIN_TRIO_RUN, TRIO_RUN_MAX, Category.SEQ_TRIOS_TAKE_NONE)
    if total >= 4:
        yield from _trio_kicker_groups(source)
    if total >= 5:
        yield from _trio_pair_kicker_groups(source)
    if total >= 8:
        yield from _airplane_groups(source, 1, Category.SEQ_TRIOS_SERIES_TAKE_ONE)
    if total >= 10:
        yield from _airplane_groups(source, 2, Category.SEQ_TRIOS_SERIES_TAKE_TWO)
    yield from _single_rank_groups(source, 4, Category.BOMB)
    if total >= 6:
        yield from _quad_kicker_groups(source, 1, Category.FOUR_TAKE_TWO_SOLOS)
    if total >= 8:
        yield from _quad_kicker_groups(source, 2, Category.FOUR_TAKE_TWO_PAIRS)
    if source[JOKER_INDEX_BJ] and source[JOKER_INDEX_RJ]:
        yield CardGroup(CardMultiset.from_values([16, 17]), Category.NUKE, 17)


@dataclass(frozen=True)
class ActionCatalog:
    """The fixed global action list: index 0 is Pass, 1.. are groups."""

    moves: tuple[Move, ...]
    index: dict[Move, int]

    def group_count(self) -> int:
        return len(self.moves) - 1

    def index_of(self, move: Move) -> int:
        return self.index[move]

    def category_counts(self) -> dict[Category, int]:
        counts: dict[Category, int] = {}
        for m in self.moves[1:]:
            counts[m.category] = counts.get(m.category, 0) + 1
        return counts


_CATALOG: ActionCatalog | None = None


def enumerate_all_moves() -> ActionCatalog:
    """Build (once) the deterministic global catalog."""
    global _CATALOG
    if _CATALOG is None:
        moves = (PASS,) + tuple(iter_groups(FULL_DECK))
        _CATALOG = ActionCatalog(moves, {m: i for i, m in enumerate(moves)})
    return _CATALOG


def _iter_beating(hand: CardMultiset, incumbent: CardGroup) -> Iterator[CardGroup]:
    """Groups within `hand` that beat `incumbent`, in catalog order.

    Only same-category/same-length candidates plus bombs and the nuke
    can ever qualify, so generation is targeted rather than filtered.
    """
    cat = incumbent.category
    if cat is not Category.NUKE:
        if cat is Category.BOMB:
            for g in _single_rank_groups(hand, 4, Category.BOMB):
                if g.principal > incumbent.principal:
                    yield g
        else:
            for g in iter_category(hand, cat, incumbent.length):
                if g.principal > incumbent.principal:
                    yield g
            yield from _single_rank_groups(hand, 4, Category.BOMB)
        if hand[JOKER_INDEX_BJ] and hand[JOKER_INDEX_RJ]:
            yield CardGroup(CardMultiset.from_values([16, 17]), Category.NUKE, 17)


def iter_category(source: CardMultiset, category: Category, length: int) -> Iterator[CardGroup]:
    """Groups of one category and run length constructible in `source`."""
    if category is Category.SOLO:
        yield from _single_rank_groups(source, 1, category)
    elif category is Category.PAIR:
        yield from _single_rank_groups(source, 2, category)
    elif category is Category.TRIO:
        yield from _single_rank_groups(source, 3, category)
    elif category is Category.BOMB:
        yield from _single_rank_groups(source, 4, category)
    elif category is Category.SEQ_SOLOS:
        yield from _run_groups(source, 1, length, length, category)
    elif category is Category.SEQ_PAIRS:
        yield from _run_groups(source, 2, length, length, category)
    elif category is Category.SEQ_TRIOS_TAKE_NONE:
        yield from _run_groups(source, 3, length, length, category)
    elif category is Category.SEQ_TRIOS_TAKE_ONE:
        yield from _trio_kicker_groups(source)
    elif category is Category.SEQ_TRIOS_TAKE_TWO:
        yield from _trio_pair_kicker_groups(source)
    elif category is Category.SEQ_TRIOS_SERIES_TAKE_ONE:
        for g in _airplane_groups(source, 1, category):
            if g.length == length:
                yield g
    elif category is Category.SEQ_TRIOS_SERIES_TAKE_TWO:
        for g in _airplane_groups(source, 2, category):
            if g.length == length:
                yield g
    elif category is Category.FOUR_TAKE_TWO_SOLOS:
        yield from _quad_kicker_groups(source, 1, category)
    elif category is Category.FOUR_TAKE_TWO_PAIRS:
        yield from _quad_kicker_groups(source, 2, category)
    elif category is Category.NUKE:
        if source[JOKER_INDEX_BJ] and source[JOKER_INDEX_RJ]:
            yield CardGroup(CardMultiset.from_values([16, 17]), Category.NUKE, 17)


def legal_moves(hand: CardMultiset, incumbent: CardGroup | None = None) -> list[Move]:
    """Moves available to `hand`.

    Leading (no incumbent): every constructible group; passing is not
    allowed. Responding: Pass plus every group that beats the incumbent.
    """
    if hand.is_empty():
        raise ValueError("legal_moves needs a non-empty hand")
    if incumbent is None:
        return list(iter_groups(hand))
    return [PASS] + list(_iter_beating(hand, incumbent))


def is_legal(hand: CardMultiset, incumbent: CardGroup | None, move: Move) -> bool:
    """Structural legality check equivalent to `move in legal_moves(...)`
    but without enumerating (classification is canonical, so a group is
    playable iff it classifies to itself and fits in the hand)."""
    if is_pass(move):
        return incumbent is not None
    if not hand.contains(move.cards):
        return False
    if classify(move.cards) != move:
        return False
    return incumbent is None or beats(move, incumbent)
