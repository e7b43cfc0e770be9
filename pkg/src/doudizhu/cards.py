"""Card ranks, multisets, group categories, classification and comparison.

Dou Di Zhu ignores suits entirely: a hand is a multiset of 15 ranks
(3..2 plus the two jokers). Every playable combination ("card group")
belongs to exactly one of 15 categories; each category carries a weight
formula used by the rule-based partitioning agent.

Card string notation (used in records and on the wire): ranks
"3".."9","T","J","Q","K","A","2", black joker "*", red joker "$".
Strings may be comma-separated or contiguous.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

RANK_SYMBOLS = ("3", "4", "5", "6", "7", "8", "9", "T", "J", "Q", "K", "A", "2", "*", "$")
RANK_VALUES = tuple(range(3, 18))  # 3..9 literal, T=10 J=11 Q=12 K=13 A=14 2=15 BJ=16 RJ=17
SYMBOL_TO_INDEX = {s: i for i, s in enumerate(RANK_SYMBOLS)}
NUM_RANKS = 15
BJ = 16
RJ = 17
MAX_RUN_VALUE = 14  # runs never include 2 or the jokers; A is the highest run rank
JOKER_INDEX_BJ = 13
JOKER_INDEX_RJ = 14

# copies of each rank in the deck
DECK_COUNTS = (4,) * 13 + (1, 1)


def rank_value(index: int) -> int:
    return index + 3


def rank_index(value: int) -> int:
    return value - 3


def rank_symbol(value: int) -> str:
    return RANK_SYMBOLS[value - 3]


class CardMultiset(tuple):
    """Immutable counts-per-rank container (index = rank value - 3).

    Used for hands, groups, kickers and the deck itself. Counts are
    bounded by the deck (4 per ordinary rank, 1 per joker).
    """

    __slots__ = ()

    def __new__(cls, counts=(0,) * NUM_RANKS):
        t = tuple(counts)
        if len(t) != NUM_RANKS:
            raise ValueError(f"expected {NUM_RANKS} rank counts, got {len(t)}")
        return super().__new__(cls, t)

    @classmethod
    def from_values(cls, values) -> "CardMultiset":
        counts = [0] * NUM_RANKS
        for v in values:
            counts[v - 3] += 1
        return cls(counts)

    def size(self) -> int:
        return sum(self)

    def values(self):
        """All card values, ascending, one per copy."""
        out = []
        for i, c in enumerate(self):
            out.extend([i + 3] * c)
        return out

    def add(self, other: "CardMultiset") -> "CardMultiset":
        return CardMultiset(a + b for a, b in zip(self, other))

    def remove(self, other: "CardMultiset") -> "CardMultiset":
        out = tuple(a - b for a, b in zip(self, other))
        if any(c < 0 for c in out):
            raise ValueError("cannot remove cards that are not present")
        return CardMultiset(out)

    def contains(self, other: "CardMultiset") -> bool:
        return all(a >= b for a, b in zip(self, other))

    def is_empty(self) -> bool:
        return not any(self)

    def __str__(self) -> str:
        return format_cards(self)


EMPTY = CardMultiset()
FULL_DECK = CardMultiset(DECK_COUNTS)


class CardError(ValueError):
    """Bad card notation or impossible card counts."""


def parse_cards(text: str) -> CardMultiset:
    """Parse card notation into a multiset.

    Accepts comma-separated ("Q,Q,K") or contiguous ("QQK") strings;
    whitespace is ignored. Raises CardError on unknown symbols or counts
    exceeding the deck (more than four of a rank, more than one joker).
    """
    counts = [0] * NUM_RANKS
    for ch in text:
        if ch in ", \t\n":
            continue
        idx = SYMBOL_TO_INDEX.get(ch.upper() if ch not in "*$" else ch)
        if idx is None:
            raise CardError(f"unknown card symbol {ch!r}")
        counts[idx] += 1
        if counts[idx] > DECK_COUNTS[idx]:
            raise CardError(f"too many copies of {RANK_SYMBOLS[idx]!r}")
    return CardMultiset(counts)


def format_cards(cards: CardMultiset, sep: str = ",") -> str:
    """Canonical notation: ascending rank order, one symbol per copy."""
    return sep.join(RANK_SYMBOLS[v - 3] for v in cards.values())


class Category(enum.IntEnum):
    """The closed set of move categories, in catalog order."""

    NONE = 0
    SOLO = 1
    PAIR = 2
    TRIO = 3
    SEQ_SOLOS = 4
    SEQ_PAIRS = 5
    SEQ_TRIOS_TAKE_NONE = 6
    SEQ_TRIOS_TAKE_ONE = 7
    SEQ_TRIOS_TAKE_TWO = 8
    SEQ_TRIOS_SERIES_TAKE_ONE = 9
    SEQ_TRIOS_SERIES_TAKE_TWO = 10
    BOMB = 11
    FOUR_TAKE_TWO_SOLOS = 12
    FOUR_TAKE_TWO_PAIRS = 13
    NUKE = 14


@dataclass(frozen=True)
class CardGroup:
    """A classified playable combination.

    ``principal`` is the highest principal-card value (the rank the
    group is compared by), ``length`` the run length (1 for non-runs),
    ``kickers`` the attached throwaway cards (empty for most
    categories). ``cards`` always equals principals plus kickers.
    """

    cards: CardMultiset
    category: Category
    principal: int
    length: int = 1
    kickers: CardMultiset = field(default=EMPTY)

    def principal_cards(self) -> CardMultiset:
        return self.cards.remove(self.kickers)

    def size(self) -> int:
        return self.cards.size()

    def __str__(self) -> str:
        if self.category is Category.NONE:
            return "pass"
        return format_cards(self.cards)


PASS_GROUP = CardGroup(EMPTY, Category.NONE, 0, 1, EMPTY)

# minimum run lengths per run family
MIN_SOLO_RUN = 5
MIN_PAIR_RUN = 3
MIN_TRIO_RUN = 2


def _run_span(counts: CardMultiset, need: int) -> tuple[int, int] | None:
    """If every nonzero rank has exactly `need` copies and the nonzero
    ranks form one consecutive span within 3..A, return (low, high)."""
    lo = hi = None
    for i in range(NUM_RANKS):
        c = counts[i]
        if c == 0:
            continue
        if c != need or i + 3 > MAX_RUN_VALUE:
            return None
        if lo is None:
            lo = i
        elif i != hi + 1:
            return None
        hi = i
    if lo is None:
        return None
    return lo + 3, hi + 3


def classify(cards: CardMultiset) -> CardGroup | None:
    """Classify a multiset into its unique category, or None if illegal.

    The empty multiset classifies as the NONE-category group (a pass).
    When a principal/kicker split is ambiguous the maximal trio run is
    preferred, so e.g. 444555 is always a trio run, never a trio with
    leftovers.
    """
    total = cards.size()
    if total == 0:
        return PASS_GROUP

    by_count: dict[int, list[int]] = {1: [], 2: [], 3: [], 4: []}
    for i in range(NUM_RANKS):
        c = cards[i]
        if c:
            by_count[c].append(i + 3)
    singles, pairs, trios, quads = by_count[1], by_count[2], by_count[3], by_count[4]

    # single-rank and joker categories
    if total == 1:
        return CardGroup(cards, Category.SOLO, singles[0])
    if total == 2 and cards[JOKER_INDEX_BJ] and cards[JOKER_INDEX_RJ]:
        return CardGroup(cards, Category.NUKE, RJ)
    if total == 2 and pairs:
        return CardGroup(cards, Category.PAIR, pairs[0])
    if total == 3 and trios:
        return CardGroup(cards, Category.TRIO, trios[0])
    if total == 4 and quads:
        return CardGroup(cards, Category.BOMB, quads[0])

    # pure runs
    span = _run_span(cards, 1)
    if span and total >= MIN_SOLO_RUN:
        lo, hi = span
        return CardGroup(cards, Category.SEQ_SOLOS, hi, hi - lo + 1)
    span = _run_span(cards, 2)
    if span and total // 2 >= MIN_PAIR_RUN:
        lo, hi = span
        return CardGroup(cards, Category.SEQ_PAIRS, hi, hi - lo + 1)
    span = _run_span(cards, 3)
    if span and total // 3 >= MIN_TRIO_RUN:
        lo, hi = span
        return CardGroup(cards, Category.SEQ_TRIOS_TAKE_NONE, hi, hi - lo + 1)

    # single trio with one kicker
    if len(trios) == 1 and not quads:
        principal = trios[0]
        if total == 4 and len(singles) == 1:
            k = CardMultiset.from_values(singles)
            return CardGroup(cards, Category.SEQ_TRIOS_TAKE_ONE, principal, 1, k)
        if total == 5 and len(pairs) == 1:
            k = CardMultiset.from_values(pairs * 2)
            return CardGroup(cards, Category.SEQ_TRIOS_TAKE_TWO, principal, 1, k)

    # airplane: run of n trios with n solo or n pair kickers
    if len(trios) >= MIN_TRIO_RUN:
        run = _consecutive_trio_run(trios)
        if run is not None:
            n = len(run)
            principal = run[-1]
            rest = cards.remove(CardMultiset.from_values([v for v in run for _ in range(3)]))
            if rest.size() == n and _solo_kickers_ok(rest, set(run)):
                return CardGroup(cards, Category.SEQ_TRIOS_SERIES_TAKE_ONE, principal, n, rest)
            if rest.size() == 2 * n and _pair_kickers_ok(rest, set(run), n):
                return CardGroup(cards, Category.SEQ_TRIOS_SERIES_TAKE_TWO, principal, n, rest)

    # quad with two solo or two pair kickers
    if len(quads) == 1:
        principal = quads[0]
        rest = cards.remove(CardMultiset.from_values([principal] * 4))
        if total == 6 and _solo_kickers_ok(rest, {principal}):
            return CardGroup(cards, Category.FOUR_TAKE_TWO_SOLOS, principal, 1, rest)
        if total == 8 and _pair_kickers_ok(rest, {principal}, 2):
            return CardGroup(cards, Category.FOUR_TAKE_TWO_PAIRS, principal, 1, rest)

    return None


def _consecutive_trio_run(trio_values: list[int]) -> list[int] | None:
    """The trio ranks as one consecutive span within 3..A, or None.

    Kickers can never hold three of a rank, so a whole-multiset parse
    must use every trio rank as principal; a gap or an out-of-run rank
    (2, jokers) means no airplane parse exists.
    """
    run = [v for v in trio_values if v <= MAX_RUN_VALUE]
    if len(run) != len(trio_values) or not run:
        return None
    for a, b in zip(run, run[1:]):
        if b != a + 1:
            return None
    return run


def _solo_kickers_ok(kickers: CardMultiset, principal_values: set[int]) -> bool:
    # pairwise distinct ranks, none principal, never both jokers together
    for i, c in enumerate(kickers):
        if c == 0:
            continue
        if c > 1 or (i + 3) in principal_values:
            return False
    return not (kickers[JOKER_INDEX_BJ] and kickers[JOKER_INDEX_RJ])


def _pair_kickers_ok(kickers: CardMultiset, principal_values: set[int], n: int) -> bool:
    ranks = 0
    for i, c in enumerate(kickers):
        if c == 0:
            continue
        if c != 2 or (i + 3) in principal_values or (i + 3) > 15:
            return False
        ranks += 1
    return ranks == n


# Category weights for the partitioning heuristic. MaxCard is the value
# of the highest principal card; the nuke's weight is constant. Weights
# are exact rationals (two categories carry a half).
_SCORE_NUMERATORS_X2 = {
    Category.NONE: (0, 0),
    Category.SOLO: (2, -20),
    Category.PAIR: (2, -20),
    Category.TRIO: (2, -20),
    Category.SEQ_SOLOS: (2, -18),
    Category.SEQ_PAIRS: (2, -18),
    Category.SEQ_TRIOS_TAKE_NONE: (2, -18),
    Category.SEQ_TRIOS_TAKE_ONE: (2, -20),
    Category.SEQ_TRIOS_TAKE_TWO: (2, -20),
    Category.SEQ_TRIOS_SERIES_TAKE_ONE: (1, -2),
    Category.SEQ_TRIOS_SERIES_TAKE_TWO: (1, -2),
    Category.BOMB: (2, 8),
    Category.FOUR_TAKE_TWO_SOLOS: (1, -3),
    Category.FOUR_TAKE_TWO_PAIRS: (1, -3),
    Category.NUKE: (0, 40),
}


def category_score_x2(category: Category, principal: int) -> int:
    """Twice the category weight, as an exact integer (the table's only
    denominator is 2). Hot-path form used by the partitioning agent."""
    a, b = _SCORE_NUMERATORS_X2[category]
    return a * principal + b


def category_score(group: CardGroup) -> Fraction:
    """The category weight of a group: Solo/Pair/Trio MaxCard-10, runs
    MaxCard-9, kickered trios MaxCard-10, airplanes (MaxCard-2)/2,
    Bomb MaxCard+4, quad-with-kickers (MaxCard-3)/2, Nuke 20, pass 0."""
    return Fraction(category_score_x2(group.category, group.principal), 2)


def beats(candidate: CardGroup, incumbent: CardGroup) -> bool:
    """Whether candidate may be played over incumbent.

    Same category, same run length and (implied by category) same kicker
    kind beats on strictly higher principal rank; bombs beat anything
    but bombs/nuke; higher bombs beat lower; the nuke beats everything.
    Kicker ranks never matter.
    """
    if candidate.category is Category.NONE or incumbent.category is Category.NONE:
        raise ValueError("beats() compares real groups, not passes")
    if candidate.category is Category.NUKE:
        return True
    if incumbent.category is Category.NUKE:
        return False
    if candidate.category is Category.BOMB:
        return incumbent.category is not Category.BOMB or candidate.principal > incumbent.principal
    if incumbent.category is Category.BOMB:
        return False
    return (
        candidate.category is incumbent.category
        and candidate.length == incumbent.length
        and candidate.principal > incumbent.principal
    )
