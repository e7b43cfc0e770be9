"""Recursive hand-partitioning agent.

The quality of handing out a group C from hand H is scored as the
category weight of C plus the best achievable total weight of any
partition of the remainder:

    Q(C, H) = r(C) + V(H \\ C),   V(empty) = 0,
    V(H) = max over legal groups C' in H of Q(C', H)

and the agent leads with argmax_C Q(C, H). The inner maximum only needs
to range over groups containing the lowest occupied rank (every
partition has a block holding that card), which keeps the memoized
state space small. Scores are exact: internally everything is doubled
into integers (the weight table's only denominator is 2) and exposed as
Fractions.

When responding, each legal beating group is scored by Q against the
full hand and compared with passing, which scores V(H) minus a
configurable penalty; passing wins only strict comparisons.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .cards import (
    MAX_RUN_VALUE,
    NUM_RANKS,
    CardGroup,
    CardMultiset,
    category_score_x2,
)
from .movegen import PAIR_RUN_MAX, PASS, Move, is_pass, iter_groups, legal_moves

_TOP_RUN_INDEX = MAX_RUN_VALUE - 3  # index of A, the highest run rank
_BJ, _RJ = 13, 14

# x2 weight constants per single-rank group size (solo/pair/trio share a formula)
_KIND_SCORE_X2 = {1: (2, -20), 2: (2, -20), 3: (2, -20), 4: (2, 8)}

_V_CACHE_LIMIT = 2_000_000


@dataclass(frozen=True)
class RhcpConfig:
    pass_penalty: Fraction = Fraction(3)

    def __post_init__(self):
        if self.pass_penalty < 0:
            raise ValueError("pass_penalty must be non-negative")


def _min_rank_moves(c: tuple, m: int):
    """Yield (score_x2, remainder) for every legal group within `c`
    that uses at least one copy of the lowest occupied rank `m`."""
    counts = list(c)
    v = m + 3

    def removed(pairs):
        out = counts.copy()
        for idx, k in pairs:
            out[idx] -= k
        return tuple(out)

    # solo / pair / trio / bomb of the min rank
    for k in range(1, c[m] + 1):
        a, b = _KIND_SCORE_X2[k]
        yield a * v + b, removed([(m, k)])

    # nuke
    if m == _BJ and c[_RJ]:
        yield 40, removed([(_BJ, 1), (_RJ, 1)])

    # runs starting at the min rank
    if m <= _TOP_RUN_INDEX:
        for need, min_len, max_len in ((1, 5, 12), (2, 3, PAIR_RUN_MAX), (3, 2, 6)):
            if c[m] < need:
                continue
            hi = m
            while hi + 1 <= _TOP_RUN_INDEX and c[hi + 1] >= need and hi + 1 - m + 1 <= max_len:
                hi += 1
            for end in range(m + min_len - 1, hi + 1):
                yield 2 * (end + 3) - 18, removed([(i, need) for i in range(m, end + 1)])

    solo_kickers = [i for i in range(NUM_RANKS) if c[i] >= 1]
    pair_kickers = [i for i in range(NUM_RANKS) if c[i] >= 2]

    # single trio with one kicker: principal m, or principal t with kicker m
    for t in range(NUM_RANKS):
        if c[t] < 3 or (t != m and c[m] < 1):
            continue
        score = 2 * (t + 3) - 20
        if t == m:
            for k in solo_kickers:
                if k != t:
                    yield score, removed([(t, 3), (k, 1)])
            for k in pair_kickers:
                if k != t:
                    yield score, removed([(t, 3), (k, 2)])
        else:
            yield score, removed([(t, 3), (m, 1)])
            if c[m] >= 2:
                yield score, removed([(t, 3), (m, 2)])

    # quad with two kickers: principal m, or principal t with m among kickers
    for t in range(NUM_RANKS):
        if c[t] < 4:
            continue
        score = (t + 3) - 3
        if t == m:
            for k1, k2 in itertools.combinations([k for k in solo_kickers if k != t], 2):
                if k1 == _BJ and k2 == _RJ:
                    continue
                yield score, removed([(t, 4), (k1, 1), (k2, 1)])
            for k1, k2 in itertools.combinations([k for k in pair_kickers if k != t], 2):
                yield score, removed([(t, 4), (k1, 2), (k2, 2)])
        else:
            for k in solo_kickers:
                if k != t and k != m and not (m == _BJ and k == _RJ) and not (k == _BJ and m == _RJ):
                    yield score, removed([(t, 4), (m, 1), (k, 1)])
            if c[m] >= 2:
                for k in pair_kickers:
                    if k != t and k != m:
                        yield score, removed([(t, 4), (m, 2), (k, 2)])

    # airplanes: trio run [lo..hi] with matching solo or pair kickers;
    # a run through m must start at m (lower ranks are empty), and a
    # run above m only qualifies when m is among the kickers
    total = sum(c)
    for lo in range(m, _TOP_RUN_INDEX):
        if c[lo] < 3:
            continue
        hi = lo
        while hi + 1 <= _TOP_RUN_INDEX and c[hi + 1] >= 3:
            hi += 1
        must = m if lo != m else None
        for end in range(lo + 1, hi + 1):
            n = end - lo + 1
            score = (end + 3) - 2
            run = range(lo, end + 1)
            if 4 * n <= total:
                kick1 = [k for k in solo_kickers if not lo <= k <= end]
                for combo in _kicker_combos(kick1, n, must, True):
                    yield score, removed([(i, 3) for i in run] + [(k, 1) for k in combo])
            if 5 * n <= total:
                kick2 = [k for k in pair_kickers if not lo <= k <= end]
                for combo in _kicker_combos(kick2, n, must, False):
                    yield score, removed([(i, 3) for i in run] + [(k, 2) for k in combo])


def _kicker_combos(candidates: list[int], n: int, must_include: int | None, solo: bool):
    if must_include is not None:
        if must_include not in candidates:
            return
        rest = [k for k in candidates if k != must_include]
        for combo in itertools.combinations(rest, n - 1):
            full = (must_include,) + combo
            if solo and _BJ in full and _RJ in full:
                continue
            yield full
    else:
        for combo in itertools.combinations(candidates, n):
            if solo and _BJ in combo and _RJ in combo:
                continue
            yield combo


class RhcpSolver:
    """Memoizing strategy-score evaluator. One per agent instance; not
    safe to share across concurrent games."""

    def __init__(self):
        self._v: dict[tuple, int] = {}

    def value_x2(self, counts: tuple) -> int:
        """Best total doubled weight over all partitions of `counts`."""
        if not any(counts):
            return 0
        if len(self._v) > _V_CACHE_LIMIT:
            self._v.clear()
        return self._value(counts)

    def _value(self, c: tuple) -> int:
        memo = self._v
        cached = memo.get(c)
        if cached is not None:
            return cached
        m = 0
        while not c[m]:
            m += 1
        best = None
        for score2, rest in _min_rank_moves(c, m):
            val = score2
            if any(rest):
                sub = memo.get(rest)
                val += self._value(rest) if sub is None else sub
            if best is None or val > best:
                best = val
        memo[c] = best
        return best

    def strategy_score_x2(self, group: CardGroup, hand: CardMultiset) -> int:
        rest = hand.remove(group.cards)
        return category_score_x2(group.category, group.principal) + self.value_x2(tuple(rest))

    def strategy_score(self, group: CardGroup, hand: CardMultiset) -> Fraction:
        if not hand.contains(group.cards):
            raise ValueError("group must fit within the hand")
        return Fraction(self.strategy_score_x2(group, hand), 2)

    def best_group(self, hand: CardMultiset) -> tuple[CardGroup, Fraction]:
        """The lead the agent would pick: argmax Q over all groups, ties
        broken toward larger groups, then higher principal rank."""
        if hand.is_empty():
            raise ValueError("best_group needs a non-empty hand")
        best = None
        best_key = None
        for g in iter_groups(hand):
            q2 = self.strategy_score_x2(g, hand)
            key = (q2, g.size(), g.principal)
            if best_key is None or key > best_key:
                best, best_key = g, key
        return best, Fraction(best_key[0], 2)

    def act(self, hand: CardMultiset, incumbent: CardGroup | None,
            config: RhcpConfig | None = None) -> Move:
        """Lead with the best group, or respond with the best-scoring
        beating group unless passing strictly beats them all."""
        config = config or RhcpConfig()
        if incumbent is None:
            return self.best_group(hand)[0]
        candidates = [m for m in legal_moves(hand, incumbent) if not is_pass(m)]
        if not candidates:
            return PASS
        best = None
        best_key = None
        for g in candidates:
            q2 = self.strategy_score_x2(g, hand)
            # responding ties prefer smaller, lower groups (keep strength)
            key = (q2, -g.size(), -g.principal)
            if best_key is None or key > best_key:
                best, best_key = g, key
        pass_x2 = self.value_x2(tuple(hand)) - 2 * config.pass_penalty
        if pass_x2 > best_key[0]:
            return PASS
        return best


def strategy_score(group: CardGroup, hand: CardMultiset,
                   solver: RhcpSolver | None = None) -> Fraction:
    return (solver or RhcpSolver()).strategy_score(group, hand)


def best_group(hand: CardMultiset, solver: RhcpSolver | None = None) -> tuple[CardGroup, Fraction]:
    return (solver or RhcpSolver()).best_group(hand)


def rhcp_act(observation, config: RhcpConfig | None = None,
             solver: RhcpSolver | None = None) -> Move:
    """Move for an engine Observation (anything with `own_hand` and
    `incumbent`, the latter None or a (seat, group) pair)."""
    incumbent = observation.incumbent[1] if observation.incumbent else None
    return (solver or RhcpSolver()).act(observation.own_hand, incumbent, config)
