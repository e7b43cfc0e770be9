"""Partitioning-agent tests, anchored by an oracle written before the
implementation: an independent single-group scorer (derived straight
from the category weight table) plus an exhaustive partition search
that maximizes over every legal first group of every remainder. The
oracle shares no code with doudizhu.rhcp; groups are discovered by
filtering raw sub-multisets."""

import itertools
import random
from fractions import Fraction

import pytest

from doudizhu.cards import FULL_DECK, CardMultiset, parse_cards, classify
from doudizhu.movegen import is_pass
from doudizhu.rhcp import RhcpConfig, RhcpSolver, best_group, strategy_score

# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


def oracle_group_score(counts) -> Fraction | None:
    """Weight of the multiset taken as one group; None if not a group."""
    n = sum(counts)
    present = [(i + 3, c) for i, c in enumerate(counts) if c]
    if n == 0:
        return Fraction(0)
    values = [v for v, _ in present]
    top = max(values)
    has_both_jokers = counts[13] == 1 and counts[14] == 1

    def consecutive(vs):
        return all(b == a + 1 for a, b in zip(vs, vs[1:])) and vs[-1] <= 14

    if n == 1:
        return Fraction(top - 10)
    if n == 2 and has_both_jokers:
        return Fraction(20)
    if len(present) == 1:
        v, c = present[0]
        if c == 2:
            return Fraction(v - 10)
        if c == 3:
            return Fraction(v - 10)
        if c == 4:
            return Fraction(v + 4)
        return None

    counts_used = [c for _, c in present]
    if all(c == 1 for c in counts_used) and n >= 5 and consecutive(values):
        return Fraction(top - 9)
    if all(c == 2 for c in counts_used) and len(values) >= 3 and len(values) <= 10 and consecutive(values):
        return Fraction(top - 9)
    if all(c == 3 for c in counts_used) and len(values) >= 2 and consecutive(values):
        return Fraction(top - 9)

    quads = [v for v, c in present if c == 4]
    trios = [v for v, c in present if c == 3]
    pairs = [v for v, c in present if c == 2]
    solos = [v for v, c in present if c == 1]

    if len(trios) == 1 and not quads:
        if n == 4 and len(solos) == 1:
            return Fraction(trios[0] - 10)
        if n == 5 and len(pairs) == 1:
            return Fraction(trios[0] - 10)
    if len(trios) >= 2 and consecutive(trios) and not quads:
        k = len(trios)
        if len(solos) == k and not pairs and not (16 in solos and 17 in solos):
            return Fraction(max(trios) - 2, 2)
        if len(pairs) == k and not solos:
            return Fraction(max(trios) - 2, 2)
    if len(quads) == 1 and not trios:
        if n == 6 and len(solos) == 2 and not pairs and not (16 in solos and 17 in solos):
            return Fraction(quads[0] - 3, 2)
        if n == 8 and len(pairs) == 2 and not solos:
            return Fraction(quads[0] - 3, 2)
    return None


def oracle_subgroups(counts):
    """Every legal group inside `counts`, found by raw filtering."""
    for combo in itertools.product(*[range(c + 1) for c in counts]):
        if any(combo):
            score = oracle_group_score(combo)
            if score is not None:
                yield combo, score


def oracle_value(counts, memo) -> Fraction:
    """Best total weight over all partitions: max over every legal
    first group of its weight plus the best of the remainder."""
    key = tuple(counts)
    if not any(key):
        return Fraction(0)
    if key in memo:
        return memo[key]
    best = None
    for sub, score in oracle_subgroups(key):
        rest = tuple(a - b for a, b in zip(key, sub))
        total = score + oracle_value(rest, memo)
        if best is None or total > best:
            best = total
    memo[key] = best
    return best


def oracle_partitions(counts):
    """Literal enumeration of every ordered partition into legal groups."""
    key = tuple(counts)
    if not any(key):
        yield ()
        return
    for sub, score in oracle_subgroups(key):
        rest = tuple(a - b for a, b in zip(key, sub))
        for tail in oracle_partitions(rest):
            yield ((sub, score),) + tail


def random_hand(rng, size):
    return CardMultiset.from_values(rng.sample(FULL_DECK.values(), size))


# ---------------------------------------------------------------------------
# tests
# ---------------------------------------------------------------------------


class TestStrategyScore:
    def test_pair_of_threes(self):
        hand = parse_cards("33")
        assert strategy_score(classify(parse_cards("33")), hand) == -7
        assert strategy_score(classify(parse_cards("3")), hand) == -14

    def test_base_case_is_group_weight(self):
        rng = random.Random(6)
        solver = RhcpSolver()
        for _ in range(30):
            hand = random_hand(rng, rng.randint(1, 6))
            from doudizhu.movegen import iter_groups

            for g in iter_groups(hand):
                if g.cards == hand:
                    from doudizhu.cards import category_score

                    assert solver.strategy_score(g, hand) == category_score(g)

    def test_depends_only_on_remainder(self):
        g = classify(parse_cards("55"))
        h1 = parse_cards("5,5,9,9")
        h2 = CardMultiset.from_values([9, 9, 5, 5])
        s1, s2 = RhcpSolver(), RhcpSolver()
        assert s1.strategy_score(g, h1) == s2.strategy_score(g, h2)

    def test_requires_group_within_hand(self):
        with pytest.raises(ValueError):
            strategy_score(classify(parse_cards("44")), parse_cards("33"))


class TestBestGroup:
    def test_examples(self):
        g, score = best_group(parse_cards("33"))
        assert str(g) == "3,3" and score == -7
        g, score = best_group(parse_cards("34567"))
        assert str(g) == "3,4,5,6,7" and score == -2
        g, score = best_group(parse_cards("*$"))
        assert str(g) == "*,$" and score == 20

    def test_oracle_equivalence_small_hands(self):
        rng = random.Random(1234)
        solver = RhcpSolver()
        for _ in range(250):
            hand = random_hand(rng, rng.randint(1, 8))
            memo = {}
            want = max(score + oracle_value(
                tuple(a - b for a, b in zip(hand, sub)), memo)
                for sub, score in oracle_subgroups(hand))
            got_group, got_score = solver.best_group(hand)
            assert got_score == want, hand
            assert solver.strategy_score(got_group, hand) == want

    def test_oracle_literal_enumeration_tiny_hands(self):
        rng = random.Random(99)
        solver = RhcpSolver()
        for _ in range(60):
            hand = random_hand(rng, rng.randint(1, 5))
            totals = [sum(s for _, s in p) for p in oracle_partitions(hand)]
            assert solver.best_group(hand)[1] == max(totals)

    def test_tie_break_prefers_larger_then_higher(self):
        rng = random.Random(55)
        solver = RhcpSolver()
        for _ in range(120):
            hand = random_hand(rng, rng.randint(2, 7))
            got_group, got_score = solver.best_group(hand)
            memo = {}
            ties = []
            for sub, score in oracle_subgroups(hand):
                rest = tuple(a - b for a, b in zip(hand, sub))
                if score + oracle_value(rest, memo) == got_score:
                    ties.append(sub)
            best_size = max(sum(t) for t in ties)
            assert got_group.size() == best_size

    def test_memoized_matches_fresh(self):
        rng = random.Random(77)
        warm = RhcpSolver()
        hands = [random_hand(rng, 7) for _ in range(40)]
        warm_scores = [warm.best_group(h)[1] for h in hands]
        for h, ws in zip(hands, warm_scores):
            assert RhcpSolver().best_group(h)[1] == ws

    def test_nuke_never_hurts(self):
        rng = random.Random(13)
        for _ in range(40):
            vals = rng.sample([v for v in FULL_DECK.values() if v < 16], rng.randint(1, 10))
            base = RhcpSolver().best_group(CardMultiset.from_values(vals))[1]
            with_nuke = RhcpSolver().best_group(CardMultiset.from_values(vals + [16, 17]))[1]
            assert with_nuke >= base


class TestAct:
    def test_leads_best_group(self):
        solver = RhcpSolver()
        assert str(solver.act(parse_cards("33"), None)) == "3,3"

    def test_forced_pass(self):
        solver = RhcpSolver()
        move = solver.act(parse_cards("33"), classify(parse_cards("A")))
        assert is_pass(move)

    def test_low_solo_response_plays_the_four(self):
        # responding to a solo 3 holding {4, BJ, RJ}: playing the 4
        # scores -6 + 20 = 14, passing scores 14 - penalty = 11; the
        # nuke also reaches 14 but responding ties keep smaller groups
        solver = RhcpSolver()
        move = solver.act(parse_cards("4*$"), classify(parse_cards("3")))
        assert str(move) == "4"

    def test_huge_pass_penalty_forces_play(self):
        solver = RhcpSolver()
        config = RhcpConfig(pass_penalty=Fraction(1000))
        move = solver.act(parse_cards("459"), classify(parse_cards("3")), config)
        assert not is_pass(move)

    def test_zero_penalty_still_plays_on_tie(self):
        # pass only wins strict comparisons
        solver = RhcpSolver()
        move = solver.act(parse_cards("4"), classify(parse_cards("3")),
                          RhcpConfig(pass_penalty=Fraction(0)))
        assert str(move) == "4"

    def test_config_rejects_negative_penalty(self):
        with pytest.raises(ValueError):
            RhcpConfig(pass_penalty=Fraction(-1))
